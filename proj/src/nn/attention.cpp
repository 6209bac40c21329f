#include "fasloc/nn/attention.hpp"

#include <cmath>

namespace fasloc::nn {

Matrix softmax_rows(const Matrix& scores) {
  Matrix out(scores.rows(), scores.cols());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const double mx = scores.row(i).maxCoeff();
    out.row(i) = (scores.row(i).array() - mx).exp().matrix();
    out.row(i) /= out.row(i).sum();
  }
  return out;
}

AttentionUnit::AttentionUnit(int width, int head_width)
    : query(width, head_width, false), key(width, head_width, false),
      value(width, head_width, false) {}

Matrix AttentionUnit::forward(const Matrix& x, Cache* cache) const {
  if (x.rows() == 0) throw ValidationError("attention: empty history window");
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_width()));
  Matrix q = query.forward(x);
  Matrix k = key.forward(x);
  Matrix v = value.forward(x);
  Matrix w = softmax_rows(scale * q * k.transpose());
  Matrix out = w * v;
  if (cache) *cache = {x, std::move(q), std::move(k), std::move(v), std::move(w)};
  return out;
}

Matrix AttentionUnit::backward(const Cache& c, const Matrix& dout) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_width()));
  const Matrix dw = dout * c.v.transpose();
  const Matrix dv = c.weights.transpose() * dout;
  // Softmax Jacobian, row by row.
  const Eigen::VectorXd row_dot = (dw.cwiseProduct(c.weights)).rowwise().sum();
  const Matrix ds = c.weights.cwiseProduct(dw - row_dot.replicate(1, dw.cols()));
  const Matrix dq = scale * ds * c.k;
  const Matrix dk = scale * ds.transpose() * c.q;
  Matrix dx = query.backward(c.x, dq);
  dx += key.backward(c.x, dk);
  dx += value.backward(c.x, dv);
  return dx;
}

void AttentionUnit::init(Rng& rng) {
  query.init(rng);
  key.init(rng);
  value.init(rng);
}

void AttentionUnit::collect(const std::string& prefix, TensorList& out) {
  query.collect(prefix + ".tau_q", out);
  key.collect(prefix + ".tau_k", out);
  value.collect(prefix + ".tau_v", out);
}

MultiHeadAttention::MultiHeadAttention(int width, int heads, int head_width) {
  if (heads < 1) throw ValidationError("attention needs at least one head");
  for (int u = 0; u < heads; ++u) units_.emplace_back(width, head_width);
}

Matrix MultiHeadAttention::forward(const Matrix& x, Cache* cache) const {
  Matrix out(x.rows(), out_width());
  if (cache) cache->heads.resize(units_.size());
  const int hw = units_.front().head_width();
  for (std::size_t u = 0; u < units_.size(); ++u)
    out.middleCols(u * hw, hw) = units_[u].forward(x, cache ? &cache->heads[u] : nullptr);
  return out;
}

Matrix MultiHeadAttention::backward(const Cache& cache, const Matrix& dout) {
  const int hw = units_.front().head_width();
  Matrix dx = Matrix::Zero(cache.heads.front().x.rows(), cache.heads.front().x.cols());
  for (std::size_t u = 0; u < units_.size(); ++u)
    dx += units_[u].backward(cache.heads[u], dout.middleCols(u * hw, hw));
  return dx;
}

void MultiHeadAttention::init(Rng& rng) {
  for (auto& u : units_) u.init(rng);
}

void MultiHeadAttention::collect(const std::string& prefix, TensorList& out) {
  for (std::size_t u = 0; u < units_.size(); ++u)
    units_[u].collect(prefix + ".head" + std::to_string(u), out);
}

}  // namespace fasloc::nn
