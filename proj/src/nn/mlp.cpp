#include "fasloc/nn/mlp.hpp"

#include <cmath>

namespace fasloc::nn {

Linear::Linear(int in, int out, bool bias)
    : weight(out, in), bias(bias ? 1 : 0, bias ? out : 0), use_bias_(bias) {}

Matrix Linear::forward(const Matrix& x) const {
  if (x.cols() != weight.value.cols())
    throw ValidationError("Linear: input width " + std::to_string(x.cols()) + " != " +
                          std::to_string(weight.value.cols()));
  Matrix y = x * weight.value.transpose();
  if (use_bias_) y.rowwise() += bias.value.row(0);
  return y;
}

Matrix Linear::backward(const Matrix& x, const Matrix& dy) {
  weight.grad.noalias() += dy.transpose() * x;
  if (use_bias_) bias.grad.row(0) += dy.colwise().sum();
  return dy * weight.value;
}

void Linear::init(Rng& rng) {
  init_uniform(weight, in(), rng);
  if (use_bias_) init_uniform(bias, in(), rng);
}

void Linear::collect(const std::string& prefix, TensorList& out) {
  out.push_back({prefix + ".weight", &weight});
  if (use_bias_) out.push_back({prefix + ".bias", &bias});
}

Matrix activate(const Matrix& x, Activation a) {
  switch (a) {
    case Activation::Relu:
      return x.cwiseMax(0.0);
    case Activation::Tanh:
      return x.array().tanh().matrix();
    case Activation::Elu:
      return x.unaryExpr([](double v) { return v > 0.0 ? v : std::expm1(v); });
    case Activation::Identity:
      return x;
  }
  return x;
}

RowVector activate(const RowVector& x, Activation a) {
  return activate(Matrix(x), a).row(0);
}

Matrix activate_backward(const Matrix& pre, const Matrix& dpost, Activation a) {
  switch (a) {
    case Activation::Relu:
      return dpost.cwiseProduct(pre.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
    case Activation::Tanh:
      return dpost.cwiseProduct(
          pre.unaryExpr([](double v) { const double t = std::tanh(v); return 1.0 - t * t; }));
    case Activation::Elu:
      return dpost.cwiseProduct(pre.unaryExpr([](double v) { return v > 0.0 ? 1.0 : std::exp(v); }));
    case Activation::Identity:
      return dpost;
  }
  return dpost;
}

Mlp::Mlp(std::vector<int> sizes, Activation hidden) : hidden_(hidden) {
  if (sizes.size() < 2) throw ValidationError("Mlp needs at least input and output sizes");
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) layers_.emplace_back(sizes[i], sizes[i + 1]);
}

Matrix Mlp::forward(const Matrix& x, Cache* cache) const {
  Matrix h = x;
  if (cache) {
    cache->inputs.clear();
    cache->pre.clear();
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (cache) cache->inputs.push_back(h);
    Matrix pre = layers_[i].forward(h);
    const bool last = i + 1 == layers_.size();
    h = last ? pre : activate(pre, hidden_);
    if (cache) cache->pre.push_back(std::move(pre));
  }
  return h;
}

Matrix Mlp::backward(const Cache& cache, const Matrix& dy) {
  Matrix d = dy;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    if (i + 1 != layers_.size()) d = activate_backward(cache.pre[i], d, hidden_);
    d = layers_[i].backward(cache.inputs[i], d);
  }
  return d;
}

void Mlp::init(Rng& rng) {
  for (auto& l : layers_) l.init(rng);
}

void Mlp::collect(const std::string& prefix, TensorList& out) {
  for (std::size_t i = 0; i < layers_.size(); ++i)
    layers_[i].collect(prefix + "." + std::to_string(i), out);
}

}  // namespace fasloc::nn
