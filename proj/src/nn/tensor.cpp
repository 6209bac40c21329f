#include "fasloc/nn/tensor.hpp"

#include <cmath>

namespace fasloc::nn {

void init_uniform(Tensor& t, int fan_in, Rng& rng) {
  const double bound = std::sqrt(1.0 / std::max(1, fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index i = 0; i < t.value.size(); ++i) t.value.data()[i] = dist(rng);
  t.grad.setZero(t.value.rows(), t.value.cols());
}

void zero_grads(const TensorList& params) {
  for (const auto& p : params) p.tensor->zero_grad();
}

double grad_norm(const TensorList& params) {
  double s = 0.0;
  for (const auto& p : params) s += p.tensor->grad.squaredNorm();
  return std::sqrt(s);
}

std::size_t parameter_count(const TensorList& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += static_cast<std::size_t>(p.tensor->size());
  return n;
}

void copy_values(const TensorList& from, const TensorList& to) {
  if (from.size() != to.size()) throw ValidationError("copy_values: tensor count mismatch");
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (from[i].tensor->value.rows() != to[i].tensor->value.rows() ||
        from[i].tensor->value.cols() != to[i].tensor->value.cols())
      throw ValidationError("copy_values: shape mismatch at " + from[i].name);
    to[i].tensor->value = from[i].tensor->value;
  }
}

Optimizer::Optimizer(TensorList params, OptimizerConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  for (const auto& p : params_) {
    m_.push_back(Matrix::Zero(p.tensor->value.rows(), p.tensor->value.cols()));
    v_.push_back(Matrix::Zero(p.tensor->value.rows(), p.tensor->value.cols()));
  }
}

void Optimizer::step() {
  double scale = 1.0;
  if (cfg_.clip_norm > 0.0) {
    const double norm = grad_norm(params_);
    if (norm > cfg_.clip_norm) scale = cfg_.clip_norm / norm;
  }
  ++steps_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, steps_);
  const double bc2 = 1.0 - std::pow(cfg_.beta2, steps_);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor& t = *params_[i].tensor;
    const Matrix g = scale * t.grad;
    if (cfg_.kind == OptimizerKind::Sgd) {
      t.value -= cfg_.learning_rate * g;
      continue;
    }
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
    t.value.array() -= cfg_.learning_rate * (m_[i].array() / bc1) /
                       ((v_[i].array() / bc2).sqrt() + cfg_.epsilon);
  }
}

}  // namespace fasloc::nn
