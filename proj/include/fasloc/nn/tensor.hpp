#pragma once

#include <string>
#include <vector>

#include "fasloc/types.hpp"

namespace fasloc::nn {

using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

/// Trainable buffer: values plus an accumulated gradient of the same shape.
struct Tensor {
  Matrix value;
  Matrix grad;

  Tensor() = default;
  Tensor(Eigen::Index rows, Eigen::Index cols)
      : value(Matrix::Zero(rows, cols)), grad(Matrix::Zero(rows, cols)) {}

  Eigen::Index size() const { return value.size(); }
  void zero_grad() { grad.setZero(); }
  bool finite() const { return value.allFinite() && grad.allFinite(); }
};

struct NamedTensor {
  std::string name;
  Tensor* tensor = nullptr;
};

using TensorList = std::vector<NamedTensor>;

/// Uniform ±√(1/fan_in) initialization.
void init_uniform(Tensor& t, int fan_in, Rng& rng);

void zero_grads(const TensorList& params);
double grad_norm(const TensorList& params);
std::size_t parameter_count(const TensorList& params);
/// Copies values between structurally identical lists.
void copy_values(const TensorList& from, const TensorList& to);

enum class OptimizerKind { Sgd, Adam };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double learning_rate = 1e-3;
  double clip_norm = 10.0;  // <= 0 disables clipping
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Gradient-descent step over a fixed tensor list.
class Optimizer {
 public:
  Optimizer(TensorList params, OptimizerConfig cfg);
  void step();

 private:
  TensorList params_;
  OptimizerConfig cfg_;
  std::vector<Matrix> m_, v_;
  long steps_ = 0;
};

}  // namespace fasloc::nn
