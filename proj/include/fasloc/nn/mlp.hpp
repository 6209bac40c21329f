#pragma once

#include <vector>

#include "fasloc/nn/tensor.hpp"

namespace fasloc::nn {

/// Affine map on row batches: Y = X Wᵀ + b, W is out×in.
class Linear {
 public:
  Linear() = default;
  Linear(int in, int out, bool bias = true);

  Matrix forward(const Matrix& x) const;
  /// Accumulates parameter gradients, returns dL/dX.
  Matrix backward(const Matrix& x, const Matrix& dy);

  void init(Rng& rng);
  void collect(const std::string& prefix, TensorList& out);

  int in() const { return static_cast<int>(weight.value.cols()); }
  int out() const { return static_cast<int>(weight.value.rows()); }
  bool has_bias() const { return use_bias_; }

  Tensor weight;
  Tensor bias;

 private:
  bool use_bias_ = true;
};

enum class Activation { Relu, Tanh, Elu, Identity };

RowVector activate(const RowVector& x, Activation a);
Matrix activate(const Matrix& x, Activation a);
/// dL/dpre given pre-activation values and dL/dpost.
Matrix activate_backward(const Matrix& pre, const Matrix& dpost, Activation a);

/// Affine layers with a hidden activation between them and none after the last.
class Mlp {
 public:
  struct Cache {
    std::vector<Matrix> inputs;  // input to each layer
    std::vector<Matrix> pre;     // pre-activation output of each layer
  };

  Mlp() = default;
  Mlp(std::vector<int> sizes, Activation hidden = Activation::Relu);

  Matrix forward(const Matrix& x, Cache* cache = nullptr) const;
  Matrix backward(const Cache& cache, const Matrix& dy);

  void init(Rng& rng);
  void collect(const std::string& prefix, TensorList& out);

  int in() const { return layers_.front().in(); }
  int out() const { return layers_.back().out(); }
  std::vector<Linear>& layers() { return layers_; }
  const std::vector<Linear>& layers() const { return layers_; }

 private:
  std::vector<Linear> layers_;
  Activation hidden_ = Activation::Relu;
};

}  // namespace fasloc::nn
