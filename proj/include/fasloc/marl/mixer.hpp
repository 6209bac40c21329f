#pragma once

#include "fasloc/nn/mlp.hpp"

namespace fasloc::marl {

/// Factorization network Θ. A hypernetwork conditioned on Ω emits the weights
/// and biases of a one-hidden-layer mixing network over the local q-values:
///   Q_G = w2ᵀ act(W1ᵀ q + b1) + b2
/// With `monotone` the emitted W1 and w2 pass through |·|, so ∂Q_G/∂q_k ≥ 0.
class Mixer {
 public:
  struct Cache {
    nn::RowVector q, omega;
    nn::Matrix w1_raw;  // agents × hidden
    nn::RowVector b1, pre, hidden, w2_raw;
    nn::Mlp::Cache b2;
  };

  Mixer() = default;
  Mixer(int agents, int omega_width, int hidden, bool monotone,
        nn::Activation activation = nn::Activation::Elu);

  double forward(const nn::RowVector& q, const nn::RowVector& omega, Cache* cache = nullptr) const;
  /// Accumulates parameter gradients; writes dL/dq and dL/dΩ.
  void backward(const Cache& cache, double dq_global, nn::RowVector& dq, nn::RowVector& domega);

  void init(Rng& rng);
  void collect(const std::string& prefix, nn::TensorList& out);

  int agents() const { return agents_; }
  int hidden() const { return hidden_; }
  bool monotone() const { return monotone_; }

  /// Sets the hypernetwork so that Q_G = Σ q_k for any Ω (requires an
  /// identity activation or nonnegative sums).
  void set_identity();

  nn::Linear hyper_w1, hyper_b1, hyper_w2;
  nn::Mlp hyper_b2;

 private:
  int agents_ = 0;
  int hidden_ = 0;
  bool monotone_ = true;
  nn::Activation activation_ = nn::Activation::Elu;
};

}  // namespace fasloc::marl
