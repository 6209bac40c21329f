#pragma once

#include "fasloc/nn/mlp.hpp"

namespace fasloc::nn {

/// Gated recurrent unit on a single row vector:
///   z = σ(x W_zᵀ + h U_zᵀ + b_z)
///   r = σ(x W_rᵀ + h U_rᵀ + b_r)
///   ĥ = tanh(x W_hᵀ + (r∘h) U_hᵀ + b_h)
///   h' = (1 − z)∘h + z∘ĥ
class GruCell {
 public:
  struct Cache {
    RowVector x, h_prev, z, r, candidate;
  };

  GruCell() = default;
  GruCell(int input, int hidden);

  RowVector step(const RowVector& x, const RowVector& h_prev, Cache* cache = nullptr) const;
  /// Accumulates parameter gradients; writes dL/dx and returns dL/dh_prev.
  RowVector backward(const Cache& cache, const RowVector& dh_next, RowVector* dx = nullptr);

  void init(Rng& rng);
  void collect(const std::string& prefix, TensorList& out);

  int input_size() const { return static_cast<int>(wz_.weight.value.cols()); }
  int hidden_size() const { return static_cast<int>(wz_.weight.value.rows()); }

 private:
  Linear wz_, uz_, wr_, ur_, wh_, uh_;
};

}  // namespace fasloc::nn
