#pragma once

#include <vector>

#include "fasloc/nn/mlp.hpp"

namespace fasloc::nn {

/// Row-wise softmax.
Matrix softmax_rows(const Matrix& scores);

/// One scaled dot-product attention unit over a token window X (T×d):
///   Ω = softmax(X τ_Qᵀ (X τ_Kᵀ)ᵀ / √d_head) X τ_Vᵀ
class AttentionUnit {
 public:
  struct Cache {
    Matrix x, q, k, v, weights;
  };

  AttentionUnit() = default;
  AttentionUnit(int width, int head_width);

  Matrix forward(const Matrix& x, Cache* cache = nullptr) const;
  /// Accumulates τ gradients, returns dL/dX.
  Matrix backward(const Cache& cache, const Matrix& dout);

  void init(Rng& rng);
  void collect(const std::string& prefix, TensorList& out);

  int head_width() const { return query.out(); }

  Linear query, key, value;
};

/// U attention units applied to the same window, outputs concatenated column-wise.
class MultiHeadAttention {
 public:
  struct Cache {
    std::vector<AttentionUnit::Cache> heads;
  };

  MultiHeadAttention() = default;
  MultiHeadAttention(int width, int heads, int head_width);

  Matrix forward(const Matrix& x, Cache* cache = nullptr) const;
  Matrix backward(const Cache& cache, const Matrix& dout);

  void init(Rng& rng);
  void collect(const std::string& prefix, TensorList& out);

  int heads() const { return static_cast<int>(units_.size()); }
  int out_width() const { return heads() * units_.front().head_width(); }
  std::vector<AttentionUnit>& units() { return units_; }

 private:
  std::vector<AttentionUnit> units_;
};

}  // namespace fasloc::nn
