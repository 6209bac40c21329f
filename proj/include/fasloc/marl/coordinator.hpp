#pragma once

#include "fasloc/nn/attention.hpp"

namespace fasloc::marl {

/// Attention-based coordinator Φ. Each token is one UAV's normalized
/// (observation, previous action, role) row at one slot of the history window.
/// Tokens are embedded, passed through U attention units, mean-pooled over the
/// window and projected by an MLP to the context vector Ω. Mean pooling makes
/// Ω invariant to the order of tokens.
class Coordinator {
 public:
  struct Cache {
    nn::Matrix tokens;
    nn::Matrix embedded;
    nn::MultiHeadAttention::Cache attention;
    Eigen::Index rows = 0;
    nn::Mlp::Cache out;
  };

  Coordinator() = default;
  Coordinator(int token_width, int embed_width, int heads, int mlp_hidden, int omega_width);

  /// tokens: n×token_width, n ≥ 1. Returns Ω as a 1×omega_width row.
  nn::RowVector forward(const nn::Matrix& tokens, Cache* cache = nullptr) const;
  /// Accumulates parameter gradients; returns dL/dtokens.
  nn::Matrix backward(const Cache& cache, const nn::RowVector& domega);

  void init(Rng& rng);
  void collect(const std::string& prefix, nn::TensorList& out);

  int omega_width() const { return out_.out(); }
  int token_width() const { return embed_.in(); }
  nn::Linear& embedding() { return embed_; }
  nn::MultiHeadAttention& attention() { return attention_; }
  nn::Mlp& projection() { return out_; }

 private:
  nn::Linear embed_;
  nn::MultiHeadAttention attention_;
  nn::Mlp out_;
};

}  // namespace fasloc::marl
