#include "fasloc/marl/coordinator.hpp"

namespace fasloc::marl {

Coordinator::Coordinator(int token_width, int embed_width, int heads, int mlp_hidden,
                         int omega_width)
    : embed_(token_width, embed_width),
      attention_(embed_width, heads, embed_width / heads),
      out_({(embed_width / heads) * heads, mlp_hidden, omega_width}) {
  if (heads < 1 || embed_width % heads != 0)
    throw ValidationError("embedding width must be a multiple of the head count");
}

nn::RowVector Coordinator::forward(const nn::Matrix& tokens, Cache* cache) const {
  if (tokens.rows() == 0) throw ValidationError("coordinator: empty history window");
  if (tokens.cols() != token_width()) throw ValidationError("coordinator: token width mismatch");
  const nn::Matrix e = embed_.forward(tokens);
  const nn::Matrix a = attention_.forward(e, cache ? &cache->attention : nullptr);
  const nn::RowVector pooled = a.colwise().mean();
  if (cache) {
    cache->tokens = tokens;
    cache->embedded = e;
    cache->rows = tokens.rows();
  }
  return out_.forward(pooled, cache ? &cache->out : nullptr).row(0);
}

nn::Matrix Coordinator::backward(const Cache& cache, const nn::RowVector& domega) {
  const nn::RowVector dpooled = out_.backward(cache.out, domega).row(0);
  const nn::Matrix da = dpooled.replicate(cache.rows, 1) / static_cast<double>(cache.rows);
  const nn::Matrix de = attention_.backward(cache.attention, da);
  return embed_.backward(cache.tokens, de);
}

void Coordinator::init(Rng& rng) {
  embed_.init(rng);
  attention_.init(rng);
  out_.init(rng);
  // Ω starts at zero so early mixing does not depend on an untrained context.
  auto& last = out_.layers().back();
  last.weight.value.setZero();
  last.bias.value.setZero();
}

void Coordinator::collect(const std::string& prefix, nn::TensorList& out) {
  embed_.collect(prefix + ".embed", out);
  attention_.collect(prefix + ".attn", out);
  out_.collect(prefix + ".mlp", out);
}

}  // namespace fasloc::marl
