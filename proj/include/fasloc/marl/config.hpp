#pragma once

#include <string>
#include <string_view>

#include "fasloc/nn/tensor.hpp"

namespace fasloc::marl {

enum class Scheme { ArMarl, VdMarl, IndependentQ, NoFas, NoRnn, NoTransformer, Random };

std::string_view scheme_name(Scheme s);
/// Throws ValidationError on an unknown name.
Scheme parse_scheme(std::string_view name);

/// Network architecture. Sizes are not fixed by the model description; these
/// defaults keep a 200-epoch run within a minute on one core.
struct NetworkConfig {
  int gru_hidden = 64;     // V_G
  int attention_heads = 4;  // U
  int embed_width = 32;
  int history_slots = 8;   // T_H
  int omega_width = 32;
  int coordinator_hidden = 64;
  int mixer_hidden = 8;
  bool monotone_mixing = true;

  void validate() const;
};

struct LearningConfig {
  double discount = 0.95;     // γ of the bootstrapped target
  int target_sync = 50;       // C, updates between target copies
  double delta = 0.5;         // weight of positive TD errors
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_anneal_fraction = 0.5;  // share of epochs spent annealing
  int batch_slots = 32;       // B_G, slots per gradient step
  int update_every = 0;       // slots between updates; 0 = once per episode
  double reward_scale = 0.01;
  double penalty_cap = 200.0;  // training rewards are clipped below at −cap
  nn::OptimizerConfig optimizer{nn::OptimizerKind::Adam, 1e-3, 10.0};

  void validate() const;
};

}  // namespace fasloc::marl
