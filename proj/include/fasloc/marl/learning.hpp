#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "fasloc/marl/config.hpp"
#include "fasloc/marl/parameter_set.hpp"

namespace fasloc::marl {

/// Q^T = R + γ·next, or R alone on the terminal slot (next == nullopt).
double td_target(double reward, std::optional<double> next_global_q, double discount);

/// w = 1 when the TD error Q_G − Q^T is negative, δ otherwise.
double td_weight(double td_error, double delta);

/// Σ_t w_t (Q_G,t − Q^T_t)².
double weighted_loss(std::span<const double> q_global, std::span<const double> q_target,
                     double delta);
/// ∂/∂Q_G,t of weighted_loss (w_t held piecewise constant).
std::vector<double> weighted_loss_grad(std::span<const double> q_global,
                                       std::span<const double> q_target, double delta);

/// On-policy record of one episode (or its prefix). features[t][k] is agent
/// k's normalized input row at slot t; it may run one slot ahead of actions so
/// the bootstrapped target of the last acted slot is available.
struct EpisodeBuffer {
  std::vector<std::array<nn::RowVector, world::kControlled>> features;
  /// Port forced on each passive UAV at slot t (no_fas); 0 when free.
  std::vector<std::array<int, world::kPassive>> forced_port;
  std::vector<std::array<int, world::kControlled>> actions;
  std::vector<double> rewards;  // training-scale rewards
  int horizon = 25;             // T; slot horizon − 1 is terminal

  int acted() const { return static_cast<int>(actions.size()); }
  void clear();
};

/// Window of coordinator tokens ending at slot t: rows are (slot, agent)
/// pairs in chronological order, at most `history` slots.
nn::Matrix window_tokens(const EpisodeBuffer& buf, int t, int history);

struct LossResult {
  double loss = 0;
  std::vector<double> q_global;  // per slot in `slots` order; independent learners: per slot and agent
  std::vector<double> q_target;
  /// Scalars combined across agents while forming the loss; 0 when each agent learns alone.
  std::size_t inter_agent_messages = 0;
};

/// Bootstrapped targets for every acted slot under the (frozen) target set.
/// For independent learners this returns one row per slot and agent.
std::vector<std::array<double, world::kControlled>> td_targets(const ParameterSet& target,
                                                               const EpisodeBuffer& buf,
                                                               const LearningConfig& lc);

/// Weighted TD loss over `slots` of the buffer. With `backward` the live
/// parameter gradients are accumulated (not zeroed first).
LossResult episode_loss(ParameterSet& live, const ParameterSet& target, const EpisodeBuffer& buf,
                        const LearningConfig& lc, std::span<const int> slots, bool backward);

}  // namespace fasloc::marl
