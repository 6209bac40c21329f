#pragma once

#include <array>
#include <vector>

#include "fasloc/channel.hpp"
#include "fasloc/marl/spaces.hpp"
#include "fasloc/positioning.hpp"
#include "fasloc/world.hpp"

namespace fasloc::marl {

struct EnvironmentConfig {
  world::WorldConfig world;
  world::TargetTrajectorySpec target;
  channel::ChannelParams channel;
  double variance_scale = 1.0;      // κ_scale: σ² = κ_scale / γ^P
  double latency_threshold = 0.03;  // ζ, s
  positioning::SolverOptions solver;
  /// Measurements that must reach the BS before it re-solves; with fewer the
  /// previous estimate is kept.
  int min_measurements = 3;
  /// Seed of the static multipath realization (Coherence::Static only).
  std::uint64_t channel_seed = 2024;

  void validate() const;
};

struct StepResult {
  double reward = 0;
  double error = 0;  // ‖û − u‖ after the slot
  world::ConstraintReport report;
  positioning::PositionEstimate estimate;
  std::array<double, world::kPassive> latency{};
  std::array<double, world::kPassive> sinr{};
  int delivered = 0;
  bool terminal = false;
};

/// One scenario: five controlled UAVs, a moving target and the BS. The
/// channel for slot t is drawn before the agents act, so the AoDs in the
/// slot-t observation are those of the uplink the chosen port is applied to.
class Environment {
 public:
  explicit Environment(EnvironmentConfig cfg);

  /// Starts an episode; all randomness for the episode comes from `rng`.
  void reset(Rng& rng);
  const std::array<Observation, world::kControlled>& observations() const { return obs_; }
  StepResult step(const std::array<Action, world::kControlled>& actions, Rng& rng);

  const world::WorldState& state() const { return world_; }
  const channel::ChannelDraw& channel_draw() const { return draw_; }
  const EnvironmentConfig& config() const { return cfg_; }
  const Position3& estimate() const { return estimate_; }
  int slot() const { return world_.slot; }
  bool done() const { return world_.slot >= cfg_.world.slots_per_episode; }

 private:
  void draw_slot_channel(Rng& rng);
  void refresh_observations();

  EnvironmentConfig cfg_;
  world::WorldState world_;
  world::TargetState target_;
  channel::ChannelDraw static_draw_;
  channel::ChannelDraw draw_;
  std::array<double, world::kPassive> last_measurement_{};
  Position3 estimate_ = Position3::Zero();
  std::array<Observation, world::kControlled> obs_;
};

/// The shared reward: −‖û − u‖ when every constraint holds, −10⁶ otherwise.
inline constexpr double kInfeasiblePenalty = -1e6;
double shared_reward(const Position3& estimate, const Position3& truth,
                     const world::ConstraintReport& report);

}  // namespace fasloc::marl
