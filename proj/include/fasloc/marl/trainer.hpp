#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fasloc/marl/environment.hpp"
#include "fasloc/marl/learning.hpp"

namespace fasloc::marl {

struct RunSettings {
  Scheme scheme = Scheme::ArMarl;
  int epochs = 186;
  int episodes_per_epoch = 12;
  std::uint64_t seed = 1;
  bool record_trajectories = false;

  void validate() const;
};

struct TrainerConfig {
  EnvironmentConfig env;
  NetworkConfig network;
  LearningConfig learning;
  RunSettings run;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double mean_error = 0;     // slot-mean ‖û − u‖ over the epoch, m
  double mean_reward = 0;    // slot-mean shared reward (untransformed)
  double loss = 0;           // mean weighted TD loss of the epoch's updates
  int violations = 0;        // infeasible slots in the epoch
  double epsilon = 0;
  double feasible_rate = 0;
};

/// Positions of every controlled UAV, the target and the estimate, per slot.
struct TrajectoryRecord {
  int epoch = 0;
  std::vector<std::array<Position3, world::kControlled>> uavs;
  std::vector<Position3> target;
  std::vector<Position3> estimate;
};

struct TrainingLog {
  Scheme scheme = Scheme::ArMarl;
  std::uint64_t seed = 0;
  std::vector<EpochRecord> epochs;
  std::vector<TrajectoryRecord> trajectories;
  std::size_t updates = 0;
  std::size_t inter_agent_messages = 0;

  /// Mean of mean_error over the last `n` epochs (all epochs if fewer).
  double tail_error(int n) const;
  /// Exact text form (doubles in hexfloat); equal logs give equal strings.
  std::string serialize() const;
};

struct EpisodeStats {
  double mean_error = 0;
  double mean_reward = 0;
  int violations = 0;
  int slots = 0;
  double loss = 0;
  int updates = 0;
};

struct EvalSummary {
  int episodes = 0;
  double mean_error = 0;
  double std_error = 0;  // across episodes
  double violation_rate = 0;  // infeasible slots / slots
  double mean_reward = 0;
};

class Trainer {
 public:
  explicit Trainer(TrainerConfig cfg);

  /// Runs the configured number of epochs from the current parameters.
  TrainingLog train();

  /// Greedy (ε = 0) rollouts with fresh episode streams derived from `seed`.
  EvalSummary evaluate(int episodes, std::uint64_t seed);

  /// Linear ε schedule for a given epoch.
  double epsilon_at(int epoch) const;

  ParameterSet& live() { return *live_; }
  ParameterSet& target() { return *target_; }
  const TrainerConfig& config() const { return cfg_; }
  Environment& environment() { return env_; }

  /// Called after every training epoch (progress reporting).
  std::function<void(const EpochRecord&)> on_epoch;

 private:
  EpisodeStats run_episode(double epsilon, bool learn, Rng& env_rng, Rng& act_rng,
                           TrajectoryRecord* traj);
  std::array<Action, world::kControlled> act(const std::array<nn::RowVector, world::kControlled>& f,
                                             const std::array<int, world::kPassive>& forced,
                                             std::array<nn::RowVector, world::kControlled>& h,
                                             double epsilon, Rng& rng) const;
  double update(Rng& rng);

  TrainerConfig cfg_;
  Environment env_;
  std::unique_ptr<ParameterSet> live_, target_;
  std::unique_ptr<nn::Optimizer> optimizer_;
  EpisodeBuffer buffer_;
  std::size_t updates_ = 0;
  std::size_t messages_ = 0;
};

/// Convenience wrapper: builds a trainer for `kind` and trains it.
TrainingLog run_baseline(Scheme kind, TrainerConfig cfg);

}  // namespace fasloc::marl
