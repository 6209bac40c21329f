#pragma once

#include <array>
#include <span>
#include <vector>

#include "fasloc/channel.hpp"
#include "fasloc/world.hpp"

namespace fasloc::marl {

/// Discrete yaw/pitch levels shared by both axes: {−60, −30, 0, 30, 60}°.
inline constexpr int kAngleLevels = 5;
inline constexpr int kMoveActions = kAngleLevels * kAngleLevels;

double angle_level(int index, double lo, double hi);

struct Action {
  int yaw = 2;    // index into the angle levels
  int pitch = 2;  // index into the angle levels
  int port = 0;   // 1..N for passive UAVs, 0 for the active UAV

  bool operator==(const Action&) const = default;
};

/// Flat action indexing: index = (yaw·5 + pitch)·N + (port − 1) for passive
/// UAVs and yaw·5 + pitch for the active UAV.
class ActionSpace {
 public:
  ActionSpace(bool passive, int port_count);

  int size() const { return passive_ ? kMoveActions * ports_ : kMoveActions; }
  bool passive() const { return passive_; }
  int ports() const { return ports_; }

  int encode(const Action& a) const;
  Action decode(int index) const;
  world::ControlAngles angles(const Action& a, const world::WorldConfig& cfg) const;

 private:
  bool passive_;
  int ports_;
};

/// Local state of one controlled UAV: [x, y, z] for the active UAV,
/// [x, y, z, φ¹..φ^I, m̂_{t−1}] for a passive UAV.
struct Observation {
  std::vector<double> values;
  bool passive = false;
};

Observation build_observation(int uav, const world::WorldState& world,
                              const channel::ChannelDraw& draw, double previous_measurement);

/// Fixed feature scaling applied before any network sees an observation.
struct FeatureScaling {
  double position_center = 500.0;
  double position_scale = 500.0;
  double range_scale = 2000.0;
};

/// Width of the normalized per-agent feature row: padded observation
/// (3 + I + 1), previous action (yaw, pitch, port) and an active/passive flag.
int feature_width(int path_count);

/// Normalized [observation, previous action, role] row. Active observations
/// are zero-padded to the passive width.
Eigen::RowVectorXd agent_features(const Observation& obs, const Action& previous, int path_count,
                                  int port_count, const FeatureScaling& scaling = {});

/// argmax with probability 1 − ε, uniform otherwise; ties go to the lowest index.
int select_action(std::span<const double> q, double epsilon, Rng& rng);
int greedy(std::span<const double> q);

/// Indices of the movement actions that use `port` (passive space only).
std::vector<int> actions_with_port(const ActionSpace& space, int port);

}  // namespace fasloc::marl
