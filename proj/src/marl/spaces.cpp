#include "fasloc/marl/spaces.hpp"

namespace fasloc::marl {

double angle_level(int index, double lo, double hi) {
  if (index < 0 || index >= kAngleLevels) throw ValidationError("angle level out of range");
  return lo + (hi - lo) * index / (kAngleLevels - 1);
}

ActionSpace::ActionSpace(bool passive, int port_count) : passive_(passive), ports_(port_count) {
  if (passive && port_count < 1) throw ValidationError("passive action space needs ports");
}

int ActionSpace::encode(const Action& a) const {
  if (a.yaw < 0 || a.yaw >= kAngleLevels || a.pitch < 0 || a.pitch >= kAngleLevels)
    throw ValidationError("action angle index out of range");
  const int move = a.yaw * kAngleLevels + a.pitch;
  if (!passive_) return move;
  if (a.port < 1 || a.port > ports_) throw ValidationError("action port out of range");
  return move * ports_ + (a.port - 1);
}

Action ActionSpace::decode(int index) const {
  if (index < 0 || index >= size()) throw ValidationError("action index out of range");
  Action a;
  int move = index;
  if (passive_) {
    a.port = index % ports_ + 1;
    move = index / ports_;
  }
  a.yaw = move / kAngleLevels;
  a.pitch = move % kAngleLevels;
  return a;
}

world::ControlAngles ActionSpace::angles(const Action& a, const world::WorldConfig& cfg) const {
  return {angle_level(a.yaw, cfg.yaw_min, cfg.yaw_max),
          angle_level(a.pitch, cfg.pitch_min, cfg.pitch_max)};
}

Observation build_observation(int uav, const world::WorldState& world,
                              const channel::ChannelDraw& draw, double previous_measurement) {
  if (uav < 0 || uav >= world::kControlled) throw ValidationError("UAV index out of range");
  Observation o;
  const Position3& q = world.uavs[uav];
  o.values = {q.x(), q.y(), q.z()};
  if (uav == 0) return o;
  o.passive = true;
  const auto& paths = draw.uavs.at(uav - 1);
  o.values.insert(o.values.end(), paths.aod.begin(), paths.aod.end());
  o.values.push_back(previous_measurement);
  return o;
}

int feature_width(int path_count) { return 3 + path_count + 1 + 3 + 1; }

Eigen::RowVectorXd agent_features(const Observation& obs, const Action& previous, int path_count,
                                  int port_count, const FeatureScaling& s) {
  Eigen::RowVectorXd f = Eigen::RowVectorXd::Zero(feature_width(path_count));
  for (int i = 0; i < 3; ++i) f(i) = (obs.values[i] - s.position_center) / s.position_scale;
  if (obs.passive) {
    for (int i = 0; i < path_count; ++i) f(3 + i) = obs.values[3 + i] / kPi;
    f(3 + path_count) = obs.values[3 + path_count] / s.range_scale;
  }
  const int a0 = 3 + path_count + 1;
  f(a0) = (previous.yaw - 2) / 2.0;
  f(a0 + 1) = (previous.pitch - 2) / 2.0;
  f(a0 + 2) = obs.passive && previous.port > 0 ? static_cast<double>(previous.port) / port_count : 0.0;
  f(a0 + 3) = obs.passive ? 0.0 : 1.0;
  return f;
}

int greedy(std::span<const double> q) {
  if (q.empty()) throw ValidationError("greedy: empty q-vector");
  int best = 0;
  for (int i = 1; i < static_cast<int>(q.size()); ++i)
    if (q[i] > q[best]) best = i;
  return best;
}

int select_action(std::span<const double> q, double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ValidationError("epsilon must lie in [0, 1]");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(q.size()) - 1);
    return pick(rng);
  }
  return greedy(q);
}

std::vector<int> actions_with_port(const ActionSpace& space, int port) {
  std::vector<int> idx;
  idx.reserve(kMoveActions);
  for (int m = 0; m < kMoveActions; ++m) idx.push_back(m * space.ports() + (port - 1));
  return idx;
}

}  // namespace fasloc::marl
