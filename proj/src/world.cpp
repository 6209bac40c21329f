#include "fasloc/world.hpp"

#include <cmath>
#include <string>

namespace fasloc::world {

namespace {

bool within(double value, double lo, double hi) { return value >= lo && value <= hi; }

Position3 direction(double yaw, double pitch) {
  return {std::cos(yaw) * std::cos(pitch), std::sin(yaw) * std::cos(pitch), std::sin(pitch)};
}

Position3 rotate_z(const Position3& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y(), v.z()};
}

// Per-slot angular advance so the chord between consecutive samples has length `step`.
double chord_angle(double step, double radius) {
  return 2.0 * std::asin(std::min(1.0, step / (2.0 * radius)));
}

// Unit direction of the nominal (turn-free) step taken during `slot`.
Position3 nominal_direction(const TargetTrajectorySpec& traj, const WorldConfig& cfg, int slot) {
  const double step = traj.speed * cfg.slot_duration;
  const double psi0 = traj.initial_yaw;
  const double mid = slot + 0.5;
  switch (traj.mode) {
    case TrajectoryMode::CLine: {
      const double omega = chord_angle(step, kCLineRadius);
      const Position3 tangent{std::cos(psi0), std::sin(psi0), 0.0};
      const Position3 normal = std::cos(kCLineTilt) * Position3{-std::sin(psi0), std::cos(psi0), 0.0} +
                               std::sin(kCLineTilt) * Position3::UnitZ();
      const double phase = mid * omega;
      return std::cos(phase) * tangent + std::sin(phase) * normal;
    }
    case TrajectoryMode::UniformCircle: {
      const double climb = std::min(kHelixClimbRate * cfg.slot_duration, step);
      const double horizontal = std::sqrt(std::max(0.0, step * step - climb * climb));
      if (step == 0.0) return Position3::UnitX();
      const double omega = chord_angle(horizontal, kHelixRadius);
      const double yaw = psi0 + mid * omega;
      Position3 d{horizontal * std::cos(yaw), horizontal * std::sin(yaw), climb};
      return d / step;
    }
    case TrajectoryMode::SLine: {
      const double yaw = psi0 + kSLineAmplitude * std::sin(2.0 * kPi * slot / kSLinePeriod);
      return direction(yaw, 0.0);
    }
  }
  throw ValidationError("unknown trajectory mode");
}

}  // namespace

void WorldConfig::validate() const {
  if (!(speed > 0.0)) throw ValidationError("world.speed must be > 0");
  if (!(slot_duration > 0.0)) throw ValidationError("world.slot_duration must be > 0");
  if (!(light_speed > 0.0)) throw ValidationError("world.light_speed must be > 0");
  if (!(min_separation > 0.0 && min_separation < max_separation))
    throw ValidationError("world separation bounds require 0 < min_separation < max_separation");
  if (!(yaw_min <= yaw_max && pitch_min <= pitch_max))
    throw ValidationError("world angle bounds are inverted");
  if (controlled_count != kControlled)
    throw ValidationError("world.controlled_count must be 5 (1 active + 4 passive)");
  if (slots_per_episode < 1) throw ValidationError("world.slots_per_episode must be >= 1");
}

void TargetTrajectorySpec::validate() const {
  if (!(uncertainty >= 0.0 && uncertainty <= 1.0))
    throw ValidationError("target.uncertainty must lie in [0, 1]");
  if (!(speed >= 0.0)) throw ValidationError("target.speed must be >= 0");
}

Position3 step_controlled(const Position3& q, const ControlAngles& angles, const WorldConfig& cfg) {
  if (!std::isfinite(angles.yaw) || !std::isfinite(angles.pitch))
    throw ValidationError("control angles must be finite");
  if (cfg.enforce_angle_bounds) {
    if (!within(angles.yaw, cfg.yaw_min, cfg.yaw_max))
      throw ValidationError("yaw " + std::to_string(angles.yaw) + " rad outside bounds");
    if (!within(angles.pitch, cfg.pitch_min, cfg.pitch_max))
      throw ValidationError("pitch " + std::to_string(angles.pitch) + " rad outside bounds");
  }
  return q + cfg.speed * cfg.slot_duration * direction(angles.yaw, angles.pitch);
}

ControlAngles nominal_heading(const TargetTrajectorySpec& traj, const WorldConfig& cfg, int slot) {
  const Position3 d = nominal_direction(traj, cfg, slot);
  return {std::atan2(d.y(), d.x()), std::asin(std::clamp(d.z(), -1.0, 1.0))};
}

Position3 step_target(TargetState& state, const TargetTrajectorySpec& traj, const WorldConfig& cfg,
                      Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double draw = unit(rng);
  state.last_turn = 0;
  if (draw < 0.5 * traj.uncertainty) {
    state.yaw_offset += 0.5 * kPi;
    state.last_turn = +1;
  } else if (draw < traj.uncertainty) {
    state.yaw_offset -= 0.5 * kPi;
    state.last_turn = -1;
  }
  const Position3 d = rotate_z(nominal_direction(traj, cfg, state.slot), state.yaw_offset);
  state.last_yaw = std::atan2(d.y(), d.x());
  state.position += traj.speed * cfg.slot_duration * d;
  state.position.z() = std::max(0.0, state.position.z());
  ++state.slot;
  return state.position;
}

WorldState WorldState::initial(const WorldConfig& cfg) {
  WorldState w;
  w.uavs = cfg.initial_positions;
  w.target = cfg.target_initial;
  return w;
}

int ConstraintReport::violation_count() const {
  return !latency + !yaw + !pitch + !port + !target_distance + !pairwise_distance;
}

ConstraintReport check_constraints(const WorldState& world, std::span<const double> latencies,
                                   const WorldConfig& cfg, double latency_threshold,
                                   int port_count) {
  if (latencies.size() != static_cast<std::size_t>(kPassive))
    throw ValidationError("check_constraints expects one latency per passive UAV");
  ConstraintReport r;
  for (double l : latencies) r.latency = r.latency && (l <= latency_threshold);
  for (const auto& a : world.last_angles) {
    r.yaw = r.yaw && within(a.yaw, cfg.yaw_min, cfg.yaw_max);
    r.pitch = r.pitch && within(a.pitch, cfg.pitch_min, cfg.pitch_max);
  }
  for (int n : world.ports) r.port = r.port && n >= 1 && n <= port_count;
  for (int k = 0; k < kControlled; ++k) {
    const double d = (world.uavs[k] - world.target).norm();
    r.target_distance = r.target_distance && within(d, cfg.min_separation, cfg.max_separation);
    for (int j = k + 1; j < kControlled; ++j) {
      const double dj = (world.uavs[k] - world.uavs[j]).norm();
      r.pairwise_distance =
          r.pairwise_distance && within(dj, cfg.min_separation, cfg.max_separation);
    }
  }
  r.feasible = r.latency && r.yaw && r.pitch && r.port && r.target_distance && r.pairwise_distance;
  return r;
}

}  // namespace fasloc::world
