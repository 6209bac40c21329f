#pragma once

#include <array>
#include <span>
#include <vector>

#include "fasloc/types.hpp"

namespace fasloc::world {

/// Number of controlled UAVs: index 0 is the active UAV, 1..4 are passive.
inline constexpr int kControlled = 5;
inline constexpr int kPassive = 4;

struct ControlAngles {
  double yaw = 0.0;    // rad
  double pitch = 0.0;  // rad
};

struct WorldConfig {
  double speed = 5.0;          // v, m/s
  double slot_duration = 2.0;  // Δt, s
  double light_speed = 3e8;    // c, m/s
  double min_separation = 20.0;    // L_min, m
  double max_separation = 1000.0;  // L_max, m
  double yaw_min = deg2rad(-60.0);
  double yaw_max = deg2rad(60.0);
  double pitch_min = deg2rad(-60.0);
  double pitch_max = deg2rad(60.0);
  int controlled_count = kControlled;
  int slots_per_episode = 25;
  /// When false, step_controlled accepts any finite angle (unit tests only).
  bool enforce_angle_bounds = true;

  std::array<Position3, kControlled> initial_positions{
      Position3{300, 300, 300}, Position3{237, 890, 744}, Position3{310, 743, 891},
      Position3{832, 497, 328}, Position3{548, 647, 400}};
  Position3 bs_position{0, 0, 20};
  Position3 target_initial{450, 550, 450};

  void validate() const;
};

enum class TrajectoryMode { CLine, UniformCircle, SLine };

struct TargetTrajectorySpec {
  TrajectoryMode mode = TrajectoryMode::CLine;
  double speed = 5.0;        // m/s
  double uncertainty = 0.0;  // total probability of a ±90° yaw turn per slot
  std::uint64_t seed = 7;
  /// Nominal heading at slot 0 (rad).
  double initial_yaw = 0.0;

  void validate() const;
};

// Generator geometry for the three named trajectory shapes.
inline constexpr double kCLineRadius = 400.0;
inline constexpr double kCLineTilt = deg2rad(15.0);
inline constexpr double kHelixRadius = 200.0;
inline constexpr double kHelixClimbRate = 1.0;  // m/s
inline constexpr double kSLineAmplitude = deg2rad(60.0);
inline constexpr int kSLinePeriod = 10;  // slots

struct TargetState {
  Position3 position = Position3::Zero();
  int slot = 0;
  double yaw_offset = 0.0;  // accumulated uncertainty turns
  int last_turn = 0;        // -1 right, +1 left, 0 none (most recent step)
  double last_yaw = 0.0;    // heading used by the most recent step
};

/// Motion step: q' = q + vΔt [cosψcosθ, sinψcosθ, sinθ]ᵀ.
Position3 step_controlled(const Position3& q, const ControlAngles& angles,
                          const WorldConfig& cfg);

/// Advances the target by one slot along its nominal trajectory, with
/// uncertainty/2 probability each of a +90° or -90° yaw turn beforehand.
Position3 step_target(TargetState& state, const TargetTrajectorySpec& traj,
                      const WorldConfig& cfg, Rng& rng);

/// Nominal (turn-free) heading of the trajectory during slot `slot`.
ControlAngles nominal_heading(const TargetTrajectorySpec& traj, const WorldConfig& cfg,
                              int slot);

struct WorldState {
  std::array<Position3, kControlled> uavs;
  Position3 target = Position3::Zero();
  int slot = 0;
  /// Angles and ports applied in the most recent step.
  std::array<ControlAngles, kControlled> last_angles{};
  std::array<int, kPassive> ports{1, 1, 1, 1};

  static WorldState initial(const WorldConfig& cfg);
};

struct ConstraintReport {
  bool latency = true;        
  bool yaw = true;            
  bool pitch = true;          
  bool port = true;           
  bool target_distance = true;
  bool pairwise_distance = true;
  bool feasible = true;

  int violation_count() const;
};

ConstraintReport check_constraints(const WorldState& world, std::span<const double> latencies,
                                   const WorldConfig& cfg, double latency_threshold,
                                   int port_count);

}  // namespace fasloc::world
