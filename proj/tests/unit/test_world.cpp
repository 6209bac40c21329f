#include <gtest/gtest.h>

#include <cmath>

#include "fasloc/world.hpp"

namespace fasloc::world {
namespace {

std::array<double, kPassive> latencies(double v) { return {v, v, v, v}; }

// Five UAVs and a target, all pairwise ≥ 500 m apart.
WorldState spread_world() {
  WorldState w;
  const double s = 500.0;
  w.uavs = {Position3{0, 0, 100}, Position3{s, 0, 100}, Position3{0, s, 100},
            Position3{0, 0, 100 + s}, Position3{s, s, 100 + s}};
  w.target = Position3{s, 0, 100 + s};
  return w;
}

TEST(StepControlled, PureForwardMotion) {
  WorldConfig cfg;
  cfg.slot_duration = 1.0;
  const Position3 q = step_controlled({0, 0, 100}, {0.0, 0.0}, cfg);
  EXPECT_NEAR((q - Position3{5, 0, 100}).norm(), 0.0, 1e-12);
}

TEST(StepControlled, StraightUpNeedsBoundsDisabled) {
  WorldConfig cfg;
  cfg.slot_duration = 1.0;
  EXPECT_THROW(step_controlled({0, 0, 100}, {0.0, kPi / 2}, cfg), ValidationError);
  cfg.enforce_angle_bounds = false;
  const Position3 q = step_controlled({0, 0, 100}, {0.0, kPi / 2}, cfg);
  EXPECT_NEAR((q - Position3{0, 0, 105}).norm(), 0.0, 1e-12);
}

TEST(StepControlled, ObliqueStepMatchesHandEvaluation) {
  WorldConfig cfg;
  cfg.slot_duration = 1.0;
  const Position3 q = step_controlled({300, 300, 300}, {kPi / 4, kPi / 6}, cfg);
  const double c45 = std::sqrt(0.5), c30 = std::sqrt(3.0) / 2.0;
  const Position3 expected{300 + 5 * c45 * c30, 300 + 5 * c45 * c30, 302.5};
  EXPECT_NEAR((q - expected).norm(), 0.0, 1e-12);
}

TEST(StepControlled, StepLengthIsSpeedTimesSlot) {
  WorldConfig cfg;
  cfg.slot_duration = 2.0;
  Rng rng(5);
  std::uniform_real_distribution<double> yaw(cfg.yaw_min, cfg.yaw_max);
  std::uniform_real_distribution<double> pitch(cfg.pitch_min, cfg.pitch_max);
  for (int i = 0; i < 1000; ++i) {
    const Position3 q{100, 200, 300};
    const double len = (step_controlled(q, {yaw(rng), pitch(rng)}, cfg) - q).norm();
    EXPECT_NEAR(len / (cfg.speed * cfg.slot_duration), 1.0, 1e-12);
  }
}

TEST(StepControlled, RejectsNonFiniteAngles) {
  WorldConfig cfg;
  EXPECT_THROW(step_controlled({0, 0, 0}, {std::nan(""), 0.0}, cfg), ValidationError);
}

TEST(StepTarget, HelixAdvancesBySpeedTimesSlot) {
  WorldConfig cfg;
  cfg.slot_duration = 1.0;
  TargetTrajectorySpec traj;
  traj.mode = TrajectoryMode::UniformCircle;
  traj.speed = 10.0;
  TargetState s;
  s.position = {500, 500, 300};
  Rng rng(1);
  double prev_yaw = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Position3 before = s.position;
    step_target(s, traj, cfg, rng);
    EXPECT_NEAR((s.position - before).norm(), 10.0, 1e-9);
    EXPECT_NEAR(s.position.z() - before.z(), kHelixClimbRate * cfg.slot_duration, 1e-9);
    if (t > 0) EXPECT_GT(std::remainder(s.last_yaw - prev_yaw, 2 * kPi), 0.0);
    prev_yaw = s.last_yaw;
  }
}

TEST(StepTarget, TurnFrequencyMatchesUncertainty) {
  WorldConfig cfg;
  TargetTrajectorySpec traj;
  traj.uncertainty = 0.2;
  TargetState s;
  s.position = {500, 500, 500};
  Rng rng(42);
  int left = 0, right = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    step_target(s, traj, cfg, rng);
    left += s.last_turn == 1;
    right += s.last_turn == -1;
  }
  EXPECT_NEAR(static_cast<double>(left + right) / n, 0.2, 0.01);
  EXPECT_NEAR(static_cast<double>(left) / n, 0.1, 0.01);
}

TEST(StepTarget, SLineHeadingChangesSignPeriodically) {
  WorldConfig cfg;
  cfg.slot_duration = 1.0;
  TargetTrajectorySpec traj;
  traj.mode = TrajectoryMode::SLine;
  traj.speed = 15.0;
  TargetState s;
  s.position = {500, 500, 500};
  Rng rng(1);
  std::vector<double> yaw;
  for (int t = 0; t < 40; ++t) {
    step_target(s, traj, cfg, rng);
    yaw.push_back(s.last_yaw);
  }
  int changes = 0;
  for (std::size_t i = 1; i < yaw.size(); ++i)
    if (yaw[i] != 0.0 && yaw[i - 1] != 0.0 && (yaw[i] > 0) != (yaw[i - 1] > 0)) ++changes;
  // Two sign flips per 10-slot period.
  EXPECT_GE(changes, 6);
  for (int t = 1; t + kSLinePeriod < 40; ++t) EXPECT_NEAR(yaw[t], yaw[t + kSLinePeriod], 1e-12);
}

TEST(StepTarget, CLineKeepsConstantSpeed) {
  WorldConfig cfg;
  cfg.slot_duration = 1.0;
  TargetTrajectorySpec traj;
  traj.speed = 15.0;
  TargetState s;
  s.position = {450, 550, 450};
  Rng rng(3);
  for (int t = 0; t < 25; ++t) {
    const Position3 before = s.position;
    step_target(s, traj, cfg, rng);
    EXPECT_NEAR((s.position - before).norm(), 15.0, 1e-9);
  }
}

TEST(StepTarget, DeterministicForEqualSeeds) {
  WorldConfig cfg;
  TargetTrajectorySpec traj;
  traj.uncertainty = 0.5;
  TargetState a, b;
  Rng ra(9), rb(9);
  for (int t = 0; t < 100; ++t) {
    step_target(a, traj, cfg, ra);
    step_target(b, traj, cfg, rb);
    ASSERT_EQ(a.position, b.position);
  }
}

TEST(Constraints, SpreadGeometryIsFeasible) {
  WorldConfig cfg;
  const auto r = check_constraints(spread_world(), latencies(0.010), cfg, 0.030, 32);
  EXPECT_TRUE(r.feasible);
  EXPECT_EQ(r.violation_count(), 0);
}

TEST(Constraints, CloseUavsViolatePairwiseDistance) {
  WorldConfig cfg;
  WorldState w = spread_world();
  w.uavs[1] = w.uavs[0] + Position3{10, 0, 0};
  const auto r = check_constraints(w, latencies(0.010), cfg, 0.030, 32);
  EXPECT_FALSE(r.pairwise_distance);
  EXPECT_FALSE(r.feasible);
}

TEST(Constraints, LatencyOverThresholdIsTheOnlyViolation) {
  WorldConfig cfg;
  std::array<double, kPassive> lat = latencies(0.010);
  lat[2] = 0.031;
  const auto r = check_constraints(spread_world(), lat, cfg, 0.030, 32);
  EXPECT_FALSE(r.latency);
  EXPECT_TRUE(r.yaw && r.pitch && r.port && r.target_distance && r.pairwise_distance);
  EXPECT_FALSE(r.feasible);
  EXPECT_EQ(r.violation_count(), 1);
}

TEST(Constraints, PortOutOfRange) {
  WorldConfig cfg;
  WorldState w = spread_world();
  w.ports[0] = 33;
  EXPECT_FALSE(check_constraints(w, latencies(0.01), cfg, 0.03, 32).port);
}

TEST(Constraints, RelaxingNeverBreaksFeasibility) {
  WorldConfig cfg;
  Rng rng(17);
  std::uniform_real_distribution<double> coord(0.0, 1200.0), lat(0.0, 0.05);
  for (int i = 0; i < 500; ++i) {
    WorldState w;
    for (auto& u : w.uavs) u = {coord(rng), coord(rng), coord(rng)};
    w.target = {coord(rng), coord(rng), coord(rng)};
    std::array<double, kPassive> l;
    for (double& x : l) x = lat(rng);
    const auto tight = check_constraints(w, l, cfg, 0.03, 32);
    WorldConfig wide = cfg;
    wide.min_separation = 10.0;
    wide.max_separation = 1500.0;
    const auto relaxed = check_constraints(w, l, wide, 0.04, 32);
    if (tight.feasible) EXPECT_TRUE(relaxed.feasible);
  }
}

TEST(WorldConfigValidation, RejectsBadValues) {
  WorldConfig cfg;
  cfg.speed = 0.0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = {};
  cfg.min_separation = 2000.0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  TargetTrajectorySpec traj;
  traj.uncertainty = 1.5;
  EXPECT_THROW(traj.validate(), ValidationError);
}

}  // namespace
}  // namespace fasloc::world
