#pragma once

#include <optional>
#include <span>

#include "fasloc/types.hpp"

namespace fasloc::positioning {

/// One passive UAV's bistatic range-sum observation.
struct RangeMeasurement {
  int uav = 0;           // passive index 1..4
  double true_sum = 0;   // m = d0 + dk
  double variance = 0;   // σ², m²
  double measured = 0;   // m̂
  double delay = 0;      // τ = m / c
};

struct RangeSum {
  double meters = 0;
  double delay = 0;
};

/// m = ‖q0 − u‖ + ‖u − qk‖, τ = m / c.
RangeSum true_range_sum(const Position3& active, const Position3& passive, const Position3& target,
                        double light_speed = 3e8);

/// Draws m̂ = m + e with e ~ N(0, κ/γ^P). Returns nullopt when γ^P == 0 (no echo).
std::optional<RangeMeasurement> sample_range(const RangeSum& range, double snr,
                                             double variance_scale, Rng& rng, int uav = 0);

/// A measurement paired with the receiving passive UAV's position.
struct Observation {
  Position3 receiver;
  double measured = 0;
};

struct PositionEstimate {
  Position3 position = Position3::Zero();
  double residual_norm = 0;
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;
};

struct SolverOptions {
  int max_iterations = 100;
  double step_tolerance = 1e-9;  // m
  double initial_damping = 1e-3;
};

/// Levenberg–Marquardt fit of û = argmin Σ (m̂_k − ‖q0−u‖ − ‖u−qk‖)² started at `prior`.
PositionEstimate estimate_position(std::span<const Observation> observations,
                                   const Position3& active, const Position3& prior,
                                   const SolverOptions& options = {});

/// Euclidean distance ‖û − u‖ (the per-slot objective term).
double positioning_error(const Position3& estimate, const Position3& truth);

}  // namespace fasloc::positioning
