#pragma once

#include <array>
#include <span>

#include "fasloc/channel.hpp"
#include "fasloc/types.hpp"

namespace fasloc::analysis {

/// Linearization of the four range sums around the target position:
/// dm̂ = W du, one row per passive UAV in order 1..4.
struct GeometryMatrix {
  Eigen::Matrix<double, 4, 3> W;
  double conditioning = 0;  // smallest singular value of W
};

enum class ErrorGradientMode {
  Zero,          // ∂e/∂u dropped (zero-mean error)
  Proportional,  // e = κ_e σ with σ = 1/√γ^P and d0 held fixed
};

struct ErrorModel {
  double active_power = 10.0;   // p0
  double noise_std = 1e-6;      // ρ (square root of the noise power)
  double path_loss_1m = 1e-3;   // α0
  double reflection = 0.5;      // β
  double error_constant = 0.0;  // κ_e

  static ErrorModel from_channel(const channel::ChannelParams& params, double error_constant);
  /// 1 + κ_e ρ / (α0 β √p0)
  double gradient_scale() const;
};

struct ErrorBudget {
  double xi = 0;      // linearized error
  double xi_min = 0;  // closed-form minimum
  double variance = 0;
};

GeometryMatrix build_W(const Position3& target, const Position3& active,
                       std::span<const Position3, 4> passives, ErrorGradientMode mode,
                       const ErrorModel& model = {});

/// ξ = √(σ² Tr((WᵀW)⁻¹)).
double theorem1_error(const Eigen::Matrix<double, 4, 3>& W, double variance);

/// ξ_min = 3 d0 L_min ρ / (2 (α0 β √p0 + κ_e ρ)).
double prop1_min_error(double active_distance, double min_separation, const ErrorModel& model);

/// Measurement variance 1/γ^P at range product d0·dk.
double inverse_snr_variance(double active_distance, double passive_distance,
                            const ErrorModel& model);

/// RMS of du = (WᵀW)⁻¹Wᵀe with e_k ~ N(0, σ²) i.i.d.
double monte_carlo_error(const Eigen::Matrix<double, 4, 3>& W, double variance, int samples,
                         Rng& rng);

ErrorBudget error_budget(const Position3& target, const Position3& active,
                         std::span<const Position3, 4> passives, double min_separation,
                         const ErrorModel& model);

}  // namespace fasloc::analysis
