#include "fasloc/positioning.hpp"

#include <cmath>
#include <limits>

namespace fasloc::positioning {

RangeSum true_range_sum(const Position3& active, const Position3& passive, const Position3& target,
                        double light_speed) {
  const double d0 = (active - target).norm();
  const double dk = (target - passive).norm();
  if (d0 == 0.0 || dk == 0.0) throw DomainError("true_range_sum: coincident points");
  const double m = d0 + dk;
  return {m, m / light_speed};
}

std::optional<RangeMeasurement> sample_range(const RangeSum& range, double snr,
                                             double variance_scale, Rng& rng, int uav) {
  if (!(snr > 0.0)) return std::nullopt;
  RangeMeasurement r;
  r.uav = uav;
  r.true_sum = range.meters;
  r.delay = range.delay;
  r.variance = variance_scale / snr;
  r.measured = range.meters;
  if (r.variance > 0.0) {
    std::normal_distribution<double> noise(0.0, std::sqrt(r.variance));
    r.measured += noise(rng);
  }
  return r;
}

namespace {

struct Linearization {
  Eigen::VectorXd residual;
  Eigen::MatrixXd jacobian;
};

Linearization linearize(std::span<const Observation> obs, const Position3& active,
                        const Position3& u) {
  Linearization lin{Eigen::VectorXd(obs.size()), Eigen::MatrixXd(obs.size(), 3)};
  const Position3 to_active = u - active;
  const double d0 = std::max(to_active.norm(), 1e-12);
  for (std::size_t k = 0; k < obs.size(); ++k) {
    const Position3 to_rx = u - obs[k].receiver;
    const double dk = std::max(to_rx.norm(), 1e-12);
    lin.residual(k) = obs[k].measured - (d0 + dk);
    lin.jacobian.row(k) = -(to_active / d0 + to_rx / dk).transpose();
  }
  return lin;
}

}  // namespace

PositionEstimate estimate_position(std::span<const Observation> observations,
                                   const Position3& active, const Position3& prior,
                                   const SolverOptions& options) {
  if (observations.empty()) throw ValidationError("estimate_position: no measurements");
  PositionEstimate est;
  Position3 u = prior;
  double lambda = options.initial_damping;
  auto lin = linearize(observations, active, u);
  double cost = lin.residual.squaredNorm();

  for (int it = 0; it < options.max_iterations; ++it) {
    est.iterations = it + 1;
    const Eigen::Matrix3d jtj = lin.jacobian.transpose() * lin.jacobian;
    const Eigen::Vector3d jtr = lin.jacobian.transpose() * lin.residual;
    Eigen::Matrix3d damped = jtj;
    damped.diagonal() += lambda * (jtj.diagonal().array() + 1e-12).matrix();
    const Eigen::Vector3d step = damped.ldlt().solve(-jtr);
    if (!step.allFinite()) break;
    if (step.norm() < options.step_tolerance) {
      est.converged = true;
      break;
    }
    const Position3 candidate = u + step;
    auto cand_lin = linearize(observations, active, candidate);
    const double cand_cost = cand_lin.residual.squaredNorm();
    if (cand_cost <= cost) {
      u = candidate;
      lin = std::move(cand_lin);
      cost = cand_cost;
      lambda = std::max(lambda * 0.3, 1e-12);
    } else {
      lambda = std::min(lambda * 10.0, 1e12);
    }
  }

  est.position = u;
  est.residual_norm = std::sqrt(cost);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(lin.jacobian);
  const auto& sv = svd.singularValues();
  est.degenerate = sv.size() < 3 || sv(sv.size() - 1) <= 1e-9 * std::max(sv(0), 1e-300);
  return est;
}

double positioning_error(const Position3& estimate, const Position3& truth) {
  const Position3 d = estimate - truth;
  return std::sqrt(d.dot(d));
}

}  // namespace fasloc::positioning
