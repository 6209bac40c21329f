#include "fasloc/analysis.hpp"

#include <cmath>

namespace fasloc::analysis {

ErrorModel ErrorModel::from_channel(const channel::ChannelParams& params, double error_constant) {
  ErrorModel m;
  m.active_power = params.active_power;
  m.noise_std = std::sqrt(params.noise_power);
  m.path_loss_1m = params.path_loss_1m;
  m.reflection = params.reflection;
  m.error_constant = error_constant;
  return m;
}

double ErrorModel::gradient_scale() const {
  return 1.0 + error_constant * noise_std / (path_loss_1m * reflection * std::sqrt(active_power));
}

GeometryMatrix build_W(const Position3& target, const Position3& active,
                       std::span<const Position3, 4> passives, ErrorGradientMode mode,
                       const ErrorModel& model) {
  const Position3 from_active = target - active;
  const double d0 = from_active.norm();
  if (d0 == 0.0) throw DomainError("build_W: target coincides with the active UAV");
  GeometryMatrix g;
  for (int k = 0; k < 4; ++k) {
    const Position3 from_rx = target - passives[k];
    const double dk = from_rx.norm();
    if (dk == 0.0) throw DomainError("build_W: target coincides with a passive UAV");
    if (mode == ErrorGradientMode::Zero) {
      g.W.row(k) = (from_rx / dk + from_active / d0).transpose();
    } else {
      g.W.row(k) = (model.gradient_scale() * from_rx / dk).transpose();
    }
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(g.W));
  g.conditioning = svd.singularValues().minCoeff();
  return g;
}

double theorem1_error(const Eigen::Matrix<double, 4, 3>& W, double variance) {
  const Eigen::Matrix3d wtw = W.transpose() * W;
  Eigen::FullPivLU<Eigen::Matrix3d> lu(wtw);
  if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-14 * std::pow(wtw.norm(), 3))
    throw DomainError("theorem1_error: WᵀW is singular (degenerate geometry)");
  return std::sqrt(variance * lu.inverse().trace());
}

double prop1_min_error(double active_distance, double min_separation, const ErrorModel& model) {
  const double denom =
      2.0 * (model.path_loss_1m * model.reflection * std::sqrt(model.active_power) +
             model.error_constant * model.noise_std);
  return 3.0 * active_distance * min_separation * model.noise_std / denom;
}

double inverse_snr_variance(double active_distance, double passive_distance,
                            const ErrorModel& model) {
  const double gain = model.path_loss_1m * model.reflection;
  const double prod = active_distance * passive_distance;
  return model.noise_std * model.noise_std * prod * prod /
         (model.active_power * gain * gain);
}

double monte_carlo_error(const Eigen::Matrix<double, 4, 3>& W, double variance, int samples,
                         Rng& rng) {
  if (samples < 1) throw ValidationError("monte_carlo_error: samples must be >= 1");
  const Eigen::Matrix3d wtw = W.transpose() * W;
  Eigen::FullPivLU<Eigen::Matrix3d> lu(wtw);
  if (!lu.isInvertible()) throw DomainError("monte_carlo_error: singular geometry");
  if (variance == 0.0) return 0.0;
  const Eigen::Matrix<double, 3, 4> pinv = lu.inverse() * W.transpose();
  std::normal_distribution<double> noise(0.0, std::sqrt(variance));
  double acc = 0.0;
  Eigen::Vector4d e;
  for (int s = 0; s < samples; ++s) {
    for (int k = 0; k < 4; ++k) e(k) = noise(rng);
    acc += (pinv * e).squaredNorm();
  }
  return std::sqrt(acc / samples);
}

ErrorBudget error_budget(const Position3& target, const Position3& active,
                         std::span<const Position3, 4> passives, double min_separation,
                         const ErrorModel& model) {
  const double d0 = (target - active).norm();
  double dk = 0.0;
  for (const auto& p : passives) dk += (target - p).norm() / 4.0;
  ErrorBudget b;
  b.variance = inverse_snr_variance(d0, dk, model);
  const auto g = build_W(target, active, passives, ErrorGradientMode::Proportional, model);
  b.xi = theorem1_error(g.W, b.variance);
  b.xi_min = prop1_min_error(d0, min_separation, model);
  return b;
}

}  // namespace fasloc::analysis
