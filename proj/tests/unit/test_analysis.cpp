#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include "fasloc/analysis.hpp"
#include "fasloc/cli/oracle.hpp"

namespace fasloc::analysis {
namespace {

using Mat43 = Eigen::Matrix<double, 4, 3>;

Mat43 random_W(Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat43 W;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) W(i, j) = g(rng);
  return W;
}

TEST(BuildW, ZeroModeRowsAreDirectionSums) {
  const Position3 u{0, 0, 0};
  const Position3 q0{0, 0, 1000};
  const std::array<Position3, 4> rx{Position3{100, 0, 0}, Position3{0, 100, 0},
                                    Position3{-100, 0, 0}, Position3{0, -100, 0}};
  const auto g = build_W(u, q0, rx, ErrorGradientMode::Zero);
  for (int k = 0; k < 4; ++k) {
    const Eigen::Vector3d expected = (u - rx[k]) / 100.0 + (u - q0) / 1000.0;
    EXPECT_NEAR((g.W.row(k).transpose() - expected).norm(), 0.0, 1e-15);
    EXPECT_LE(g.W.row(k).norm(), 2.0);
  }
}

TEST(BuildW, ProportionalModeScalesReceiverTerms) {
  ErrorModel m;
  m.error_constant = 2.5;
  const Position3 u{10, 20, 30};
  const Position3 q0{10, 20, 530};
  Rng rng(3);
  const auto rx = cli::regular_tetrahedron(u, 50.0, rng);
  const auto zero = build_W(u, q0, rx, ErrorGradientMode::Zero);
  const auto prop = build_W(u, q0, rx, ErrorGradientMode::Proportional, m);
  const double scale = 1.0 + 2.5 * 1e-6 / (1e-3 * 0.5 * std::sqrt(10.0));
  EXPECT_DOUBLE_EQ(m.gradient_scale(), scale);
  for (int k = 0; k < 4; ++k) {
    // Zero mode minus the active-UAV term leaves the receiver direction.
    const Eigen::Vector3d rx_term =
        zero.W.row(k).transpose() - (u - q0) / (u - q0).norm();
    EXPECT_NEAR((prop.W.row(k).transpose() - scale * rx_term).norm(), 0.0, 1e-14);
  }
}

TEST(BuildW, CollinearGeometryLosesRank) {
  const Position3 u{0, 0, 100};
  const std::array<Position3, 4> rx{Position3{0, 0, 200}, Position3{0, 0, 300},
                                    Position3{0, 0, 400}, Position3{0, 0, 500}};
  const auto g = build_W(u, {0, 0, 0}, rx, ErrorGradientMode::Zero);
  EXPECT_LT(g.conditioning, 1e-12);
  EXPECT_THROW(theorem1_error(g.W, 1.0), DomainError);
}

TEST(BuildW, GenericGeometryHasFullRank) {
  Rng rng(2);
  const auto rx = cli::regular_tetrahedron({0, 0, 0}, 100.0, rng);
  const auto g = build_W({0, 0, 0}, {300, 200, 100}, rx, ErrorGradientMode::Zero);
  EXPECT_GT(g.conditioning, 0.1);
}

TEST(TraceError, IsotropicCase) {
  const double s = 3.0, var = 2.0;
  Mat43 W = Mat43::Zero();
  W.topRows<3>() = s * Eigen::Matrix3d::Identity();
  EXPECT_NEAR(theorem1_error(W, var), std::sqrt(3 * var) / s, 1e-14);
}

TEST(TraceError, SpectralOracle) {
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const Mat43 W = random_W(rng);
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(W.transpose() * W);
    const double expected = es.eigenvalues().cwiseInverse().sum();
    EXPECT_NEAR(theorem1_error(W, 1.0) * theorem1_error(W, 1.0) / expected, 1.0, 1e-10);
  }
}

TEST(TraceError, QuadruplingVarianceDoublesError) {
  Rng rng(5);
  const Mat43 W = random_W(rng);
  EXPECT_NEAR(theorem1_error(W, 4.0 * 0.7) / theorem1_error(W, 0.7), 2.0, 1e-12);
}

TEST(TraceError, RotationInvariant) {
  Rng rng(6);
  std::normal_distribution<double> g(0.0, 1.0);
  const Position3 u{100, 200, 300};
  const Position3 q0{400, -100, 800};
  std::array<Position3, 4> rx{Position3{0, 0, 0}, Position3{500, 100, 200},
                              Position3{-200, 600, 100}, Position3{300, 300, 900}};
  const double base = theorem1_error(build_W(u, q0, rx, ErrorGradientMode::Zero).W, 1.0);
  for (int i = 0; i < 10; ++i) {
    const Eigen::Quaterniond q = Eigen::Quaterniond(g(rng), g(rng), g(rng), g(rng)).normalized();
    std::array<Position3, 4> r2;
    for (int k = 0; k < 4; ++k) r2[k] = q * rx[k];
    const double rot = theorem1_error(build_W(q * u, q * q0, r2, ErrorGradientMode::Zero).W, 1.0);
    EXPECT_NEAR(rot / base, 1.0, 1e-12);
  }
}

TEST(MinimumError, LargerPowerGivesSmallerMinimum) {
  ErrorModel m;
  double prev = std::numeric_limits<double>::infinity();
  for (double p0 : {0.5, 1.0, 5.0, 10.0, 50.0, 100.0}) {
    m.active_power = p0;
    const double v = prop1_min_error(300.0, 20.0, m);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(MinimumError, ConstantFreeLimit) {
  ErrorModel m;
  const double expected = 3 * 400.0 * 20.0 * 1e-6 / (2 * 1e-3 * 0.5 * std::sqrt(10.0));
  EXPECT_NEAR(prop1_min_error(400.0, 20.0, m), expected, 1e-15);
}

TEST(MinimumError, SymmetricGeometryAttainsTheMinimum) {
  for (double kappa : {0.0, 1.0, 100.0}) {
    ErrorModel m;
    m.error_constant = kappa;
    Rng rng(7);
    const Position3 u{500, 500, 300};
    const Position3 q0{900, 500, 300};
    const auto rx = cli::regular_tetrahedron(u, 20.0, rng);
    const auto b = error_budget(u, q0, rx, 20.0, m);
    EXPECT_NEAR(b.xi / b.xi_min, 1.0, 1e-9);
  }
}

TEST(MinimumError, MinimumBoundsTraceFormula) {
  ErrorModel m;
  m.error_constant = 3.0;
  Rng rng(8);
  std::uniform_real_distribution<double> c(0.0, 1000.0);
  int tested = 0;
  while (tested < 200) {
    const Position3 u{c(rng), c(rng), c(rng)};
    const Position3 q0{c(rng), c(rng), c(rng)};
    std::array<Position3, 4> rx;
    for (auto& q : rx) q = {c(rng), c(rng), c(rng)};
    bool far = (q0 - u).norm() >= 20.0;
    for (const auto& q : rx) far = far && (q - u).norm() >= 20.0;
    const auto g = build_W(u, q0, rx, ErrorGradientMode::Proportional, m);
    if (!far || g.conditioning < 1e-3) continue;
    // Every receiver at d_k ≥ L_min, variance at the mean receiver distance.
    const auto b = error_budget(u, q0, rx, 20.0, m);
    EXPECT_LE(b.xi_min, b.xi * (1 + 1e-12));
    ++tested;
  }
}

TEST(MonteCarlo, ZeroVarianceIsZero) {
  Rng rng(9);
  EXPECT_EQ(monte_carlo_error(random_W(rng), 0.0, 1000, rng), 0.0);
}

TEST(MonteCarlo, ConvergesToTraceFormula) {
  Rng rng(10);
  const Mat43 W = random_W(rng);
  const double xi = theorem1_error(W, 2.0);
  double gap_prev = std::numeric_limits<double>::infinity();
  for (int samples : {1000, 10000, 100000}) {
    double gap = 0.0;
    for (int rep = 0; rep < 8; ++rep) {
      Rng mc(mix_seed(samples, rep));
      gap += std::abs(monte_carlo_error(W, 2.0, samples, mc) - xi) / xi / 8.0;
    }
    EXPECT_LT(gap, gap_prev);
    gap_prev = gap;
  }
  EXPECT_LT(gap_prev, 0.02);
}

TEST(MonteCarlo, SymmetricGeometryWithinOnePercent) {
  Rng rng(11);
  const Position3 u{0, 0, 0};
  const auto rx = cli::regular_tetrahedron(u, 100.0, rng);
  const auto W = build_W(u, {0, 0, 500}, rx, ErrorGradientMode::Zero).W;
  Rng mc(12);
  EXPECT_NEAR(monte_carlo_error(W, 1.0, 100000, mc) / theorem1_error(W, 1.0), 1.0, 0.01);
}

TEST(MonteCarlo, RejectsTooFewSamples) {
  Rng rng(1);
  EXPECT_THROW(monte_carlo_error(random_W(rng), 1.0, 0, rng), ValidationError);
}

TEST(Oracles, AllPassAtDefaults) {
  for (const auto& r : cli::run_oracles(channel::ChannelParams{}, 0.0, 1)) EXPECT_TRUE(r.pass) << r.name;
}

}  // namespace
}  // namespace fasloc::analysis
