#include <gtest/gtest.h>

#include <cmath>

#include "fasloc/channel.hpp"

namespace fasloc::channel {
namespace {

TEST(BistaticSnr, ZeroReflectionGivesZero) {
  ChannelParams p;
  p.reflection = 0.0;
  EXPECT_EQ(bistatic_snr({0, 0, 0}, {100, 0, 0}, {50, 50, 50}, p), 0.0);
}

TEST(BistaticSnr, InverseSquareInActiveDistance) {
  ChannelParams p;
  const Position3 u{0, 0, 0};
  const double near = bistatic_snr({100, 0, 0}, {0, 300, 0}, u, p);
  const double far = bistatic_snr({200, 0, 0}, {0, 300, 0}, u, p);
  EXPECT_NEAR(near / far, 4.0, 1e-12);
}

TEST(BistaticSnr, MatchesDirectFormula) {
  ChannelParams p;  // p0 = 10 W, α0 = 1e-3, β = 0.5, ρ² = 1e-12
  const Position3 u{0, 0, 0};
  const double expected = 10.0 * 1e-6 * 0.25 / (1e-12 * 500.0 * 500.0 * 500.0 * 500.0);
  EXPECT_NEAR(bistatic_snr({500, 0, 0}, {0, 0, 500}, u, p) / expected, 1.0, 1e-12);
}

TEST(BistaticSnr, CoincidentPointsThrow) {
  ChannelParams p;
  EXPECT_THROW(bistatic_snr({1, 2, 3}, {4, 5, 6}, {1, 2, 3}, p), DomainError);
}

TEST(BistaticSnr, StrictlyDecreasingAlongRays) {
  ChannelParams p;
  Rng rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Position3 u{g(rng), g(rng), g(rng)};
    const Position3 dir0 = Position3{g(rng), g(rng), g(rng)}.normalized();
    const Position3 dirk = Position3{g(rng), g(rng), g(rng)}.normalized();
    double prev = std::numeric_limits<double>::infinity();
    for (double r = 10.0; r < 1000.0; r *= 1.5) {
      const double s = bistatic_snr(u + r * dir0, u + 100.0 * dirk, u, p);
      EXPECT_LT(s, prev);
      prev = s;
    }
  }
}

TEST(PathLoss, ReferenceDistanceIsFreeSpaceTerm) {
  ChannelParams p;
  p.path_loss_exponent = 2.0;
  const double expected = 20.0 * std::log10(2e9 * 4.0 * kPi / 3e8);
  EXPECT_NEAR(path_loss_db(1.0, 0.0, p), expected, 1e-12);
}

TEST(PathLoss, DecadeStepAddsTenMu) {
  ChannelParams p;
  EXPECT_NEAR(path_loss_db(500.0, 0.0, p) - path_loss_db(50.0, 0.0, p), 27.0, 1e-9);
}

TEST(PathLoss, HandComputedValue) {
  ChannelParams p;
  // 20 log10(4π·2e9/3e8) = 38.46237..., plus 27·log10(100) = 54.
  EXPECT_NEAR(path_loss_db(100.0, 0.0, p), 38.4623720993283 + 54.0, 1e-6);
}

TEST(PathLoss, BelowReferenceThrows) {
  ChannelParams p;
  EXPECT_THROW(path_loss_db(0.5, 0.0, p), DomainError);
}

TEST(FasGain, SinglePathIsPortInvariant) {
  ChannelParams p;
  p.path_count = 1;
  Rng rng(8);
  for (int d = 0; d < 50; ++d) {
    const auto draw = draw_paths(p, rng);
    const auto mags = port_magnitudes(draw, 80.0, p);
    const auto [lo, hi] = std::minmax_element(mags.begin(), mags.end());
    EXPECT_LT(*hi - *lo, 1e-12 * *hi);
  }
}

TEST(FasGain, GlobalPhaseInvariance) {
  ChannelParams p;
  Rng rng(9);
  auto draw = draw_paths(p, rng);
  const auto before = port_magnitudes(draw, 70.0, p);
  for (auto& e : draw.fading) e *= std::polar(1.0, 1.234);
  const auto after = port_magnitudes(draw, 70.0, p);
  for (int n = 0; n < p.port_count; ++n) EXPECT_NEAR(before[n], after[n], 1e-12 * before[n]);
}

TEST(FasGain, BestPortMatchesExhaustiveSearch) {
  ChannelParams p;
  Rng rng(10);
  for (int d = 0; d < 100; ++d) {
    const auto draw = draw_paths(p, rng);
    int best = 1;
    double best_mag = -1.0;
    for (int n = 1; n <= p.port_count; ++n) {
      const double m = std::abs(fas_gain(draw, n, 60.0, p));
      if (m > best_mag) {
        best_mag = m;
        best = n;
      }
    }
    EXPECT_EQ(best_port(draw, 60.0, p), best);
  }
}

TEST(FasGain, MatchesExplicitSum) {
  ChannelParams p;
  p.amplitude_mode = AmplitudeMode::Verbatim;
  Rng rng(12);
  const auto draw = draw_paths(p, rng);
  const int n = 7;
  Complex expected{0, 0};
  for (int i = 0; i < p.path_count; ++i)
    expected += draw.fading[i] * std::pow(10.0, -3.0) *
                std::exp(Complex(0, -2 * kPi * 5.0 / 31.0 * n * std::cos(draw.aod[i])));
  EXPECT_LT(std::abs(fas_gain(draw, n, 30.0, p) - expected), 1e-15);
  p.amplitude_mode = AmplitudeMode::Power;
  EXPECT_NEAR(std::abs(fas_gain(draw, n, 30.0, p)), std::abs(expected) * std::pow(10.0, 1.5),
              1e-12);
}

TEST(FasGain, PortOutOfRangeThrows) {
  ChannelParams p;
  Rng rng(1);
  const auto draw = draw_paths(p, rng);
  EXPECT_THROW(fas_gain(draw, 0, 50.0, p), ValidationError);
  EXPECT_THROW(fas_gain(draw, 33, 50.0, p), ValidationError);
}

TEST(FasGain, DrawRespectsAngleRange) {
  ChannelParams p;
  Rng rng(2);
  for (int d = 0; d < 200; ++d)
    for (double a : draw_paths(p, rng).aod) {
      EXPECT_GE(a, 0.0);
      EXPECT_LE(a, kPi);
    }
}

TEST(FasGain, MorePortsDoNotLowerTheBestGain) {
  Rng rng(21);
  ChannelParams small, large;
  small.port_count = 8;
  large.port_count = 32;
  double s = 0.0, l = 0.0;
  const int draws = 4000;
  for (int d = 0; d < draws; ++d) {
    const auto draw = draw_paths(large, rng);
    const auto ms = port_magnitudes(draw, 60.0, small);
    const auto ml = port_magnitudes(draw, 60.0, large);
    s += std::pow(*std::max_element(ms.begin(), ms.end()), 2);
    l += std::pow(*std::max_element(ml.begin(), ml.end()), 2);
  }
  EXPECT_GE(l / draws, 0.98 * s / draws);
}

TEST(UplinkSinr, NoInterferenceReducesToSnr) {
  ChannelParams p;
  const std::vector<Complex> g{{1e-4, 0}, {0, 0}, {0, 0}, {0, 0}};
  const auto s = uplink_sinr(g, p);
  EXPECT_NEAR(s[0] / (p.passive_power * 1e-8 / p.noise_power), 1.0, 1e-12);
  EXPECT_EQ(s[1], 0.0);
}

TEST(UplinkSinr, SymmetricGainsSaturateBelowOneThird) {
  ChannelParams p;
  const std::vector<Complex> g(4, Complex{1e-3, 1e-3});
  for (double s : uplink_sinr(g, p)) {
    const double own = p.passive_power * std::norm(g[0]);
    EXPECT_NEAR(s, own / (3 * own + p.noise_power), 1e-15);
    EXPECT_LT(s, 1.0 / 3.0);
  }
}

TEST(UplinkSinr, MatchesBruteForceRecomputation) {
  ChannelParams p;
  Rng rng(4);
  std::normal_distribution<double> g(0.0, 1e-5);
  for (int i = 0; i < 100; ++i) {
    std::vector<Complex> gains(4);
    for (auto& x : gains) x = {g(rng), g(rng)};
    const auto s = uplink_sinr(gains, p);
    double total = 0.0;
    for (const auto& x : gains) total += p.passive_power * std::norm(x);
    for (int k = 0; k < 4; ++k) {
      const double own = p.passive_power * std::norm(gains[k]);
      EXPECT_NEAR(s[k], own / (total - own + p.noise_power), 1e-12 * s[k]);
    }
  }
}

TEST(UplinkSinr, StrongerInterfererLowersSinr) {
  ChannelParams p;
  std::vector<Complex> g{{1e-4, 0}, {2e-5, 0}, {3e-5, 0}, {1e-5, 0}};
  double prev = uplink_sinr(g, p)[0];
  for (int i = 0; i < 10; ++i) {
    g[2] *= 1.3;
    const double s = uplink_sinr(g, p)[0];
    EXPECT_LT(s, prev);
    prev = s;
  }
}

TEST(Latency, KnownValues) {
  ChannelParams p;
  EXPECT_NEAR(uplink_latency(1.0, p), 1e-3, 1e-15);
  EXPECT_NEAR(uplink_latency(3.0, p), 0.5e-3, 1e-15);
  EXPECT_TRUE(std::isinf(uplink_latency(0.0, p)));
  EXPECT_THROW(uplink_latency(-1.0, p), ValidationError);
}

TEST(Latency, StrictlyDecreasingInSinr) {
  ChannelParams p;
  double prev = std::numeric_limits<double>::infinity();
  for (double s = 1e-3; s < 1e3; s *= 1.7) {
    const double l = uplink_latency(s, p);
    EXPECT_LT(l, prev);
    prev = l;
  }
}

TEST(ChannelParamsValidation, RejectsBadValues) {
  ChannelParams p;
  p.port_count = 1;
  EXPECT_THROW(p.validate(), ValidationError);
  p = {};
  p.active_power = 0.0;
  EXPECT_THROW(p.validate(), ValidationError);
  p = {};
  p.path_count = 0;
  EXPECT_THROW(p.validate(), ValidationError);
}

}  // namespace
}  // namespace fasloc::channel
