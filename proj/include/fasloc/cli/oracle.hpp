#pragma once

#include <string>
#include <vector>

#include "fasloc/analysis.hpp"
#include "fasloc/channel.hpp"
#include "fasloc/marl/config.hpp"
#include "fasloc/nn/gradcheck.hpp"

namespace fasloc::cli {

/// Outcome of one analytic cross-check: the worst observed statistic against
/// its tolerance.
struct OracleResult {
  std::string name;
  double worst = 0;
  double tolerance = 0;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

/// Passive UAVs on the vertices of a regular tetrahedron of circumradius
/// `radius` around `center`, randomly rotated.
std::array<Position3, 4> regular_tetrahedron(const Position3& center, double radius, Rng& rng);

/// Monte Carlo RMS of the linearized solve against the trace formula on
/// `geometries` random regular placements.
OracleResult check_trace_formula(int geometries, int samples, double tolerance, std::uint64_t seed,
                                 const analysis::ErrorModel& model);

/// Trace formula at the symmetric d_k = L_min placement against the closed-form
/// minimum, plus strict decrease of the minimum over `powers`.
OracleResult check_minimum_chain(const std::vector<double>& powers, double min_separation,
                                 double tolerance, const analysis::ErrorModel& model);

/// Noise-free range sums solved from a perturbed prior must land on the target.
OracleResult check_localizer(int geometries, double tolerance, std::uint64_t seed);

/// With a single path every port sees the same |g|.
OracleResult check_single_path_ports(const channel::ChannelParams& params, int draws,
                                     double tolerance, std::uint64_t seed);

/// End-to-end finite-difference check of the weighted TD loss of `scheme` on a
/// random 2-slot micro-episode with small layers.
OracleResult check_gradients(marl::Scheme scheme, double tolerance, std::uint64_t seed,
                             nn::GradCheckOptions options = {1e-4, 1e-6, 1});

std::vector<OracleResult> run_oracles(const channel::ChannelParams& params, double error_constant,
                                      std::uint64_t seed);

}  // namespace fasloc::cli
