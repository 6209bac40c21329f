#include "fasloc/cli/oracle.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include <Eigen/Geometry>

#include "fasloc/marl/learning.hpp"
#include "fasloc/positioning.hpp"

namespace fasloc::cli {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Position3 uniform_box(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(rng), u(rng), u(rng)};
}

Position3 unit_vector(Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Position3 v;
  do {
    v = {g(rng), g(rng), g(rng)};
  } while (v.norm() < 1e-9);
  return v.normalized();
}

}  // namespace

std::array<Position3, 4> regular_tetrahedron(const Position3& center, double radius, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const Eigen::Quaterniond q = Eigen::Quaterniond(g(rng), g(rng), g(rng), g(rng)).normalized();
  const double s = 1.0 / std::sqrt(3.0);
  const std::array<Position3, 4> unit{Position3{s, s, s}, Position3{s, -s, -s},
                                      Position3{-s, s, -s}, Position3{-s, -s, s}};
  std::array<Position3, 4> out;
  for (int k = 0; k < 4; ++k) out[k] = center + radius * (q * unit[k]);
  return out;
}

OracleResult check_trace_formula(int geometries, int samples, double tolerance, std::uint64_t seed,
                                 const analysis::ErrorModel& model) {
  const auto t0 = Clock::now();
  OracleResult r{"trace formula vs Monte Carlo", 0.0, tolerance, false, "", 0.0};
  Rng rng(seed);
  std::uniform_real_distribution<double> radius(20.0, 400.0), range(100.0, 800.0);
  int done = 0;
  while (done < geometries) {
    const Position3 target = uniform_box(rng, 200.0, 800.0);
    const auto passives = regular_tetrahedron(target, radius(rng), rng);
    const Position3 active = target + range(rng) * unit_vector(rng);
    const auto g = analysis::build_W(target, active, passives, analysis::ErrorGradientMode::Zero);
    if (g.conditioning < 1e-2) continue;
    const double d0 = (target - active).norm();
    const double dk = (target - passives[0]).norm();
    const double var = analysis::inverse_snr_variance(d0, dk, model);
    const double xi = analysis::theorem1_error(g.W, var);
    Rng mc(mix_seed(seed, static_cast<std::uint64_t>(done) + 1));
    const double rms = analysis::monte_carlo_error(g.W, var, samples, mc);
    r.worst = std::max(r.worst, std::abs(rms - xi) / xi);
    ++done;
  }
  r.pass = r.worst <= tolerance;
  std::ostringstream os;
  os << geometries << " geometries, " << samples << " samples each";
  r.detail = os.str();
  r.seconds = since(t0);
  return r;
}

OracleResult check_minimum_chain(const std::vector<double>& powers, double min_separation,
                                 double tolerance, const analysis::ErrorModel& model) {
  const auto t0 = Clock::now();
  OracleResult r{"closed-form minimum chain", 0.0, tolerance, false, "", 0.0};
  Rng rng(11);
  const Position3 target{500, 500, 300};
  const Position3 active{500, 500, 900};
  const auto passives = regular_tetrahedron(target, min_separation, rng);
  double previous = std::numeric_limits<double>::infinity();
  bool decreasing = true;
  std::ostringstream os;
  os << "xi_min:";
  for (double p0 : powers) {
    analysis::ErrorModel m = model;
    m.active_power = p0;
    const auto b = analysis::error_budget(target, active, passives, min_separation, m);
    r.worst = std::max(r.worst, std::abs(b.xi - b.xi_min) / b.xi_min);
    decreasing = decreasing && b.xi_min < previous;
    previous = b.xi_min;
    os << ' ' << b.xi_min;
  }
  os << (decreasing ? " (strictly decreasing)" : " (NOT strictly decreasing)");
  r.pass = r.worst <= tolerance && decreasing;
  r.detail = os.str();
  r.seconds = since(t0);
  return r;
}

OracleResult check_localizer(int geometries, double tolerance, std::uint64_t seed) {
  const auto t0 = Clock::now();
  OracleResult r{"noise-free localizer", 0.0, tolerance, false, "", 0.0};
  Rng rng(seed);
  int done = 0;
  while (done < geometries) {
    const Position3 target = uniform_box(rng, 200.0, 800.0);
    const Position3 active = uniform_box(rng, 0.0, 1000.0);
    std::array<Position3, 4> passives;
    for (auto& p : passives) p = uniform_box(rng, 0.0, 1000.0);
    bool spaced = (active - target).norm() >= 20.0;
    for (int i = 0; i < 4; ++i) {
      spaced = spaced && (passives[i] - target).norm() >= 20.0 && (passives[i] - active).norm() >= 20.0;
      for (int j = 0; j < i; ++j) spaced = spaced && (passives[i] - passives[j]).norm() >= 20.0;
    }
    if (!spaced) continue;
    if (analysis::build_W(target, active, passives, analysis::ErrorGradientMode::Zero).conditioning < 0.1)
      continue;
    std::vector<positioning::Observation> obs;
    for (const auto& p : passives)
      obs.push_back({p, positioning::true_range_sum(active, p, target).meters});
    const Position3 prior = target + 20.0 * unit_vector(rng);
    const auto est = positioning::estimate_position(obs, active, prior);
    r.worst = std::max(r.worst, positioning::positioning_error(est.position, target));
    ++done;
  }
  r.pass = r.worst <= tolerance;
  r.detail = std::to_string(geometries) + " geometries, prior 20 m off";
  r.seconds = since(t0);
  return r;
}

OracleResult check_single_path_ports(const channel::ChannelParams& params, int draws,
                                     double tolerance, std::uint64_t seed) {
  const auto t0 = Clock::now();
  OracleResult r{"single-path port invariance", 0.0, tolerance, false, "", 0.0};
  channel::ChannelParams p = params;
  p.path_count = 1;
  Rng rng(seed);
  for (int d = 0; d < draws; ++d) {
    const auto draw = channel::draw_paths(p, rng);
    const double loss = channel::path_loss_db(300.0, draw.shadowing_db, p);
    const auto mags = channel::port_magnitudes(draw, loss, p);
    const auto [lo, hi] = std::minmax_element(mags.begin(), mags.end());
    r.worst = std::max(r.worst, (*hi - *lo) / *hi);
  }
  r.pass = r.worst < tolerance;
  r.detail = std::to_string(draws) + " draws over " + std::to_string(p.port_count) + " ports";
  r.seconds = since(t0);
  return r;
}

OracleResult check_gradients(marl::Scheme scheme, double tolerance, std::uint64_t seed,
                             nn::GradCheckOptions options) {
  const auto t0 = Clock::now();
  OracleResult r{"gradient check (" + std::string(marl::scheme_name(scheme)) + ")", 0.0, tolerance,
                 false, "", 0.0};
  marl::NetworkConfig net;
  net.gru_hidden = 6;
  net.embed_width = 4;
  net.attention_heads = 2;
  net.omega_width = 3;
  net.coordinator_hidden = 5;
  net.mixer_hidden = 3;
  net.history_slots = 2;
  constexpr int kPorts = 3, kPaths = 2, kSlots = 2;
  const auto arch = marl::Architecture::for_scheme(scheme, net, kPorts, kPaths);
  marl::ParameterSet live(arch), target(arch);
  Rng rng(seed);
  live.init(rng);
  target.init(rng);

  marl::EpisodeBuffer buf;
  buf.horizon = kSlots;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int t = 0; t < kSlots; ++t) {
    std::array<nn::RowVector, world::kControlled> f;
    for (auto& row : f) {
      row.resize(marl::feature_width(kPaths));
      for (auto& x : row) x = gauss(rng);
    }
    buf.features.push_back(f);
    buf.forced_port.push_back({0, 0, 0, 0});
    std::array<int, world::kControlled> a;
    for (int k = 0; k < world::kControlled; ++k)
      a[k] = std::uniform_int_distribution<int>(0, live.space(k).size() - 1)(rng);
    buf.actions.push_back(a);
    buf.rewards.push_back(gauss(rng));
  }
  marl::LearningConfig lc;
  const std::vector<int> slots{0, 1};
  const auto params = live.collect();
  nn::zero_grads(params);
  marl::episode_loss(live, target, buf, lc, slots, true);
  const auto g = nn::finite_diff_check(
      [&] { return marl::episode_loss(live, target, buf, lc, slots, false).loss; }, params, options);
  r.worst = g.max_rel_error;
  r.pass = r.worst < tolerance;
  std::ostringstream os;
  os << g.checked << " entries, worst " << g.worst_param << "[" << g.worst_index
     << "] analytic " << g.analytic << " numeric " << g.numeric;
  r.detail = os.str();
  r.seconds = since(t0);
  return r;
}

std::vector<OracleResult> run_oracles(const channel::ChannelParams& params, double error_constant,
                                      std::uint64_t seed) {
  const auto model = analysis::ErrorModel::from_channel(params, error_constant);
  return {check_trace_formula(20, 100000, 0.02, seed, model),
          check_minimum_chain({1.0, 5.0, 10.0, 50.0}, 20.0, 1e-9, model),
          check_localizer(100, 1e-6, seed),
          check_single_path_ports(params, 100, 1e-12, seed)};
}

}  // namespace fasloc::cli
