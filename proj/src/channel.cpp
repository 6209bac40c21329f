#include "fasloc/channel.hpp"

#include <cmath>
#include <limits>

namespace fasloc::channel {

void ChannelParams::validate() const {
  if (!(active_power > 0 && passive_power > 0 && noise_power > 0))
    throw ValidationError("channel powers must be > 0");
  if (port_count < 2) throw ValidationError("channel.port_count must be >= 2");
  if (!(fas_length > 0)) throw ValidationError("channel.fas_length must be > 0");
  if (path_count < 1) throw ValidationError("channel.path_count must be >= 1");
  if (!(path_loss_1m > 0 && reflection >= 0)) throw ValidationError("invalid α0 or β");
  if (!(carrier_hz > 0 && reference_distance > 0 && bandwidth_hz > 0 && payload_bits > 0))
    throw ValidationError("carrier, reference distance, bandwidth and payload must be > 0");
  if (!(shadowing_std_db >= 0)) throw ValidationError("channel.shadowing_std_db must be >= 0");
}

PathDraw draw_paths(const ChannelParams& params, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, kPi);
  PathDraw d;
  d.fading.reserve(params.path_count);
  d.aod.reserve(params.path_count);
  const double s = std::sqrt(0.5);
  for (int i = 0; i < params.path_count; ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    d.fading.emplace_back(s * re, s * im);
    d.aod.push_back(angle(rng));
  }
  d.shadowing_db = params.shadowing_std_db * gauss(rng);
  return d;
}

ChannelDraw draw_channel(const ChannelParams& params, int passive_count, Rng& rng) {
  ChannelDraw draw;
  draw.uavs.reserve(passive_count);
  for (int k = 0; k < passive_count; ++k) draw.uavs.push_back(draw_paths(params, rng));
  return draw;
}

void redraw_shadowing(ChannelDraw& draw, const ChannelParams& params, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto& u : draw.uavs) u.shadowing_db = params.shadowing_std_db * gauss(rng);
}

double bistatic_snr(const Position3& active, const Position3& passive, const Position3& target,
                    const ChannelParams& params) {
  const double d0 = (active - target).norm();
  const double dk = (target - passive).norm();
  if (d0 == 0.0 || dk == 0.0) throw DomainError("bistatic_snr: target coincides with a UAV");
  const double a = params.path_loss_1m;
  const double b = params.reflection;
  return params.active_power * a * a * b * b / (params.noise_power * d0 * d0 * dk * dk);
}

double path_loss_db(double distance, double shadowing_db, const ChannelParams& params) {
  if (!(distance >= params.reference_distance))
    throw DomainError("path_loss_db: distance below the reference distance");
  const double free_space =
      20.0 * std::log10(params.reference_distance * params.carrier_hz * 4.0 * kPi /
                        params.light_speed);
  return free_space + 10.0 * params.path_loss_exponent * std::log10(distance) + shadowing_db;
}

namespace {

double amplitude(double path_loss, const ChannelParams& params) {
  const double divisor = params.amplitude_mode == AmplitudeMode::Verbatim ? 10.0 : 20.0;
  return std::pow(10.0, -path_loss / divisor);
}

}  // namespace

Complex fas_gain(const PathDraw& draw, int port, double path_loss, const ChannelParams& params) {
  if (port < 1 || port > params.port_count)
    throw ValidationError("fas_gain: port " + std::to_string(port) + " outside 1.." +
                          std::to_string(params.port_count));
  const double amp = amplitude(path_loss, params);
  const double spacing = 2.0 * kPi * params.fas_length / (params.port_count - 1);
  Complex g{0.0, 0.0};
  for (std::size_t i = 0; i < draw.fading.size(); ++i) {
    const double phase = -spacing * port * std::cos(draw.aod[i]);
    g += draw.fading[i] * amp * std::polar(1.0, phase);
  }
  return g;
}

std::vector<double> port_magnitudes(const PathDraw& draw, double path_loss,
                                    const ChannelParams& params) {
  std::vector<double> mags(params.port_count);
  for (int n = 1; n <= params.port_count; ++n)
    mags[n - 1] = std::abs(fas_gain(draw, n, path_loss, params));
  return mags;
}

int best_port(const PathDraw& draw, double path_loss, const ChannelParams& params) {
  const auto mags = port_magnitudes(draw, path_loss, params);
  int best = 0;
  for (int n = 1; n < static_cast<int>(mags.size()); ++n)
    if (mags[n] > mags[best]) best = n;
  return best + 1;
}

std::vector<double> uplink_sinr(std::span<const Complex> gains, const ChannelParams& params) {
  std::vector<double> own(gains.size());
  for (std::size_t k = 0; k < gains.size(); ++k)
    own[k] = params.passive_power * std::norm(gains[k]);
  std::vector<double> sinr(gains.size());
  for (std::size_t k = 0; k < gains.size(); ++k) {
    // Interference excludes the UAV's own signal.
    double interference = 0.0;
    for (std::size_t j = 0; j < gains.size(); ++j)
      if (j != k) interference += own[j];
    sinr[k] = own[k] / (interference + params.noise_power);
  }
  return sinr;
}

double uplink_latency(double sinr, const ChannelParams& params) {
  if (!(sinr >= 0.0)) throw ValidationError("uplink_latency: sinr must be >= 0");
  const double rate = params.bandwidth_hz * std::log2(1.0 + sinr);
  if (rate <= 0.0) return std::numeric_limits<double>::infinity();
  return params.payload_bits / rate;
}

}  // namespace fasloc::channel
