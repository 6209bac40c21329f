#pragma once

#include <complex>
#include <span>
#include <vector>

#include "fasloc/types.hpp"

namespace fasloc::channel {

using Complex = std::complex<double>;

/// How the dB path loss L^B enters the per-path amplitude of the FAS gain.
enum class AmplitudeMode {
  Verbatim,  // 10^(-L/10), exactly as the gain expression is printed
  Power,     // 10^(-L/20), L read as a power loss
};

/// How often the multipath fading and departure angles are redrawn.
enum class Coherence {
  PerSlot,  // fresh ε, φ every slot
  Static,   // ε, φ fixed per passive UAV for the whole scenario
};

struct ChannelParams {
  double active_power = 10.0;     // p0, W
  double passive_power = 5.0;     // p_k, W
  double path_loss_1m = 1e-3;     // α0 (linear, power)
  double reflection = 0.5;        // β
  double noise_power = 1e-12;     // ρ², W (-90 dBm)
  int port_count = 32;            // N
  double fas_length = 5.0;        // S, wavelengths
  double carrier_hz = 2e9;        // f0B
  double reference_distance = 1.0;  // r0, m
  double path_loss_exponent = 2.7;  // μ
  double shadowing_std_db = 4.0;    // η
  int path_count = 5;               // I
  double payload_bits = 1000.0;     // D
  double bandwidth_hz = 1e6;        // B
  double light_speed = 3e8;
  AmplitudeMode amplitude_mode = AmplitudeMode::Power;
  Coherence coherence = Coherence::Static;

  double wavelength() const { return light_speed / carrier_hz; }
  void validate() const;
};

/// Uplink multipath realization of one passive UAV for one slot.
struct PathDraw {
  std::vector<Complex> fading;  // ε_i ~ CN(0,1)
  std::vector<double> aod;      // φ_i in [0, π]
  double shadowing_db = 0.0;    // κ ~ N(0, η²)
};

/// Draw for all passive UAVs in one slot.
struct ChannelDraw {
  std::vector<PathDraw> uavs;
};

PathDraw draw_paths(const ChannelParams& params, Rng& rng);
ChannelDraw draw_channel(const ChannelParams& params, int passive_count, Rng& rng);
/// Redraws only the shadowing term of an existing draw.
void redraw_shadowing(ChannelDraw& draw, const ChannelParams& params, Rng& rng);

/// Bistatic measuring-signal SNR: p0 α0² β² / (ρ² d0² dk²).
double bistatic_snr(const Position3& active, const Position3& passive, const Position3& target,
                    const ChannelParams& params);

/// L^B = 20 log10(r0 f0 4π / c) + 10 μ log10(r) + κ.
double path_loss_db(double distance, double shadowing_db, const ChannelParams& params);

/// Port-dependent FAS uplink gain, ports numbered 1..N.
Complex fas_gain(const PathDraw& draw, int port, double path_loss, const ChannelParams& params);

/// |g| for every port 1..N (index 0 holds port 1).
std::vector<double> port_magnitudes(const PathDraw& draw, double path_loss,
                                    const ChannelParams& params);

/// Port with the largest |g|; ties go to the lowest index.
int best_port(const PathDraw& draw, double path_loss, const ChannelParams& params);

/// γ^B_k = p|g_k|² / (Σ_{k'≠k} p|g_k'|² + ρ²).
std::vector<double> uplink_sinr(std::span<const Complex> gains, const ChannelParams& params);

/// W^L = D / (B log2(1 + sinr)); +∞ when sinr == 0.
double uplink_latency(double sinr, const ChannelParams& params);

}  // namespace fasloc::channel
