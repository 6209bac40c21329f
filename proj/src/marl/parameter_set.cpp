#include "fasloc/marl/parameter_set.hpp"

#include <array>

namespace fasloc::marl {

namespace {

constexpr std::array<std::string_view, 7> kSchemeNames = {
    "ar_marl", "vd_marl", "independent_q", "no_fas", "no_rnn", "no_transformer", "random"};

std::array<ActionSpace, world::kControlled> make_spaces(int ports) {
  return {ActionSpace(false, ports), ActionSpace(true, ports), ActionSpace(true, ports),
          ActionSpace(true, ports), ActionSpace(true, ports)};
}

}  // namespace

std::string_view scheme_name(Scheme s) { return kSchemeNames[static_cast<int>(s)]; }

Scheme parse_scheme(std::string_view name) {
  for (std::size_t i = 0; i < kSchemeNames.size(); ++i)
    if (kSchemeNames[i] == name) return static_cast<Scheme>(i);
  throw ValidationError("unknown scheme '" + std::string(name) +
                        "' (expected ar_marl, vd_marl, independent_q, no_fas, no_rnn, "
                        "no_transformer or random)");
}

void NetworkConfig::validate() const {
  if (gru_hidden < 1 || embed_width < 1 || omega_width < 1 || coordinator_hidden < 1 ||
      mixer_hidden < 1)
    throw ValidationError("network sizes must be positive");
  if (attention_heads < 1 || embed_width % attention_heads != 0)
    throw ValidationError("network.embed_width must be a multiple of network.attention_heads");
  if (history_slots < 1) throw ValidationError("network.history_slots must be >= 1");
}

void LearningConfig::validate() const {
  if (!(discount >= 0.0 && discount <= 1.0)) throw ValidationError("discount must lie in [0, 1]");
  if (target_sync < 1) throw ValidationError("target_sync must be >= 1");
  if (!(delta > 0.0)) throw ValidationError("delta must be positive");
  auto unit = [](double e) { return e >= 0.0 && e <= 1.0; };
  if (!unit(epsilon_start) || !unit(epsilon_end))
    throw ValidationError("epsilon bounds must lie in [0, 1]");
  if (!(epsilon_anneal_fraction > 0.0 && epsilon_anneal_fraction <= 1.0))
    throw ValidationError("epsilon_anneal_fraction must lie in (0, 1]");
  if (batch_slots < 1) throw ValidationError("batch_slots must be >= 1");
  if (update_every < 0) throw ValidationError("update_every must be >= 0");
  if (!(reward_scale > 0.0) || !(penalty_cap > 0.0))
    throw ValidationError("reward_scale and penalty_cap must be positive");
  if (!(optimizer.learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
}

Architecture Architecture::for_scheme(Scheme s, const NetworkConfig& net, int ports, int paths) {
  Architecture a;
  a.network = net;
  a.port_count = ports;
  a.path_count = paths;
  a.recurrent = s != Scheme::NoRnn;
  a.coordinator = s == Scheme::ArMarl || s == Scheme::NoFas || s == Scheme::NoRnn;
  switch (s) {
    case Scheme::VdMarl: a.mixing = Mixing::Sum; break;
    case Scheme::IndependentQ:
    case Scheme::Random: a.mixing = Mixing::None; break;
    default: a.mixing = Mixing::Hyper;
  }
  return a;
}

ParameterSet::ParameterSet(const Architecture& arch) : arch_(arch), spaces_(make_spaces(arch.port_count)) {
  arch.network.validate();
  const int fw = feature_width(arch.path_count);
  for (int k = 0; k < world::kControlled; ++k)
    local[k] = LocalQNet(fw, arch.network.gru_hidden, k == 0 ? 0 : arch.port_count, arch.recurrent);
  if (arch.coordinator)
    coordinator.emplace(fw, arch.network.embed_width, arch.network.attention_heads,
                        arch.network.coordinator_hidden, arch.network.omega_width);
  if (arch.mixing == Mixing::Hyper)
    mixer.emplace(world::kControlled, arch.network.omega_width, arch.network.mixer_hidden,
                  arch.network.monotone_mixing);
}

void ParameterSet::init(Rng& rng) {
  for (auto& q : local) q.init(rng);
  if (coordinator) coordinator->init(rng);
  if (mixer) mixer->init(rng);
}

nn::TensorList ParameterSet::collect() {
  nn::TensorList out;
  for (int k = 0; k < world::kControlled; ++k) local[k].collect("psi" + std::to_string(k), out);
  if (coordinator) coordinator->collect("phi", out);
  if (mixer) mixer->collect("theta", out);
  return out;
}

void ParameterSet::copy_from(ParameterSet& other) { nn::copy_values(other.collect(), collect()); }

}  // namespace fasloc::marl
