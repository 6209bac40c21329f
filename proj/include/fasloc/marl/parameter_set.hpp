#pragma once

#include <array>
#include <optional>

#include "fasloc/marl/config.hpp"
#include "fasloc/marl/coordinator.hpp"
#include "fasloc/marl/local_q.hpp"
#include "fasloc/marl/mixer.hpp"
#include "fasloc/marl/spaces.hpp"

namespace fasloc::marl {

enum class Mixing { Hyper, Sum, None };

struct Architecture {
  NetworkConfig network;
  int port_count = 32;
  int path_count = 5;
  bool recurrent = true;
  bool coordinator = true;
  Mixing mixing = Mixing::Hyper;

  static Architecture for_scheme(Scheme s, const NetworkConfig& net, int ports, int paths);
};

/// All trainable weights: local Q networks Ψ_0..Ψ_4, coordinator Φ and
/// factorization Θ. Live and target copies are two instances of this type.
class ParameterSet {
 public:
  explicit ParameterSet(const Architecture& arch);

  void init(Rng& rng);
  /// Stable order: psi0..psi4, phi, theta. Names are the checkpoint manifest.
  nn::TensorList collect();
  void copy_from(ParameterSet& other);

  const Architecture& arch() const { return arch_; }
  const ActionSpace& space(int k) const { return spaces_[k]; }

  std::array<LocalQNet, world::kControlled> local;
  std::optional<Coordinator> coordinator;
  std::optional<Mixer> mixer;

 private:
  Architecture arch_;
  std::array<ActionSpace, world::kControlled> spaces_;
};

}  // namespace fasloc::marl
