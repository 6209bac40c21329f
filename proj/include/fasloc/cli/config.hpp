#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fasloc/marl/trainer.hpp"

namespace fasloc::cli {

/// Raised for malformed or invalid configuration. The message names the
/// source and, when known, the 1-based line of the offending entry.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct RunSection {
  marl::Scheme scheme = marl::Scheme::ArMarl;
  int epochs = 186;
  int episodes_per_epoch = 12;
  std::uint64_t seed = 1;
  std::string out_dir = "runs/default";
  bool record_trajectories = false;
  int eval_episodes = 20;
  std::uint64_t eval_seed = 99;
};

/// Everything a run needs. Every field has a default, so an empty file is a
/// valid configuration.
struct ExperimentConfig {
  marl::EnvironmentConfig env;
  marl::NetworkConfig network;
  marl::LearningConfig learning;
  RunSection run;
  /// κ_e of the analytic error model used by the oracle verb.
  double error_constant = 0.0;

  marl::TrainerConfig trainer() const;
  void validate() const;
};

ExperimentConfig default_config();

/// Parses YAML text. `source` names the input in error messages.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>",
                              const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides = {});

/// Fully expanded YAML; parsing it back yields an identical configuration.
std::string dump_config(const ExperimentConfig& cfg);

}  // namespace fasloc::cli
