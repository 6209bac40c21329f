#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fasloc/cli/config.hpp"

namespace fasloc::cli {

/// One line of metrics.jsonl. Wall-clock time lives in timing.json so the
/// metrics file itself is reproducible byte for byte.
struct MetricRecord {
  int epoch = 0;
  int episode = 0;  // episodes completed by the end of the epoch
  double mean_error = 0;
  double mean_reward = 0;
  double loss = 0;
  double epsilon = 0;
  int violations = 0;
  double feasible_rate = 0;
};

struct RunResult {
  marl::TrainingLog log;
  marl::EvalSummary eval;
  std::filesystem::path out_dir;
  std::vector<std::filesystem::path> files;
  double seconds = 0;
};

inline constexpr const char* kMetricsFile = "metrics.jsonl";
inline constexpr const char* kSummaryFile = "summary.csv";
inline constexpr const char* kCheckpointFile = "checkpoint.bin";
inline constexpr const char* kResolvedConfigFile = "config.resolved.yaml";
inline constexpr const char* kTimingFile = "timing.json";
inline constexpr const char* kTrajectoryFile = "trajectories.jsonl";

/// Trains `cfg.run.scheme`, then evaluates the final policy greedily and
/// writes every artifact under `out_dir` (created if missing).
RunResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                         const std::function<void(const marl::EpochRecord&)>& progress = {});

/// Shape manifest stored in checkpoints; must match the config on restore.
std::map<std::string, std::string> checkpoint_manifest(const ExperimentConfig& cfg);

/// Greedy rollouts of a saved policy under `cfg`'s environment.
/// Throws ValidationError when episodes < 1 or the checkpoint does not fit.
marl::EvalSummary evaluate_policy(const ExperimentConfig& cfg,
                                  const std::filesystem::path& checkpoint, int episodes,
                                  std::uint64_t seed);

enum class SweepAxis { TargetSpeed, Uncertainty, PortCount };
SweepAxis parse_axis(const std::string& name);
std::string axis_name(SweepAxis axis);
/// Copy of `cfg` with the axis set to `value`.
ExperimentConfig with_axis(ExperimentConfig cfg, SweepAxis axis, double value);

struct SweepRow {
  std::string axis;
  double value = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  marl::EvalSummary eval;
  std::string message;  // failure reason when !ok
};

struct SweepOptions {
  SweepAxis axis = SweepAxis::TargetSpeed;
  std::vector<double> values;
  std::vector<std::uint64_t> seeds{1};
  /// Policy to evaluate in every cell. Without one each cell trains its own
  /// policy under the cell configuration first.
  std::optional<std::filesystem::path> checkpoint;
};

/// One row per (seed, value). A failing cell is recorded and the sweep
/// continues. The table is written to `out_dir`/sweep.csv.
std::vector<SweepRow> sweep(const ExperimentConfig& cfg, const SweepOptions& options,
                            const std::filesystem::path& out_dir);

/// Parses metrics.jsonl; throws ValidationError on a malformed line or a
/// non-increasing epoch index.
std::vector<MetricRecord> read_metrics(const std::filesystem::path& path);

}  // namespace fasloc::cli
