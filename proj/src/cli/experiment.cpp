#include "fasloc/cli/experiment.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "fasloc/nn/checkpoint.hpp"

namespace fasloc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

json point(const Position3& p) { return json::array({p.x(), p.y(), p.z()}); }

}  // namespace

std::map<std::string, std::string> checkpoint_manifest(const ExperimentConfig& cfg) {
  const auto& n = cfg.network;
  return {{"scheme", std::string(marl::scheme_name(cfg.run.scheme))},
          {"port_count", std::to_string(cfg.env.channel.port_count)},
          {"path_count", std::to_string(cfg.env.channel.path_count)},
          {"gru_hidden", std::to_string(n.gru_hidden)},
          {"attention_heads", std::to_string(n.attention_heads)},
          {"embed_width", std::to_string(n.embed_width)},
          {"history_slots", std::to_string(n.history_slots)},
          {"omega_width", std::to_string(n.omega_width)},
          {"coordinator_hidden", std::to_string(n.coordinator_hidden)},
          {"mixer_hidden", std::to_string(n.mixer_hidden)},
          {"monotone_mixing", n.monotone_mixing ? "true" : "false"}};
}

RunResult run_experiment(const ExperimentConfig& cfg, const fs::path& out_dir,
                         const std::function<void(const marl::EpochRecord&)>& progress) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(out_dir);
  RunResult res;
  res.out_dir = out_dir;

  const fs::path resolved = out_dir / kResolvedConfigFile;
  write_text(resolved, dump_config(cfg));
  res.files.push_back(resolved);

  marl::Trainer trainer(cfg.trainer());
  trainer.on_epoch = progress;
  res.log = trainer.train();
  const double train_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.eval = trainer.evaluate(cfg.run.eval_episodes, cfg.run.eval_seed);

  std::ostringstream metrics;
  for (const auto& e : res.log.epochs) {
    const json line = {{"epoch", e.epoch},
                       {"episode", (e.epoch + 1) * cfg.run.episodes_per_epoch},
                       {"mean_error", e.mean_error},
                       {"mean_reward", e.mean_reward},
                       {"loss", e.loss},
                       {"epsilon", e.epsilon},
                       {"violations", e.violations},
                       {"feasible_rate", e.feasible_rate}};
    metrics << line.dump() << '\n';
  }
  write_text(out_dir / kMetricsFile, metrics.str());
  res.files.push_back(out_dir / kMetricsFile);

  std::ostringstream csv;
  csv << "scheme,seed,epochs,final20_error,eval_episodes,eval_mean_error,eval_std_error,"
         "eval_violation_rate,updates,inter_agent_messages\n";
  csv << marl::scheme_name(cfg.run.scheme) << ',' << cfg.run.seed << ',' << cfg.run.epochs << ','
      << fmt(res.log.tail_error(20)) << ',' << res.eval.episodes << ',' << fmt(res.eval.mean_error)
      << ',' << fmt(res.eval.std_error) << ',' << fmt(res.eval.violation_rate) << ','
      << res.log.updates << ',' << res.log.inter_agent_messages << '\n';
  write_text(out_dir / kSummaryFile, csv.str());
  res.files.push_back(out_dir / kSummaryFile);

  nn::save_checkpoint(out_dir / kCheckpointFile, trainer.live().collect(), checkpoint_manifest(cfg));
  res.files.push_back(out_dir / kCheckpointFile);

  if (!res.log.trajectories.empty()) {
    std::ostringstream traj;
    for (const auto& t : res.log.trajectories) {
      json uavs = json::array(), target = json::array(), estimate = json::array();
      for (std::size_t s = 0; s < t.target.size(); ++s) {
        json row = json::array();
        for (const auto& u : t.uavs[s]) row.push_back(point(u));
        uavs.push_back(row);
        target.push_back(point(t.target[s]));
        estimate.push_back(point(t.estimate[s]));
      }
      traj << json{{"epoch", t.epoch}, {"uavs", uavs}, {"target", target}, {"estimate", estimate}}.dump()
           << '\n';
    }
    write_text(out_dir / kTrajectoryFile, traj.str());
    res.files.push_back(out_dir / kTrajectoryFile);
  }

  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_text(out_dir / kTimingFile,
             json{{"train_seconds", train_seconds}, {"total_seconds", res.seconds}}.dump() + "\n");
  res.files.push_back(out_dir / kTimingFile);
  return res;
}

marl::EvalSummary evaluate_policy(const ExperimentConfig& cfg, const fs::path& checkpoint,
                                  int episodes, std::uint64_t seed) {
  if (episodes < 1) throw ValidationError("evaluate_policy: episodes must be >= 1");
  const nn::Checkpoint ck = nn::load_checkpoint(checkpoint);
  ExperimentConfig c = cfg;
  if (const auto it = ck.metadata.find("scheme"); it != ck.metadata.end())
    c.run.scheme = marl::parse_scheme(it->second);
  for (const auto& [key, expected] : checkpoint_manifest(c)) {
    const auto it = ck.metadata.find(key);
    if (it == ck.metadata.end())
      throw ValidationError("checkpoint manifest lacks '" + key + "'");
    if (it->second != expected)
      throw ValidationError("checkpoint manifest mismatch: " + key + " is " + it->second +
                            " in the checkpoint but " + expected + " in the config");
  }
  marl::Trainer trainer(c.trainer());
  nn::restore(ck, trainer.live().collect());
  return trainer.evaluate(episodes, seed);
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "target_speed") return SweepAxis::TargetSpeed;
  if (name == "uncertainty") return SweepAxis::Uncertainty;
  if (name == "port_count") return SweepAxis::PortCount;
  throw ValidationError("unknown sweep axis '" + name +
                        "' (expected target_speed, uncertainty or port_count)");
}

std::string axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::TargetSpeed: return "target_speed";
    case SweepAxis::Uncertainty: return "uncertainty";
    case SweepAxis::PortCount: return "port_count";
  }
  return "?";
}

ExperimentConfig with_axis(ExperimentConfig cfg, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::TargetSpeed: cfg.env.target.speed = value; break;
    case SweepAxis::Uncertainty: cfg.env.target.uncertainty = value; break;
    case SweepAxis::PortCount:
      if (value != std::floor(value)) throw ValidationError("port_count must be an integer");
      cfg.env.channel.port_count = static_cast<int>(value);
      break;
  }
  return cfg;
}

std::vector<SweepRow> sweep(const ExperimentConfig& cfg, const SweepOptions& options,
                            const fs::path& out_dir) {
  if (options.values.empty()) throw ValidationError("sweep: no values given");
  fs::create_directories(out_dir);
  std::vector<SweepRow> rows;
  for (const auto seed : options.seeds) {
    for (const double value : options.values) {
      SweepRow row;
      row.axis = axis_name(options.axis);
      row.value = value;
      row.seed = seed;
      try {
        ExperimentConfig cell = with_axis(cfg, options.axis, value);
        cell.run.seed = seed;
        cell.validate();
        if (options.checkpoint) {
          row.eval = evaluate_policy(cell, *options.checkpoint, cell.run.eval_episodes,
                                     mix_seed(cell.run.eval_seed, seed));
        } else {
          const fs::path dir =
              out_dir / (row.axis + "_" + fmt(value)) / ("seed_" + std::to_string(seed));
          row.eval = run_experiment(cell, dir).eval;
        }
        row.ok = true;
      } catch (const std::exception& e) {
        row.message = e.what();
      }
      rows.push_back(row);
    }
  }
  std::ostringstream csv;
  csv << "axis,value,seed,status,mean_error,std_error,violation_rate,message\n";
  for (const auto& r : rows) {
    std::string msg = r.message;
    std::replace(msg.begin(), msg.end(), '"', '\'');
    csv << r.axis << ',' << fmt(r.value) << ',' << r.seed << ',' << (r.ok ? "ok" : "failed") << ','
        << (r.ok ? fmt(r.eval.mean_error) : "") << ',' << (r.ok ? fmt(r.eval.std_error) : "") << ','
        << (r.ok ? fmt(r.eval.violation_rate) : "") << ",\"" << msg << "\"\n";
  }
  write_text(out_dir / "sweep.csv", csv.str());
  return rows;
}

std::vector<MetricRecord> read_metrics(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<MetricRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    MetricRecord r;
    try {
      const json j = json::parse(line);
      r.epoch = j.at("epoch").get<int>();
      r.episode = j.at("episode").get<int>();
      r.mean_error = j.at("mean_error").get<double>();
      r.mean_reward = j.at("mean_reward").get<double>();
      r.loss = j.at("loss").get<double>();
      r.epsilon = j.at("epsilon").get<double>();
      r.violations = j.at("violations").get<int>();
      r.feasible_rate = j.at("feasible_rate").get<double>();
    } catch (const json::exception& e) {
      throw ValidationError(where + ": malformed metric record: " + e.what());
    }
    if (!out.empty() && r.epoch <= out.back().epoch)
      throw ValidationError(where + ": epoch index not increasing");
    out.push_back(r);
  }
  return out;
}

}  // namespace fasloc::cli
