// Command-line front end: run, evaluate, sweep, gradcheck, oracle.
//
// Log verbosity comes from FASLOC_LOG (error, warn, info, debug; default info).

#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fasloc/cli/config.hpp"
#include "fasloc/cli/experiment.hpp"
#include "fasloc/cli/oracle.hpp"

namespace {

using namespace fasloc;

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

Level log_level() {
  const char* v = std::getenv("FASLOC_LOG");
  if (!v) return Level::Info;
  const std::string s(v);
  if (s == "error") return Level::Error;
  if (s == "warn") return Level::Warn;
  if (s == "debug") return Level::Debug;
  return Level::Info;
}

void log(Level level, const std::string& msg) {
  static const Level threshold = log_level();
  if (level <= threshold) std::cerr << msg << '\n';
}

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> scheme;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "YAML config file (defaults apply when omitted)");
  cmd->add_option("--override", c.overrides, "section.key=value, repeatable");
  cmd->add_option("--seed", c.seed, "run seed");
  cmd->add_option("--scheme", c.scheme,
                  "ar_marl, vd_marl, independent_q, no_fas, no_rnn, no_transformer or random");
  cmd->add_option("--out", c.out, "output directory");
}

cli::ExperimentConfig resolve(const Common& c) {
  std::vector<std::string> o = c.overrides;
  if (c.seed) o.push_back("run.seed=" + std::to_string(*c.seed));
  if (c.scheme) o.push_back("run.scheme=" + *c.scheme);
  if (c.out) o.push_back("run.out_dir=\"" + *c.out + "\"");
  if (c.config.empty()) return cli::parse_config("", "<defaults>", o);
  return cli::load_config(c.config, o);
}

template <typename T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    std::istringstream is(item);
    T v;
    if (!(is >> v) || !is.eof()) throw ValidationError("bad list entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError("empty list");
  return out;
}

void print(const cli::OracleResult& r) {
  std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << ": worst " << r.worst << " (tol "
            << r.tolerance << ", " << r.seconds << " s) " << r.detail << '\n';
}

int cmd_run(const Common& c) {
  const auto cfg = resolve(c);
  log(Level::Info, "training " + std::string(marl::scheme_name(cfg.run.scheme)) + " for " +
                       std::to_string(cfg.run.epochs) + " epochs, seed " +
                       std::to_string(cfg.run.seed));
  const auto res = cli::run_experiment(cfg, cfg.run.out_dir, [](const marl::EpochRecord& e) {
    std::ostringstream os;
    os << "epoch " << e.epoch << " error " << e.mean_error << " loss " << e.loss << " eps "
       << e.epsilon << " violations " << e.violations;
    log(Level::Debug, os.str());
  });
  std::cout << "final20_error " << res.log.tail_error(20) << " eval_error " << res.eval.mean_error
            << " violation_rate " << res.eval.violation_rate << '\n';
  for (const auto& f : res.files) log(Level::Info, "wrote " + f.string());
  return 0;
}

int cmd_evaluate(const Common& c, const std::string& checkpoint, int episodes) {
  const auto cfg = resolve(c);
  const auto s = cli::evaluate_policy(cfg, checkpoint, episodes, cfg.run.eval_seed);
  const nlohmann::json j = {{"episodes", s.episodes},
                            {"mean_error", s.mean_error},
                            {"std_error", s.std_error},
                            {"violation_rate", s.violation_rate},
                            {"mean_reward", s.mean_reward}};
  std::cout << j.dump() << '\n';
  if (c.out) {
    std::filesystem::create_directories(*c.out);
    std::ofstream(std::filesystem::path(*c.out) / "evaluation.json") << j.dump() << '\n';
  }
  return 0;
}

int cmd_sweep(const Common& c, const std::string& axis, const std::string& values,
              const std::string& seeds, const std::string& checkpoint) {
  const auto cfg = resolve(c);
  cli::SweepOptions o;
  o.axis = cli::parse_axis(axis);
  o.values = parse_list<double>(values);
  o.seeds = seeds.empty() ? std::vector<std::uint64_t>{cfg.run.seed} : parse_list<std::uint64_t>(seeds);
  if (!checkpoint.empty()) o.checkpoint = checkpoint;
  const auto rows = cli::sweep(cfg, o, cfg.run.out_dir);
  int failed = 0;
  for (const auto& r : rows) {
    if (r.ok) {
      std::cout << r.axis << '=' << r.value << " seed " << r.seed << " error " << r.eval.mean_error
                << " violation_rate " << r.eval.violation_rate << '\n';
    } else {
      ++failed;
      std::cout << r.axis << '=' << r.value << " seed " << r.seed << " FAILED: " << r.message << '\n';
    }
  }
  log(Level::Info, "wrote " + (std::filesystem::path(cfg.run.out_dir) / "sweep.csv").string());
  return failed == 0 ? 0 : 3;
}

int cmd_gradcheck(const Common& c) {
  const auto cfg = resolve(c);
  const auto r = cli::check_gradients(cfg.run.scheme, 1e-4, cfg.run.seed);
  print(r);
  return r.pass ? 0 : 1;
}

int cmd_oracle(const Common& c) {
  const auto cfg = resolve(c);
  bool ok = true;
  for (const auto& r : cli::run_oracles(cfg.env.channel, cfg.error_constant, cfg.run.seed)) {
    print(r);
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FAS-assisted multi-UAV target positioning experiments"};
  app.require_subcommand(1);

  Common run_opts, eval_opts, sweep_opts, grad_opts, oracle_opts;
  auto* run = app.add_subcommand("run", "train a scheme and write metrics, checkpoint, config");
  add_common(run, run_opts);

  auto* evaluate = app.add_subcommand("evaluate", "greedy rollouts of a saved checkpoint");
  add_common(evaluate, eval_opts);
  std::string checkpoint;
  int episodes = 20;
  evaluate->add_option("--checkpoint", checkpoint, "checkpoint.bin to load")->required();
  evaluate->add_option("--episodes", episodes, "evaluation episodes");

  auto* sw = app.add_subcommand("sweep", "one evaluation row per axis value");
  add_common(sw, sweep_opts);
  std::string axis, values, seeds, sweep_checkpoint;
  sw->add_option("--axis", axis, "target_speed, uncertainty or port_count")->required();
  sw->add_option("--values", values, "comma-separated values")->required();
  sw->add_option("--seeds", seeds, "comma-separated seeds (default: --seed)");
  sw->add_option("--checkpoint", sweep_checkpoint, "evaluate this policy instead of training per cell");

  auto* grad = app.add_subcommand("gradcheck", "finite-difference check of the TD loss gradient");
  add_common(grad, grad_opts);
  auto* oracle = app.add_subcommand("oracle", "analytic cross-checks of the error model");
  add_common(oracle, oracle_opts);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run_opts);
    if (*evaluate) return cmd_evaluate(eval_opts, checkpoint, episodes);
    if (*sw) return cmd_sweep(sweep_opts, axis, values, seeds, sweep_checkpoint);
    if (*grad) return cmd_gradcheck(grad_opts);
    if (*oracle) return cmd_oracle(oracle_opts);
  } catch (const cli::ConfigError& e) {
    log(Level::Error, std::string("config error: ") + e.what());
    return 2;
  } catch (const std::exception& e) {
    log(Level::Error, std::string("error: ") + e.what());
    return 1;
  }
  return 0;
}
