#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fasloc/cli/config.hpp"
#include "fasloc/cli/experiment.hpp"
#include "fasloc/nn/checkpoint.hpp"

namespace fasloc::cli {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fasloc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

// Small enough to train in well under a second.
ExperimentConfig smoke_config() {
  ExperimentConfig cfg = default_config();
  cfg.network.gru_hidden = 8;
  cfg.network.embed_width = 8;
  cfg.network.attention_heads = 2;
  cfg.network.history_slots = 2;
  cfg.network.omega_width = 4;
  cfg.network.coordinator_hidden = 8;
  cfg.network.mixer_hidden = 4;
  cfg.env.world.slots_per_episode = 5;
  cfg.env.channel.port_count = 4;
  cfg.run.epochs = 3;
  cfg.run.episodes_per_epoch = 2;
  cfg.run.eval_episodes = 2;
  return cfg;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

TEST(Config, EmptyDocumentGivesDefaults) {
  const auto cfg = parse_config("");
  const auto def = default_config();
  EXPECT_EQ(cfg.run.scheme, marl::Scheme::ArMarl);
  EXPECT_EQ(cfg.run.epochs, def.run.epochs);
  EXPECT_EQ(cfg.env.channel.port_count, 32);
  EXPECT_EQ(cfg.env.channel.path_count, 5);
  EXPECT_EQ(cfg.env.world.slots_per_episode, 25);
  EXPECT_DOUBLE_EQ(cfg.env.latency_threshold, 0.03);
  EXPECT_DOUBLE_EQ(cfg.env.world.speed, 5.0);
  EXPECT_EQ(cfg.learning.batch_slots, 32);
}

TEST(Config, ValuesAreRead) {
  const auto cfg = parse_config(
      "world:\n  speed: 7.5\n  target:\n    mode: s_line\n    speed: 15\n"
      "channel:\n  port_count: 16\n  amplitude: verbatim\n"
      "marl:\n  optimizer:\n    kind: sgd\n    learning_rate: 0.01\n"
      "run:\n  scheme: no_fas\n  epochs: 9\n  seed: 42\n");
  EXPECT_DOUBLE_EQ(cfg.env.world.speed, 7.5);
  EXPECT_EQ(cfg.env.target.mode, world::TrajectoryMode::SLine);
  EXPECT_DOUBLE_EQ(cfg.env.target.speed, 15.0);
  EXPECT_EQ(cfg.env.channel.port_count, 16);
  EXPECT_EQ(cfg.env.channel.amplitude_mode, channel::AmplitudeMode::Verbatim);
  EXPECT_EQ(cfg.learning.optimizer.kind, nn::OptimizerKind::Sgd);
  EXPECT_DOUBLE_EQ(cfg.learning.optimizer.learning_rate, 0.01);
  EXPECT_EQ(cfg.run.scheme, marl::Scheme::NoFas);
  EXPECT_EQ(cfg.run.epochs, 9);
  EXPECT_EQ(cfg.run.seed, 42u);
}

TEST(Config, UnknownKeyReportsLine) {
  const std::string msg = message_of([] { parse_config("run:\n  seed: 3\n  sede: 4\n", "exp.yaml"); });
  EXPECT_NE(msg.find("exp.yaml:3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("run.sede"), std::string::npos) << msg;
  EXPECT_THROW(parse_config("bogus: 1\n"), ConfigError);
}

TEST(Config, TypeErrorReportsLine) {
  const std::string msg = message_of([] { parse_config("channel:\n  port_count: many\n", "c.yaml"); });
  EXPECT_NE(msg.find("c.yaml:2"), std::string::npos) << msg;
}

TEST(Config, InvalidValueReportsLine) {
  const std::string msg = message_of([] { parse_config("run:\n  epochs: 3\nchannel:\n  port_count: 1\n", "v.yaml"); });
  EXPECT_FALSE(msg.empty());
  EXPECT_NE(msg.find("v.yaml:4"), std::string::npos) << msg;
}

TEST(Config, OverridesWinOverFile) {
  const auto cfg = parse_config("run:\n  seed: 3\n", "<t>",
                                {"run.seed=11", "channel.port_count=8", "run.scheme=random"});
  EXPECT_EQ(cfg.run.seed, 11u);
  EXPECT_EQ(cfg.env.channel.port_count, 8);
  EXPECT_EQ(cfg.run.scheme, marl::Scheme::Random);
  EXPECT_THROW(parse_config("", "<t>", {"run.nope=1"}), ConfigError);
  EXPECT_THROW(parse_config("", "<t>", {"missing_equals"}), ConfigError);
  const std::string msg = message_of([] { parse_config("run:\n  seed: 3\n", "f.yaml", {"run.epochs=0"}); });
  EXPECT_NE(msg.find("--override"), std::string::npos) << msg;
}

TEST(Config, UnknownSchemeIsRejected) {
  EXPECT_THROW(parse_config("run:\n  scheme: qmix\n"), ConfigError);
}

TEST(Config, DumpRoundTripsExactly) {
  auto cfg = default_config();
  cfg.env.world.speed = 1.0 / 3.0;
  cfg.learning.delta = 0.123456789012345678;
  cfg.run.scheme = marl::Scheme::NoTransformer;
  cfg.env.target.mode = world::TrajectoryMode::UniformCircle;
  const std::string text = dump_config(cfg);
  const auto back = parse_config(text);
  EXPECT_EQ(dump_config(back), text);
  EXPECT_EQ(back.env.world.speed, cfg.env.world.speed);
  EXPECT_EQ(back.learning.delta, cfg.learning.delta);
  EXPECT_EQ(back.run.scheme, cfg.run.scheme);
}

TEST_F(TempDir, LoadConfigReadsFile) {
  const fs::path p = dir_ / "c.yaml";
  std::ofstream(p) << "run:\n  epochs: 5\n";
  EXPECT_EQ(load_config(p).run.epochs, 5);
  EXPECT_THROW(load_config(dir_ / "absent.yaml"), ConfigError);
}

TEST_F(TempDir, SmokeRunWritesArtifacts) {
  const auto res = run_experiment(smoke_config(), dir_ / "run");
  for (const char* f : {kMetricsFile, kSummaryFile, kCheckpointFile, kResolvedConfigFile, kTimingFile})
    EXPECT_TRUE(fs::exists(dir_ / "run" / f)) << f;
  EXPECT_GE(res.files.size(), 3u);
  const auto metrics = read_metrics(dir_ / "run" / kMetricsFile);
  ASSERT_EQ(metrics.size(), 3u);
  EXPECT_EQ(metrics[2].epoch, 2);
  EXPECT_EQ(metrics[2].episode, 6);
  // The resolved config reproduces the run configuration.
  EXPECT_EQ(dump_config(load_config(dir_ / "run" / kResolvedConfigFile)), dump_config(smoke_config()));
}

TEST_F(TempDir, SchemeOverrideReachesTheRun) {
  auto cfg = parse_config(dump_config(smoke_config()), "<t>", {"run.scheme=random"});
  const auto res = run_experiment(cfg, dir_ / "run");
  EXPECT_EQ(res.log.scheme, marl::Scheme::Random);
  EXPECT_EQ(res.log.updates, 0u);
  EXPECT_EQ(nn::load_checkpoint(dir_ / "run" / kCheckpointFile).metadata.at("scheme"), "random");
}

TEST_F(TempDir, MetricsAreByteIdenticalAcrossRuns) {
  run_experiment(smoke_config(), dir_ / "a");
  run_experiment(smoke_config(), dir_ / "b");
  for (const char* f : {kMetricsFile, kSummaryFile, kCheckpointFile, kResolvedConfigFile})
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
}

TEST_F(TempDir, EvaluateRejectsBadRequests) {
  const auto cfg = smoke_config();
  run_experiment(cfg, dir_ / "run");
  const fs::path ckpt = dir_ / "run" / kCheckpointFile;
  EXPECT_THROW(evaluate_policy(cfg, ckpt, 0, 1), ValidationError);
  const auto ok = evaluate_policy(cfg, ckpt, 2, 1);
  EXPECT_EQ(ok.episodes, 2);
  auto other = cfg;
  other.env.channel.port_count = 8;
  EXPECT_THROW(evaluate_policy(other, ckpt, 2, 1), ValidationError);
}

TEST_F(TempDir, EvaluateMatchesTrainingRunEvaluation) {
  const auto cfg = smoke_config();
  const auto res = run_experiment(cfg, dir_ / "run");
  const auto again = evaluate_policy(cfg, dir_ / "run" / kCheckpointFile, cfg.run.eval_episodes,
                                     cfg.run.eval_seed);
  EXPECT_EQ(again.mean_error, res.eval.mean_error);
}

TEST_F(TempDir, ReadMetricsRejectsMalformedInput) {
  const fs::path p = dir_ / "m.jsonl";
  std::ofstream(p) << "{\"epoch\":0,\"episode\":1,\"mean_error\":1,\"mean_reward\":-1,\"loss\":0,"
                      "\"epsilon\":1,\"violations\":0,\"feasible_rate\":1}\nnot json\n";
  const std::string msg = message_of([&] { read_metrics(p); });
  EXPECT_NE(msg.find(":2"), std::string::npos) << msg;

  std::ofstream(p) << "{\"epoch\":1,\"episode\":1,\"mean_error\":1,\"mean_reward\":-1,\"loss\":0,"
                      "\"epsilon\":1,\"violations\":0,\"feasible_rate\":1}\n"
                      "{\"epoch\":0,\"episode\":2,\"mean_error\":1,\"mean_reward\":-1,\"loss\":0,"
                      "\"epsilon\":1,\"violations\":0,\"feasible_rate\":1}\n";
  EXPECT_THROW(read_metrics(p), ValidationError);

  std::ofstream(p) << "{\"epoch\":0}\n";
  EXPECT_THROW(read_metrics(p), ValidationError);
}

TEST_F(TempDir, SweepRecordsFailuresAndContinues) {
  SweepOptions o;
  o.axis = SweepAxis::PortCount;
  o.values = {4, 1, 6};  // one port is rejected by validation
  o.seeds = {1};
  const auto rows = sweep(smoke_config(), o, dir_);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_TRUE(rows[0].ok);
  EXPECT_FALSE(rows[1].ok);
  EXPECT_FALSE(rows[1].message.empty());
  EXPECT_TRUE(rows[2].ok);
  EXPECT_TRUE(fs::exists(dir_ / "sweep.csv"));
}

TEST_F(TempDir, SweepEvaluatesACheckpointAcrossSpeeds) {
  const auto cfg = smoke_config();
  run_experiment(cfg, dir_ / "run");
  SweepOptions o;
  o.axis = SweepAxis::TargetSpeed;
  o.values = {5, 10, 15};
  o.seeds = {1, 2};
  o.checkpoint = dir_ / "run" / kCheckpointFile;
  const auto rows = sweep(cfg, o, dir_ / "sweep");
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& r : rows) EXPECT_TRUE(r.ok) << r.message;
}

TEST(Sweep, AxisNamesRoundTrip) {
  for (auto a : {SweepAxis::TargetSpeed, SweepAxis::Uncertainty, SweepAxis::PortCount})
    EXPECT_EQ(parse_axis(axis_name(a)), a);
  EXPECT_THROW(parse_axis("altitude"), ValidationError);
  const auto cfg = with_axis(default_config(), SweepAxis::Uncertainty, 0.4);
  EXPECT_DOUBLE_EQ(cfg.env.target.uncertainty, 0.4);
}

}  // namespace
}  // namespace fasloc::cli
