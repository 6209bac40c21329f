#include "fasloc/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace fasloc::cli {

namespace {

using marl::Scheme;

template <typename E>
struct EnumNames {
  std::vector<std::pair<E, std::string>> names;

  std::string to_string(E e) const {
    for (const auto& [v, n] : names)
      if (v == e) return n;
    return "?";
  }
  bool parse(const std::string& s, E& out) const {
    for (const auto& [v, n] : names)
      if (n == s) {
        out = v;
        return true;
      }
    return false;
  }
  std::string choices() const {
    std::string s;
    for (const auto& [v, n] : names) s += (s.empty() ? "" : ", ") + n;
    return s;
  }
};

const EnumNames<world::TrajectoryMode> kModes{{{world::TrajectoryMode::CLine, "c_line"},
                                               {world::TrajectoryMode::UniformCircle, "circle"},
                                               {world::TrajectoryMode::SLine, "s_line"}}};
const EnumNames<channel::AmplitudeMode> kAmplitudes{
    {{channel::AmplitudeMode::Verbatim, "verbatim"}, {channel::AmplitudeMode::Power, "power"}}};
const EnumNames<channel::Coherence> kCoherence{
    {{channel::Coherence::PerSlot, "per_slot"}, {channel::Coherence::Static, "static"}}};
const EnumNames<nn::OptimizerKind> kOptimizers{
    {{nn::OptimizerKind::Sgd, "sgd"}, {nn::OptimizerKind::Adam, "adam"}}};
const EnumNames<Scheme> kSchemes{{{Scheme::ArMarl, "ar_marl"},
                                  {Scheme::VdMarl, "vd_marl"},
                                  {Scheme::IndependentQ, "independent_q"},
                                  {Scheme::NoFas, "no_fas"},
                                  {Scheme::NoRnn, "no_rnn"},
                                  {Scheme::NoTransformer, "no_transformer"},
                                  {Scheme::Random, "random"}}};

/// Angle stored in radians, written in degrees.
struct Degrees {
  double& rad;
};

// One walk over the schema drives both parsing and dumping.
template <typename V>
void visit(V& v, ExperimentConfig& c) {
  auto& w = c.env.world;
  auto& t = c.env.target;
  auto& ch = c.env.channel;
  auto& net = c.network;
  auto& l = c.learning;
  v.section("world", [&] {
    v.field("speed", w.speed);
    v.field("slot_duration", w.slot_duration);
    v.field("slots_per_episode", w.slots_per_episode);
    v.field("light_speed", w.light_speed);
    v.field("min_separation", w.min_separation);
    v.field("max_separation", w.max_separation);
    v.field("yaw_min_deg", Degrees{w.yaw_min});
    v.field("yaw_max_deg", Degrees{w.yaw_max});
    v.field("pitch_min_deg", Degrees{w.pitch_min});
    v.field("pitch_max_deg", Degrees{w.pitch_max});
    v.field("active_position", w.initial_positions[0]);
    v.field("passive_positions", w.initial_positions);
    v.field("bs_position", w.bs_position);
    v.field("target_position", w.target_initial);
    v.section("target", [&] {
      v.field("mode", t.mode, kModes);
      v.field("speed", t.speed);
      v.field("uncertainty", t.uncertainty);
      v.field("initial_yaw_deg", Degrees{t.initial_yaw});
      v.field("seed", t.seed);
    });
  });
  v.section("channel", [&] {
    v.field("active_power", ch.active_power);
    v.field("passive_power", ch.passive_power);
    v.field("path_loss_1m", ch.path_loss_1m);
    v.field("reflection", ch.reflection);
    v.field("noise_power", ch.noise_power);
    v.field("port_count", ch.port_count);
    v.field("fas_length", ch.fas_length);
    v.field("carrier_hz", ch.carrier_hz);
    v.field("reference_distance", ch.reference_distance);
    v.field("path_loss_exponent", ch.path_loss_exponent);
    v.field("shadowing_std_db", ch.shadowing_std_db);
    v.field("path_count", ch.path_count);
    v.field("payload_bits", ch.payload_bits);
    v.field("bandwidth_hz", ch.bandwidth_hz);
    v.field("amplitude", ch.amplitude_mode, kAmplitudes);
    v.field("coherence", ch.coherence, kCoherence);
    v.field("seed", c.env.channel_seed);
  });
  v.section("positioning", [&] {
    v.field("variance_scale", c.env.variance_scale);
    v.field("latency_threshold", c.env.latency_threshold);
    v.field("min_measurements", c.env.min_measurements);
    v.field("max_iterations", c.env.solver.max_iterations);
    v.field("step_tolerance", c.env.solver.step_tolerance);
    v.field("initial_damping", c.env.solver.initial_damping);
    v.field("error_constant", c.error_constant);
  });
  v.section("marl", [&] {
    v.section("network", [&] {
      v.field("gru_hidden", net.gru_hidden);
      v.field("attention_heads", net.attention_heads);
      v.field("embed_width", net.embed_width);
      v.field("history_slots", net.history_slots);
      v.field("omega_width", net.omega_width);
      v.field("coordinator_hidden", net.coordinator_hidden);
      v.field("mixer_hidden", net.mixer_hidden);
      v.field("monotone_mixing", net.monotone_mixing);
    });
    v.section("learning", [&] {
      v.field("discount", l.discount);
      v.field("target_sync", l.target_sync);
      v.field("delta", l.delta);
      v.field("epsilon_start", l.epsilon_start);
      v.field("epsilon_end", l.epsilon_end);
      v.field("epsilon_anneal_fraction", l.epsilon_anneal_fraction);
      v.field("batch_slots", l.batch_slots);
      v.field("update_every", l.update_every);
      v.field("reward_scale", l.reward_scale);
      v.field("penalty_cap", l.penalty_cap);
    });
    v.section("optimizer", [&] {
      v.field("kind", l.optimizer.kind, kOptimizers);
      v.field("learning_rate", l.optimizer.learning_rate);
      v.field("clip_norm", l.optimizer.clip_norm);
      v.field("beta1", l.optimizer.beta1);
      v.field("beta2", l.optimizer.beta2);
      v.field("epsilon", l.optimizer.epsilon);
    });
  });
  v.section("run", [&] {
    v.field("scheme", c.run.scheme, kSchemes);
    v.field("epochs", c.run.epochs);
    v.field("episodes_per_epoch", c.run.episodes_per_epoch);
    v.field("seed", c.run.seed);
    v.field("out_dir", c.run.out_dir);
    v.field("record_trajectories", c.run.record_trajectories);
    v.field("eval_episodes", c.run.eval_episodes);
    v.field("eval_seed", c.run.eval_seed);
  });
}

std::string where(const std::string& source, const YAML::Mark& mark) {
  if (mark.is_null()) return source + " (--override)";
  return source + ":" + std::to_string(mark.line + 1);
}

class Reader {
 public:
  Reader(YAML::Node root, std::string source, std::set<std::string> overridden)
      : source_(std::move(source)), overridden_(std::move(overridden)) {
    stack_.push_back({std::move(root), "", {}});
  }

  void section(const std::string& name, const std::function<void()>& body) {
    const YAML::Node child = lookup(name);
    if (!child) return;
    if (!child.IsMap())
      throw ConfigError(where(source_, mark(path(name), child)) + ": '" + path(name) + "' must be a mapping");
    stack_.push_back({child, path(name), {}});
    body();
    finish();
    stack_.pop_back();
  }

  template <typename T>
  void field(const std::string& name, T& out) {
    const YAML::Node n = lookup(name);
    if (!n) return;
    remember(name, n);
    if constexpr (std::is_same_v<T, bool>) {
      out = scalar<bool>(n, name, "a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      out = scalar<std::string>(n, name, "a string");
    } else if constexpr (std::is_integral_v<T>) {
      const std::string text = scalar<std::string>(n, name, "an integer");
      if (!std::regex_match(text, std::regex("[+-]?[0-9]+")))
        fail(n, name, "expected an integer, got '" + text + "'");
      if constexpr (std::is_unsigned_v<T>) {
        if (text.front() == '-') fail(n, name, "expected a non-negative integer");
      }
      out = scalar<T>(n, name, "an integer");
    } else {
      out = scalar<T>(n, name, "a number");
    }
  }

  void field(const std::string& name, Degrees d) {
    double deg = rad2deg(d.rad);
    field(name, deg);
    d.rad = deg2rad(deg);
  }

  void field(const std::string& name, Position3& p) {
    const YAML::Node n = lookup(name);
    if (!n) return;
    remember(name, n);
    p = point(n, name);
  }

  // Passive positions: the four entries after the active one.
  void field(const std::string& name, std::array<Position3, world::kControlled>& all) {
    const YAML::Node n = lookup(name);
    if (!n) return;
    remember(name, n);
    if (!n.IsSequence() || n.size() != world::kPassive)
      fail(n, name, "expected a list of 4 [x, y, z] positions");
    for (int k = 0; k < world::kPassive; ++k) all[k + 1] = point(n[k], name);
  }

  template <typename E>
  void field(const std::string& name, E& out, const EnumNames<E>& names) {
    const YAML::Node n = lookup(name);
    if (!n) return;
    remember(name, n);
    const auto s = scalar<std::string>(n, name, "a name");
    if (!names.parse(s, out))
      fail(n, name, "unknown value '" + s + "' (expected one of: " + names.choices() + ")");
  }

  /// Rejects keys of the root mapping that no section claimed.
  void finish_root() { finish(); }

  /// Line of the entry whose key appears in `message`, if any.
  std::string locate(const std::string& message) const {
    std::string best;
    std::size_t best_len = 0;
    for (const auto& [p, mark] : lines_) {
      const std::string leaf = p.substr(p.rfind('.') + 1);
      if (leaf.size() > best_len && message.find(leaf) != std::string::npos) {
        best = where(source_, mark) + " (" + p + ")";
        best_len = leaf.size();
      }
    }
    return best.empty() ? source_ : best;
  }

 private:
  struct Frame {
    YAML::Node node;
    std::string path;
    std::set<std::string> seen;
  };

  std::string path(const std::string& name) const {
    const auto& prefix = stack_.back().path;
    return prefix.empty() ? name : prefix + "." + name;
  }

  YAML::Node lookup(const std::string& name) {
    Frame& f = stack_.back();
    f.seen.insert(name);
    if (!f.node || f.node.IsNull()) return YAML::Node(YAML::NodeType::Undefined);
    return f.node[name];
  }

  // Values set by --override carry no useful line.
  YAML::Mark mark(const std::string& full, const YAML::Node& n) const {
    return overridden_.count(full) ? YAML::Mark::null_mark() : n.Mark();
  }

  void remember(const std::string& name, const YAML::Node& n) { lines_[path(name)] = mark(path(name), n); }

  void finish() {
    const Frame& f = stack_.back();
    if (!f.node || !f.node.IsMap()) return;
    for (const auto& kv : f.node) {
      const auto key = kv.first.as<std::string>();
      if (!f.seen.count(key)) {
        const std::string full = f.path.empty() ? key : f.path + "." + key;
        throw ConfigError(where(source_, mark(full, kv.first)) + ": unknown key '" + full + "'");
      }
    }
  }

  [[noreturn]] void fail(const YAML::Node& n, const std::string& name, const std::string& what) {
    throw ConfigError(where(source_, mark(path(name), n)) + ": '" + path(name) + "': " + what);
  }

  template <typename T>
  T scalar(const YAML::Node& n, const std::string& name, const char* expected) {
    if (!n.IsScalar()) fail(n, name, std::string("expected ") + expected);
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, name, std::string("expected ") + expected + ", got '" + n.Scalar() + "'");
    }
  }

  Position3 point(const YAML::Node& n, const std::string& name) {
    if (!n.IsSequence() || n.size() != 3) fail(n, name, "expected [x, y, z]");
    Position3 p;
    for (int i = 0; i < 3; ++i) p(i) = scalar<double>(n[i], name, "a number");
    return p;
  }

  std::string source_;
  std::vector<Frame> stack_;
  std::map<std::string, YAML::Mark> lines_;
  std::set<std::string> overridden_;
};

// Shortest text that parses back to the same double.
std::string shortest(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

class Writer {
 public:
  Writer() { out_ << YAML::BeginMap; }

  void section(const std::string& name, const std::function<void()>& body) {
    out_ << YAML::Key << name << YAML::Value << YAML::BeginMap;
    body();
    out_ << YAML::EndMap;
  }

  template <typename T>
  void field(const std::string& name, const T& v) {
    if constexpr (std::is_same_v<T, double>)
      out_ << YAML::Key << name << YAML::Value << shortest(v);
    else
      out_ << YAML::Key << name << YAML::Value << v;
  }
  // Degrees are rounded to 12 digits so 60° does not print as 59.99999999999999.
  void field(const std::string& name, Degrees d) {
    std::ostringstream os;
    os << std::setprecision(12) << rad2deg(d.rad);
    out_ << YAML::Key << name << YAML::Value << os.str();
  }
  void field(const std::string& name, const Position3& p) {
    out_ << YAML::Key << name << YAML::Value;
    point(p);
  }
  void field(const std::string& name, const std::array<Position3, world::kControlled>& all) {
    out_ << YAML::Key << name << YAML::Value << YAML::BeginSeq;
    for (int k = 1; k < world::kControlled; ++k) point(all[k]);
    out_ << YAML::EndSeq;
  }
  template <typename E>
  void field(const std::string& name, const E& v, const EnumNames<E>& names) {
    field(name, names.to_string(v));
  }

  std::string text() {
    out_ << YAML::EndMap;
    return std::string(out_.c_str()) + "\n";
  }

 private:
  void point(const Position3& p) {
    out_ << YAML::Flow << YAML::BeginSeq << shortest(p.x()) << shortest(p.y()) << shortest(p.z())
         << YAML::EndSeq;
  }

  YAML::Emitter out_;
};

std::string apply_override(YAML::Node& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("--override '" + assignment + "': expected key=value");
  const std::string key = assignment.substr(0, eq);
  YAML::Node value;
  try {
    value = YAML::Load(assignment.substr(eq + 1));
  } catch (const YAML::Exception& e) {
    throw ConfigError("--override '" + assignment + "': " + e.msg);
  }
  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string p; std::getline(ss, p, '.');) {
    if (p.empty()) throw ConfigError("--override '" + assignment + "': empty key segment");
    parts.push_back(p);
  }
  // Nodes are handles, so descend by reassignment-free recursion.
  std::function<void(YAML::Node, std::size_t)> set = [&](YAML::Node node, std::size_t i) {
    if (i + 1 == parts.size()) {
      node[parts[i]] = value;
      return;
    }
    YAML::Node child = node[parts[i]];
    if (!child.IsDefined() || child.IsNull()) {
      node[parts[i]] = YAML::Node(YAML::NodeType::Map);
      child = node[parts[i]];
    } else if (!child.IsMap()) {
      throw ConfigError("--override '" + assignment + "': '" + parts[i] + "' is not a section");
    }
    set(child, i + 1);
  };
  set(root, 0);
  return key;
}

}  // namespace

marl::TrainerConfig ExperimentConfig::trainer() const {
  marl::TrainerConfig t;
  t.env = env;
  t.network = network;
  t.learning = learning;
  t.run.scheme = run.scheme;
  t.run.epochs = run.epochs;
  t.run.episodes_per_epoch = run.episodes_per_epoch;
  t.run.seed = run.seed;
  t.run.record_trajectories = run.record_trajectories;
  return t;
}

void ExperimentConfig::validate() const {
  trainer().validate();
  if (run.eval_episodes < 1) throw ValidationError("run.eval_episodes must be >= 1");
  if (run.out_dir.empty()) throw ValidationError("run.out_dir must not be empty");
  if (!(error_constant >= 0.0)) throw ValidationError("positioning.error_constant must be >= 0");
}

ExperimentConfig default_config() { return ExperimentConfig{}; }

ExperimentConfig parse_config(const std::string& text, const std::string& source,
                              const std::vector<std::string>& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(where(source, e.mark) + ": " + e.msg);
  }
  if (root.IsNull() || !root.IsDefined()) root = YAML::Node(YAML::NodeType::Map);
  if (!root.IsMap()) throw ConfigError(where(source, root.Mark()) + ": top level must be a mapping");
  std::set<std::string> overridden;
  for (const auto& o : overrides) overridden.insert(apply_override(root, o));

  ExperimentConfig cfg = default_config();
  Reader reader(root, source, std::move(overridden));
  visit(reader, cfg);
  reader.finish_root();
  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(reader.locate(e.what()) + ": " + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string(), overrides);
}

std::string dump_config(const ExperimentConfig& cfg) {
  ExperimentConfig copy = cfg;
  Writer w;
  visit(w, copy);
  return w.text();
}

}  // namespace fasloc::cli
