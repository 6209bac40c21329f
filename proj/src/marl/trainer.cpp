#include "fasloc/marl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>

namespace fasloc::marl {

namespace {

// Stream tags; every random consumer of a run gets its own stream.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kEnvStream = 2;
constexpr std::uint64_t kActStream = 3;
constexpr std::uint64_t kEvalStream = 1000;

}  // namespace

void RunSettings::validate() const {
  if (epochs < 1) throw ValidationError("run.epochs must be >= 1");
  if (episodes_per_epoch < 1) throw ValidationError("run.episodes_per_epoch must be >= 1");
}

void TrainerConfig::validate() const {
  env.validate();
  network.validate();
  learning.validate();
  run.validate();
}

double TrainingLog::tail_error(int n) const {
  if (epochs.empty()) return 0.0;
  const int count = std::min<int>(n, static_cast<int>(epochs.size()));
  double s = 0.0;
  for (auto it = epochs.end() - count; it != epochs.end(); ++it) s += it->mean_error;
  return s / count;
}

std::string TrainingLog::serialize() const {
  std::ostringstream os;
  os << std::hexfloat;
  auto point = [&os](const Position3& p) { os << ' ' << p.x() << ' ' << p.y() << ' ' << p.z(); };
  os << "log " << scheme_name(scheme) << ' ' << seed << ' ' << updates << ' ' << inter_agent_messages
     << '\n';
  for (const auto& e : epochs)
    os << "epoch " << e.epoch << ' ' << e.mean_error << ' ' << e.mean_reward << ' ' << e.loss << ' '
       << e.violations << ' ' << e.epsilon << ' ' << e.feasible_rate << '\n';
  for (const auto& t : trajectories) {
    os << "trajectory " << t.epoch << ' ' << t.target.size() << '\n';
    for (std::size_t s = 0; s < t.target.size(); ++s) {
      for (const auto& u : t.uavs[s]) point(u);
      point(t.target[s]);
      point(t.estimate[s]);
      os << '\n';
    }
  }
  return os.str();
}

Trainer::Trainer(TrainerConfig cfg) : cfg_(std::move(cfg)), env_(cfg_.env) {
  cfg_.validate();
  const auto arch = Architecture::for_scheme(cfg_.run.scheme, cfg_.network,
                                             cfg_.env.channel.port_count, cfg_.env.channel.path_count);
  live_ = std::make_unique<ParameterSet>(arch);
  target_ = std::make_unique<ParameterSet>(arch);
  Rng init_rng(mix_seed(cfg_.run.seed, kInitStream));
  live_->init(init_rng);
  target_->copy_from(*live_);
  optimizer_ = std::make_unique<nn::Optimizer>(live_->collect(), cfg_.learning.optimizer);
  buffer_.horizon = cfg_.env.world.slots_per_episode;
}

double Trainer::epsilon_at(int epoch) const {
  const auto& l = cfg_.learning;
  const double span = std::max(1.0, l.epsilon_anneal_fraction * cfg_.run.epochs);
  const double frac = std::min(1.0, epoch / span);
  return l.epsilon_start + (l.epsilon_end - l.epsilon_start) * frac;
}

std::array<Action, world::kControlled> Trainer::act(
    const std::array<nn::RowVector, world::kControlled>& f,
    const std::array<int, world::kPassive>& forced,
    std::array<nn::RowVector, world::kControlled>& h, double epsilon, Rng& rng) const {
  std::array<Action, world::kControlled> out;
  const Scheme scheme = cfg_.run.scheme;
  for (int k = 0; k < world::kControlled; ++k) {
    const ActionSpace& space = live_->space(k);
    if (scheme == Scheme::Random) {
      std::uniform_int_distribution<int> pick(0, space.size() - 1);
      out[k] = space.decode(pick(rng));
      continue;
    }
    const nn::RowVector q = live_->local[k].step(f[k], h[k]);
    if (k > 0 && forced[k - 1] > 0) {
      const auto idx = actions_with_port(space, forced[k - 1]);
      std::vector<double> sub(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) sub[i] = q(idx[i]);
      out[k] = space.decode(idx[select_action(sub, epsilon, rng)]);
    } else {
      out[k] = space.decode(select_action({q.data(), static_cast<std::size_t>(q.size())}, epsilon, rng));
    }
  }
  return out;
}

double Trainer::update(Rng& rng) {
  const int acted = buffer_.acted();
  std::vector<int> slots(acted);
  std::iota(slots.begin(), slots.end(), 0);
  const int n = std::min(cfg_.learning.batch_slots, acted);
  if (n < acted) {
    std::shuffle(slots.begin(), slots.end(), rng);
    slots.resize(n);
    std::sort(slots.begin(), slots.end());
  }
  const auto params = live_->collect();
  nn::zero_grads(params);
  const LossResult res = episode_loss(*live_, *target_, buffer_, cfg_.learning, slots, true);
  if (!std::isfinite(res.loss) || !std::isfinite(nn::grad_norm(params))) {
    std::cerr << "non-finite loss after " << updates_ << " updates (scheme "
              << scheme_name(cfg_.run.scheme) << ", seed " << cfg_.run.seed << ")\n";
    for (std::size_t i = 0; i < res.q_global.size(); ++i)
      std::cerr << "  Q_G=" << res.q_global[i] << " Q_T=" << res.q_target[i] << '\n';
    for (const auto& p : params)
      if (!p.tensor->finite()) std::cerr << "  non-finite tensor " << p.name << '\n';
    throw std::runtime_error("training aborted: non-finite loss");
  }
  optimizer_->step();
  ++updates_;
  messages_ += res.inter_agent_messages;
  if (updates_ % static_cast<std::size_t>(cfg_.learning.target_sync) == 0) target_->copy_from(*live_);
  return res.loss;
}

EpisodeStats Trainer::run_episode(double epsilon, bool learn, Rng& env_rng, Rng& act_rng,
                                  TrajectoryRecord* traj) {
  const Scheme scheme = cfg_.run.scheme;
  const int paths = cfg_.env.channel.path_count;
  const int ports = cfg_.env.channel.port_count;
  learn = learn && scheme != Scheme::Random;

  env_.reset(env_rng);
  buffer_.clear();
  std::array<Action, world::kControlled> prev{};
  std::array<nn::RowVector, world::kControlled> h;
  for (int k = 0; k < world::kControlled; ++k) h[k] = live_->local[k].initial_state();

  auto push_slot = [&]() {
    std::array<nn::RowVector, world::kControlled> f;
    for (int k = 0; k < world::kControlled; ++k)
      f[k] = agent_features(env_.observations()[k], prev[k], paths, ports);
    buffer_.features.push_back(std::move(f));
    std::array<int, world::kPassive> forced{};
    if (scheme == Scheme::NoFas) {
      std::uniform_int_distribution<int> port(1, ports);
      for (int& p : forced) p = port(act_rng);
    }
    buffer_.forced_port.push_back(forced);
  };
  push_slot();

  EpisodeStats stats;
  const int update_every = cfg_.learning.update_every;
  while (!env_.done()) {
    const int t = env_.slot();
    const auto actions = act(buffer_.features[t], buffer_.forced_port[t], h, epsilon, act_rng);
    std::array<int, world::kControlled> idx;
    for (int k = 0; k < world::kControlled; ++k) idx[k] = live_->space(k).encode(actions[k]);
    buffer_.actions.push_back(idx);

    const StepResult r = env_.step(actions, env_rng);
    buffer_.rewards.push_back(cfg_.learning.reward_scale *
                              std::max(r.reward, -cfg_.learning.penalty_cap));
    stats.mean_error += r.error;
    stats.mean_reward += r.reward;
    stats.violations += r.report.feasible ? 0 : 1;
    ++stats.slots;
    if (traj) {
      traj->uavs.push_back(env_.state().uavs);
      traj->target.push_back(env_.state().target);
      traj->estimate.push_back(r.estimate.position);
    }
    prev = actions;
    if (!r.terminal) push_slot();
    if (learn && update_every > 0 && ((t + 1) % update_every == 0 || r.terminal)) {
      stats.loss += update(act_rng);
      ++stats.updates;
    }
  }
  if (learn && update_every == 0) {
    stats.loss += update(act_rng);
    ++stats.updates;
  }
  stats.mean_error /= stats.slots;
  stats.mean_reward /= stats.slots;
  return stats;
}

TrainingLog Trainer::train() {
  TrainingLog log;
  log.scheme = cfg_.run.scheme;
  log.seed = cfg_.run.seed;
  Rng env_rng(mix_seed(cfg_.run.seed, kEnvStream));
  Rng act_rng(mix_seed(cfg_.run.seed, kActStream));

  for (int epoch = 0; epoch < cfg_.run.epochs; ++epoch) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.epsilon = epsilon_at(epoch);
    int updates = 0, slots = 0;
    for (int e = 0; e < cfg_.run.episodes_per_epoch; ++e) {
      const bool record = cfg_.run.record_trajectories && e == cfg_.run.episodes_per_epoch - 1;
      TrajectoryRecord traj;
      traj.epoch = epoch;
      const EpisodeStats s = run_episode(rec.epsilon, true, env_rng, act_rng, record ? &traj : nullptr);
      rec.mean_error += s.mean_error;
      rec.mean_reward += s.mean_reward;
      rec.violations += s.violations;
      rec.loss += s.loss;
      updates += s.updates;
      slots += s.slots;
      if (record) log.trajectories.push_back(std::move(traj));
    }
    rec.mean_error /= cfg_.run.episodes_per_epoch;
    rec.mean_reward /= cfg_.run.episodes_per_epoch;
    rec.loss = updates > 0 ? rec.loss / updates : 0.0;
    rec.feasible_rate = 1.0 - static_cast<double>(rec.violations) / slots;
    log.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  log.updates = updates_;
  log.inter_agent_messages = messages_;
  return log;
}

EvalSummary Trainer::evaluate(int episodes, std::uint64_t seed) {
  if (episodes < 1) throw ValidationError("evaluate: episodes must be >= 1");
  EvalSummary out;
  out.episodes = episodes;
  std::vector<double> errors;
  int violations = 0, slots = 0;
  double reward = 0.0;
  for (int e = 0; e < episodes; ++e) {
    Rng env_rng(mix_seed(seed, kEvalStream + 2 * e));
    Rng act_rng(mix_seed(seed, kEvalStream + 2 * e + 1));
    const EpisodeStats s = run_episode(0.0, false, env_rng, act_rng, nullptr);
    errors.push_back(s.mean_error);
    violations += s.violations;
    slots += s.slots;
    reward += s.mean_reward;
  }
  out.mean_error = std::accumulate(errors.begin(), errors.end(), 0.0) / episodes;
  double var = 0.0;
  for (double x : errors) var += (x - out.mean_error) * (x - out.mean_error);
  out.std_error = episodes > 1 ? std::sqrt(var / (episodes - 1)) : 0.0;
  out.violation_rate = static_cast<double>(violations) / slots;
  out.mean_reward = reward / episodes;
  return out;
}

TrainingLog run_baseline(Scheme kind, TrainerConfig cfg) {
  cfg.run.scheme = kind;
  Trainer trainer(std::move(cfg));
  return trainer.train();
}

}  // namespace fasloc::marl
