#include "fasloc/marl/learning.hpp"

#include <limits>

namespace fasloc::marl {

double td_target(double reward, std::optional<double> next_global_q, double discount) {
  return next_global_q ? reward + discount * *next_global_q : reward;
}

double td_weight(double td_error, double delta) { return td_error < 0.0 ? 1.0 : delta; }

double weighted_loss(std::span<const double> q_global, std::span<const double> q_target,
                     double delta) {
  if (q_global.size() != q_target.size())
    throw ValidationError("weighted_loss: sequence lengths differ");
  double loss = 0.0;
  for (std::size_t t = 0; t < q_global.size(); ++t) {
    const double e = q_global[t] - q_target[t];
    loss += td_weight(e, delta) * e * e;
  }
  return loss;
}

std::vector<double> weighted_loss_grad(std::span<const double> q_global,
                                       std::span<const double> q_target, double delta) {
  if (q_global.size() != q_target.size())
    throw ValidationError("weighted_loss: sequence lengths differ");
  std::vector<double> g(q_global.size());
  for (std::size_t t = 0; t < q_global.size(); ++t) {
    const double e = q_global[t] - q_target[t];
    g[t] = 2.0 * td_weight(e, delta) * e;
  }
  return g;
}

void EpisodeBuffer::clear() {
  features.clear();
  forced_port.clear();
  actions.clear();
  rewards.clear();
}

namespace {

nn::Matrix agent_rows(const EpisodeBuffer& buf, int k, int rows) {
  nn::Matrix m(rows, buf.features.front()[k].size());
  for (int t = 0; t < rows; ++t) m.row(t) = buf.features[t][k];
  return m;
}

// Greedy local value at slot t, restricted to the forced port if one is set.
double greedy_value(const ParameterSet& ps, const nn::RowVector& q, int agent, int forced) {
  if (agent == 0 || forced == 0) return q.maxCoeff();
  double best = -std::numeric_limits<double>::infinity();
  for (int idx : actions_with_port(ps.space(agent), forced)) best = std::max(best, q(idx));
  return best;
}

nn::RowVector context(const ParameterSet& ps, const EpisodeBuffer& buf, int t,
                      Coordinator::Cache* cache) {
  if (ps.coordinator)
    return ps.coordinator->forward(window_tokens(buf, t, ps.arch().network.history_slots), cache);
  return nn::RowVector::Zero(ps.arch().network.omega_width);
}

}  // namespace

nn::Matrix window_tokens(const EpisodeBuffer& buf, int t, int history) {
  if (t < 0 || t >= static_cast<int>(buf.features.size()))
    throw ValidationError("window_tokens: slot out of range");
  const int first = std::max(0, t - history + 1);
  const auto width = buf.features[t][0].size();
  nn::Matrix tokens((t - first + 1) * world::kControlled, width);
  int row = 0;
  for (int s = first; s <= t; ++s)
    for (int k = 0; k < world::kControlled; ++k) tokens.row(row++) = buf.features[s][k];
  return tokens;
}

std::vector<std::array<double, world::kControlled>> td_targets(const ParameterSet& target,
                                                               const EpisodeBuffer& buf,
                                                               const LearningConfig& lc) {
  const int acted = buf.acted();
  const int rows = std::min(static_cast<int>(buf.features.size()), acted + 1);
  std::array<nn::Matrix, world::kControlled> q;
  for (int k = 0; k < world::kControlled; ++k) q[k] = target.local[k].unroll(agent_rows(buf, k, rows));

  std::vector<std::array<double, world::kControlled>> out(acted);
  for (int t = 0; t < acted; ++t) {
    const double r = buf.rewards[t];
    const bool terminal = t == buf.horizon - 1;
    if (terminal) {
      out[t].fill(td_target(r, std::nullopt, lc.discount));
      continue;
    }
    if (t + 1 >= rows) throw ValidationError("td_targets: next-slot features missing");
    nn::RowVector next(world::kControlled);
    for (int k = 0; k < world::kControlled; ++k)
      next(k) = greedy_value(target, q[k].row(t + 1), k,
                             k == 0 ? 0 : buf.forced_port[t + 1][k - 1]);
    switch (target.arch().mixing) {
      case Mixing::Hyper: {
        const double qg = target.mixer->forward(next, context(target, buf, t + 1, nullptr));
        out[t].fill(td_target(r, qg, lc.discount));
        break;
      }
      case Mixing::Sum: out[t].fill(td_target(r, next.sum(), lc.discount)); break;
      case Mixing::None:
        for (int k = 0; k < world::kControlled; ++k) out[t][k] = td_target(r, next(k), lc.discount);
        break;
    }
  }
  return out;
}

LossResult episode_loss(ParameterSet& live, const ParameterSet& target, const EpisodeBuffer& buf,
                        const LearningConfig& lc, std::span<const int> slots, bool backward) {
  const int acted = buf.acted();
  if (acted == 0 || slots.empty()) throw ValidationError("episode_loss: nothing to learn from");
  for (int s : slots)
    if (s < 0 || s >= acted) throw ValidationError("episode_loss: slot out of range");

  std::array<std::vector<LocalQNet::StepCache>, world::kControlled> caches;
  std::array<nn::Matrix, world::kControlled> q;
  for (int k = 0; k < world::kControlled; ++k)
    q[k] = live.local[k].unroll(agent_rows(buf, k, acted), backward ? &caches[k] : nullptr);
  const auto targets = td_targets(target, buf, lc);

  const auto mixing = live.arch().mixing;
  const std::size_t n = slots.size();
  std::vector<nn::RowVector> chosen(n, nn::RowVector(world::kControlled));
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < world::kControlled; ++k) chosen[i](k) = q[k](slots[i], buf.actions[slots[i]][k]);

  LossResult res;
  std::vector<Coordinator::Cache> ccache(n);
  std::vector<Mixer::Cache> mcache(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int s = slots[i];
    switch (mixing) {
      case Mixing::Hyper: {
        const nn::RowVector omega = context(live, buf, s, backward ? &ccache[i] : nullptr);
        res.q_global.push_back(live.mixer->forward(chosen[i], omega, backward ? &mcache[i] : nullptr));
        res.q_target.push_back(targets[s][0]);
        res.inter_agent_messages += world::kControlled;
        if (live.coordinator) res.inter_agent_messages += world::kControlled;
        break;
      }
      case Mixing::Sum:
        res.q_global.push_back(chosen[i].sum());
        res.q_target.push_back(targets[s][0]);
        res.inter_agent_messages += world::kControlled;
        break;
      case Mixing::None:
        for (int k = 0; k < world::kControlled; ++k) {
          res.q_global.push_back(chosen[i](k));
          res.q_target.push_back(targets[s][k]);
        }
        break;
    }
  }
  res.loss = weighted_loss(res.q_global, res.q_target, lc.delta);
  if (!backward) return res;

  const auto g = weighted_loss_grad(res.q_global, res.q_target, lc.delta);
  std::array<nn::Matrix, world::kControlled> dq;
  for (int k = 0; k < world::kControlled; ++k) dq[k] = nn::Matrix::Zero(acted, q[k].cols());
  for (std::size_t i = 0; i < n; ++i) {
    const int s = slots[i];
    nn::RowVector dlocal(world::kControlled);
    switch (mixing) {
      case Mixing::Hyper: {
        nn::RowVector domega;
        live.mixer->backward(mcache[i], g[i], dlocal, domega);
        if (live.coordinator) live.coordinator->backward(ccache[i], domega);
        break;
      }
      case Mixing::Sum: dlocal.setConstant(g[i]); break;
      case Mixing::None:
        for (int k = 0; k < world::kControlled; ++k) dlocal(k) = g[i * world::kControlled + k];
        break;
    }
    for (int k = 0; k < world::kControlled; ++k) dq[k](s, buf.actions[s][k]) += dlocal(k);
  }
  for (int k = 0; k < world::kControlled; ++k) live.local[k].backward(caches[k], dq[k]);
  return res;
}

}  // namespace fasloc::marl
