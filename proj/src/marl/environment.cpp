#include "fasloc/marl/environment.hpp"

#include <vector>

namespace fasloc::marl {

void EnvironmentConfig::validate() const {
  world.validate();
  target.validate();
  channel.validate();
  if (solver.max_iterations < 1) throw ValidationError("solver.max_iterations must be > 0");
  if (!(variance_scale >= 0.0)) throw ValidationError("variance_scale must be >= 0");
  if (!(latency_threshold > 0.0)) throw ValidationError("latency_threshold must be > 0");
  if (min_measurements < 3 || min_measurements > world::kPassive)
    throw ValidationError("min_measurements must lie in [3, 4]");
}

double shared_reward(const Position3& estimate, const Position3& truth,
                     const world::ConstraintReport& report) {
  if (!report.feasible) return kInfeasiblePenalty;
  return -positioning::positioning_error(estimate, truth);
}

Environment::Environment(EnvironmentConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  Rng channel_rng(cfg_.channel_seed);
  static_draw_ = channel::draw_channel(cfg_.channel, world::kPassive, channel_rng);
}

void Environment::reset(Rng& rng) {
  world_ = world::WorldState::initial(cfg_.world);
  target_ = world::TargetState{};
  target_.position = world_.target;
  last_measurement_.fill(0.0);
  Position3 centroid = Position3::Zero();
  for (int k = 1; k < world::kControlled; ++k) centroid += world_.uavs[k];
  estimate_ = centroid / world::kPassive;
  draw_slot_channel(rng);
  refresh_observations();
}

void Environment::draw_slot_channel(Rng& rng) {
  if (cfg_.channel.coherence == channel::Coherence::PerSlot) {
    draw_ = channel::draw_channel(cfg_.channel, world::kPassive, rng);
  } else {
    draw_ = static_draw_;
    channel::redraw_shadowing(draw_, cfg_.channel, rng);
  }
}

void Environment::refresh_observations() {
  for (int k = 0; k < world::kControlled; ++k)
    obs_[k] = build_observation(k, world_, draw_, k == 0 ? 0.0 : last_measurement_[k - 1]);
}

StepResult Environment::step(const std::array<Action, world::kControlled>& actions, Rng& rng) {
  if (done()) throw ValidationError("episode already finished; call reset()");
  const ActionSpace active_space(false, cfg_.channel.port_count);
  const ActionSpace passive_space(true, cfg_.channel.port_count);

  for (int k = 0; k < world::kControlled; ++k) {
    const auto angles = (k == 0 ? active_space : passive_space).angles(actions[k], cfg_.world);
    world_.last_angles[k] = angles;
    world_.uavs[k] = world::step_controlled(world_.uavs[k], angles, cfg_.world);
    if (k > 0) world_.ports[k - 1] = actions[k].port;
  }
  world_.target = world::step_target(target_, cfg_.target, cfg_.world, rng);
  ++world_.slot;

  StepResult out;
  const Position3& active = world_.uavs[0];
  const Position3& target = world_.target;

  // Range sums measured at each passive UAV.
  std::array<std::optional<positioning::RangeMeasurement>, world::kPassive> meas;
  for (int k = 0; k < world::kPassive; ++k) {
    const Position3& qk = world_.uavs[k + 1];
    double snr = 0.0;
    try {
      snr = channel::bistatic_snr(active, qk, target, cfg_.channel);
    } catch (const DomainError&) {
      snr = 0.0;
    }
    if (snr > 0.0) {
      const auto range = positioning::true_range_sum(active, qk, target, cfg_.world.light_speed);
      meas[k] = positioning::sample_range(range, snr, cfg_.variance_scale, rng, k + 1);
    }
    if (meas[k]) last_measurement_[k] = meas[k]->measured;
  }

  // Uplink of the measurements to the BS through the selected FAS ports.
  std::vector<channel::Complex> gains(world::kPassive);
  for (int k = 0; k < world::kPassive; ++k) {
    const double r = (world_.uavs[k + 1] - cfg_.world.bs_position).norm();
    const double loss = channel::path_loss_db(std::max(r, cfg_.channel.reference_distance),
                                              draw_.uavs[k].shadowing_db, cfg_.channel);
    gains[k] = channel::fas_gain(draw_.uavs[k], world_.ports[k], loss, cfg_.channel);
  }
  const auto sinr = channel::uplink_sinr(gains, cfg_.channel);
  for (int k = 0; k < world::kPassive; ++k) {
    out.sinr[k] = sinr[k];
    out.latency[k] = channel::uplink_latency(sinr[k], cfg_.channel);
  }
  out.report = world::check_constraints(world_, out.latency, cfg_.world, cfg_.latency_threshold,
                                        cfg_.channel.port_count);

  // Only measurements that arrive within the latency budget are used.
  std::vector<positioning::Observation> delivered;
  for (int k = 0; k < world::kPassive; ++k)
    if (meas[k] && out.latency[k] <= cfg_.latency_threshold)
      delivered.push_back({world_.uavs[k + 1], meas[k]->measured});
  out.delivered = static_cast<int>(delivered.size());
  if (out.delivered >= cfg_.min_measurements) {
    out.estimate = positioning::estimate_position(delivered, active, estimate_, cfg_.solver);
    if (out.estimate.position.allFinite()) estimate_ = out.estimate.position;
  }
  out.estimate.position = estimate_;
  out.error = positioning::positioning_error(estimate_, target);
  out.reward = shared_reward(estimate_, target, out.report);
  out.terminal = done();

  if (!out.terminal) {
    draw_slot_channel(rng);
    refresh_observations();
  }
  return out;
}

}  // namespace fasloc::marl
