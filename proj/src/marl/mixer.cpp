#include "fasloc/marl/mixer.hpp"

namespace fasloc::marl {

namespace {

nn::Matrix maybe_abs(const nn::Matrix& m, bool on) { return on ? nn::Matrix(m.cwiseAbs()) : m; }

// d|x|/dx with the subgradient 1 at zero, matching the forward value there.
nn::Matrix abs_backward(const nn::Matrix& raw, const nn::Matrix& d, bool on) {
  if (!on) return d;
  return d.array() * raw.array().unaryExpr([](double x) { return x < 0.0 ? -1.0 : 1.0; });
}

}  // namespace

Mixer::Mixer(int agents, int omega_width, int hidden, bool monotone, nn::Activation activation)
    : hyper_w1(omega_width, agents * hidden),
      hyper_b1(omega_width, hidden),
      hyper_w2(omega_width, hidden),
      hyper_b2({omega_width, hidden, 1}),
      agents_(agents),
      hidden_(hidden),
      monotone_(monotone),
      activation_(activation) {}

double Mixer::forward(const nn::RowVector& q, const nn::RowVector& omega, Cache* cache) const {
  if (q.size() != agents_) throw ValidationError("mixer: expected one q-value per agent");
  const nn::Matrix om = omega;
  const nn::RowVector w1_flat = hyper_w1.forward(om).row(0);
  const nn::Matrix w1_raw = Eigen::Map<const nn::Matrix>(w1_flat.data(), agents_, hidden_);
  const nn::Matrix w1 = maybe_abs(w1_raw, monotone_);
  const nn::RowVector b1 = hyper_b1.forward(om).row(0);
  const nn::RowVector pre = q * w1 + b1;
  const nn::RowVector h = nn::activate(pre, activation_);
  const nn::RowVector w2_raw = hyper_w2.forward(om).row(0);
  const nn::RowVector w2 = maybe_abs(w2_raw, monotone_);
  nn::Mlp::Cache* bc = cache ? &cache->b2 : nullptr;
  const double b2 = hyper_b2.forward(om, bc)(0, 0);
  if (cache) {
    cache->q = q;
    cache->omega = omega;
    cache->w1_raw = w1_raw;
    cache->b1 = b1;
    cache->pre = pre;
    cache->hidden = h;
    cache->w2_raw = w2_raw;
  }
  return h.dot(w2) + b2;
}

void Mixer::backward(const Cache& c, double dq_global, nn::RowVector& dq, nn::RowVector& domega) {
  const nn::Matrix om = c.omega;
  const nn::RowVector w2 = maybe_abs(c.w2_raw, monotone_);
  const nn::Matrix w1 = maybe_abs(c.w1_raw, monotone_);

  const nn::RowVector dh = dq_global * w2;
  const nn::RowVector dw2_raw = abs_backward(c.w2_raw, dq_global * c.hidden, monotone_);
  const nn::RowVector dpre = nn::activate_backward(c.pre, dh, activation_).row(0);
  const nn::Matrix dw1 = c.q.transpose() * dpre;  // agents × hidden
  const nn::Matrix dw1_raw = abs_backward(c.w1_raw, dw1, monotone_);
  const nn::RowVector dw1_flat = Eigen::Map<const nn::RowVector>(dw1_raw.data(), dw1_raw.size());

  dq = dpre * w1.transpose();
  domega = hyper_w1.backward(om, dw1_flat).row(0);
  domega += hyper_b1.backward(om, dpre).row(0);
  domega += hyper_w2.backward(om, dw2_raw).row(0);
  nn::Matrix db2(1, 1);
  db2(0, 0) = dq_global;
  domega += hyper_b2.backward(c.b2, db2).row(0);
}

void Mixer::init(Rng& rng) {
  hyper_w1.init(rng);
  hyper_b1.init(rng);
  hyper_w2.init(rng);
  hyper_b2.init(rng);
}

void Mixer::collect(const std::string& prefix, nn::TensorList& out) {
  hyper_w1.collect(prefix + ".hyper_w1", out);
  hyper_b1.collect(prefix + ".hyper_b1", out);
  hyper_w2.collect(prefix + ".hyper_w2", out);
  hyper_b2.collect(prefix + ".hyper_b2", out);
}

void Mixer::set_identity() {
  hyper_w1.weight.value.setZero();
  hyper_w1.bias.value.setZero();
  // Agent k feeds hidden unit 0 with weight 1.
  for (int k = 0; k < agents_; ++k) hyper_w1.bias.value(0, k) = 1.0;
  hyper_b1.weight.value.setZero();
  hyper_b1.bias.value.setZero();
  hyper_w2.weight.value.setZero();
  hyper_w2.bias.value.setZero();
  hyper_w2.bias.value(0, 0) = 1.0;
  for (auto& l : hyper_b2.layers()) {
    l.weight.value.setZero();
    if (l.has_bias()) l.bias.value.setZero();
  }
}

}  // namespace fasloc::marl
