#include "fasloc/marl/local_q.hpp"

#include "fasloc/marl/spaces.hpp"

namespace fasloc::marl {

LocalQNet::LocalQNet(int feature_width, int hidden, int port_count, bool recurrent)
    : input_({feature_width, hidden, hidden}),
      head_({hidden, hidden, kMoveActions}),
      ports_(port_count),
      hidden_(hidden),
      recurrent_(recurrent) {
  if (recurrent_) gru_ = nn::GruCell(hidden, hidden);
  if (ports_ > 0) port_head_ = nn::Mlp({hidden, hidden, ports_});
}

nn::RowVector LocalQNet::step(const nn::RowVector& features, nn::RowVector& h,
                              StepCache* cache) const {
  nn::Mlp::Cache* ic = cache ? &cache->input : nullptr;
  const nn::RowVector e = input_.forward(features, ic).row(0);
  if (recurrent_) {
    h = gru_.step(e, h, cache ? &cache->gru : nullptr);
  } else {
    h = e.array().tanh().matrix();
  }
  if (cache) {
    cache->embed = e;
    cache->hidden = h;
  }
  const nn::RowVector move = head_.forward(h, cache ? &cache->head : nullptr).row(0);
  if (ports_ == 0) return move;
  const nn::RowVector port = port_head_.forward(h, cache ? &cache->port_head : nullptr).row(0);
  // Flat index m·N + (n − 1), matching ActionSpace.
  nn::RowVector q(move.size() * ports_);
  for (Eigen::Index m = 0; m < move.size(); ++m)
    q.segment(m * ports_, ports_) = move(m) + port.array();
  return q;
}

nn::Matrix LocalQNet::unroll(const nn::Matrix& features, std::vector<StepCache>* caches) const {
  const auto T = features.rows();
  nn::Matrix q(T, action_count());
  nn::RowVector h = initial_state();
  if (caches) caches->assign(T, StepCache{});
  for (Eigen::Index t = 0; t < T; ++t)
    q.row(t) = step(features.row(t), h, caches ? &(*caches)[t] : nullptr);
  return q;
}

void LocalQNet::backward(const std::vector<StepCache>& caches, const nn::Matrix& dq) {
  nn::RowVector dh_carry = nn::RowVector::Zero(hidden_);
  for (auto t = static_cast<Eigen::Index>(caches.size()) - 1; t >= 0; --t) {
    const StepCache& c = caches[t];
    nn::RowVector dh = dh_carry;
    if (ports_ == 0) {
      dh += head_.backward(c.head, dq.row(t)).row(0);
    } else {
      const nn::RowVector row = dq.row(t);
      const nn::Matrix grid = row.reshaped(ports_, kMoveActions);  // column m holds move m
      dh += head_.backward(c.head, grid.colwise().sum()).row(0);
      dh += port_head_.backward(c.port_head, grid.rowwise().sum().transpose()).row(0);
    }
    nn::RowVector de;
    if (recurrent_) {
      dh_carry = gru_.backward(c.gru, dh, &de);
    } else {
      de = dh.array() * (1.0 - c.hidden.array().square());
    }
    input_.backward(c.input, de);
  }
}

void LocalQNet::init(Rng& rng) {
  input_.init(rng);
  if (recurrent_) gru_.init(rng);
  head_.init(rng);
  if (ports_ > 0) port_head_.init(rng);
}

void LocalQNet::collect(const std::string& prefix, nn::TensorList& out) {
  input_.collect(prefix + ".in", out);
  if (recurrent_) gru_.collect(prefix + ".gru", out);
  head_.collect(prefix + ".move", out);
  if (ports_ > 0) port_head_.collect(prefix + ".port", out);
}

}  // namespace fasloc::marl
