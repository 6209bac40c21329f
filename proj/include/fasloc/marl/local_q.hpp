#pragma once

#include <vector>

#include "fasloc/nn/gru.hpp"
#include "fasloc/nn/mlp.hpp"

namespace fasloc::marl {

/// Per-agent Q-network Ψ_k: input MLP → GRU → two output heads. The movement
/// head scores the 25 yaw/pitch pairs; passive agents add a port head over the
/// N ports, and Q(move, port) = Q_move(move) + Q_port(port). With
/// `recurrent == false` the GRU is bypassed and the hidden state is tanh of the
/// input embedding, so Q depends on the current slot only.
class LocalQNet {
 public:
  struct StepCache {
    nn::Mlp::Cache input;
    nn::GruCell::Cache gru;
    nn::Mlp::Cache head;
    nn::Mlp::Cache port_head;
    nn::RowVector embed;  // input MLP output
    nn::RowVector hidden;
  };

  LocalQNet() = default;
  /// `port_count` == 0 gives a movement-only network (active UAV).
  LocalQNet(int feature_width, int hidden, int port_count, bool recurrent);

  /// One slot. Returns Q over all actions; `h` is updated in place.
  nn::RowVector step(const nn::RowVector& features, nn::RowVector& h, StepCache* cache = nullptr) const;

  /// Runs a whole episode from a zero hidden state; row t of the result is Q at slot t.
  nn::Matrix unroll(const nn::Matrix& features, std::vector<StepCache>* caches = nullptr) const;

  /// Backpropagation through time. `dq` row t is dL/dQ_t (T × |A|).
  void backward(const std::vector<StepCache>& caches, const nn::Matrix& dq);

  void init(Rng& rng);
  void collect(const std::string& prefix, nn::TensorList& out);

  int hidden_size() const { return hidden_; }
  int action_count() const { return ports_ > 0 ? head_.out() * ports_ : head_.out(); }
  int port_count() const { return ports_; }
  bool recurrent() const { return recurrent_; }
  nn::RowVector initial_state() const { return nn::RowVector::Zero(hidden_); }

 private:
  nn::Mlp input_;
  nn::GruCell gru_;
  nn::Mlp head_;
  nn::Mlp port_head_;
  int ports_ = 0;
  int hidden_ = 0;
  bool recurrent_ = true;
};

}  // namespace fasloc::marl
