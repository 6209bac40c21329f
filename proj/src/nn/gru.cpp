#include "fasloc/nn/gru.hpp"

#include <cmath>

namespace fasloc::nn {

namespace {

RowVector sigmoid(const RowVector& x) {
  return x.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

}  // namespace

// Biases live on the input-side maps; the recurrent maps are bias-free.
GruCell::GruCell(int input, int hidden)
    : wz_(input, hidden), uz_(hidden, hidden, false), wr_(input, hidden),
      ur_(hidden, hidden, false), wh_(input, hidden), uh_(hidden, hidden, false) {}

RowVector GruCell::step(const RowVector& x, const RowVector& h_prev, Cache* cache) const {
  if (h_prev.size() != hidden_size()) throw ValidationError("GruCell: hidden size mismatch");
  const Matrix xm = x;
  const Matrix hm = h_prev;
  const RowVector z = sigmoid(wz_.forward(xm).row(0) + uz_.forward(hm).row(0));
  const RowVector r = sigmoid(wr_.forward(xm).row(0) + ur_.forward(hm).row(0));
  const Matrix rh = r.cwiseProduct(h_prev);
  const RowVector cand = (wh_.forward(xm).row(0) + uh_.forward(rh).row(0)).array().tanh().matrix();
  if (cache) *cache = {x, h_prev, z, r, cand};
  return (RowVector::Ones(z.size()) - z).cwiseProduct(h_prev) + z.cwiseProduct(cand);
}

RowVector GruCell::backward(const Cache& c, const RowVector& dh_next, RowVector* dx) {
  const Matrix xm = c.x;
  const Matrix hm = c.h_prev;
  const Matrix rh = c.r.cwiseProduct(c.h_prev);

  RowVector dh_prev = dh_next.cwiseProduct(RowVector::Ones(c.z.size()) - c.z);
  const RowVector dz = dh_next.cwiseProduct(c.candidate - c.h_prev);
  const RowVector dcand = dh_next.cwiseProduct(c.z);

  const Matrix da_h = dcand.cwiseProduct(
      (RowVector::Ones(c.candidate.size()) - c.candidate.cwiseProduct(c.candidate)));
  Matrix dxm = wh_.backward(xm, da_h);
  const RowVector drh = uh_.backward(rh, da_h).row(0);
  const RowVector dr = drh.cwiseProduct(c.h_prev);
  dh_prev += drh.cwiseProduct(c.r);

  const Matrix da_z = dz.cwiseProduct(c.z.cwiseProduct(RowVector::Ones(c.z.size()) - c.z));
  dxm += wz_.backward(xm, da_z);
  dh_prev += uz_.backward(hm, da_z).row(0);

  const Matrix da_r = dr.cwiseProduct(c.r.cwiseProduct(RowVector::Ones(c.r.size()) - c.r));
  dxm += wr_.backward(xm, da_r);
  dh_prev += ur_.backward(hm, da_r).row(0);

  if (dx) *dx = dxm.row(0);
  return dh_prev;
}

void GruCell::init(Rng& rng) {
  for (Linear* l : {&wz_, &uz_, &wr_, &ur_, &wh_, &uh_}) l->init(rng);
}

void GruCell::collect(const std::string& prefix, TensorList& out) {
  wz_.collect(prefix + ".w_z", out);
  uz_.collect(prefix + ".u_z", out);
  wr_.collect(prefix + ".w_r", out);
  ur_.collect(prefix + ".u_r", out);
  wh_.collect(prefix + ".w_h", out);
  uh_.collect(prefix + ".u_h", out);
}

}  // namespace fasloc::nn
