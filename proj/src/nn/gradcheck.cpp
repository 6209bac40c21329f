#include "fasloc/nn/gradcheck.hpp"

#include <cmath>

namespace fasloc::nn {

GradCheckResult finite_diff_check(const std::function<double()>& loss, const TensorList& params,
                                  const GradCheckOptions& options) {
  GradCheckResult result;
  const int stride = std::max(1, options.stride);
  for (const auto& p : params) {
    Tensor& t = *p.tensor;
    for (Eigen::Index i = 0; i < t.value.size(); i += stride) {
      double& w = t.value.data()[i];
      const double saved = w;
      w = saved + options.epsilon;
      const double up = loss();
      w = saved - options.epsilon;
      const double down = loss();
      w = saved;
      const double numeric = (up - down) / (2.0 * options.epsilon);
      const double analytic = t.grad.data()[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), options.floor});
      const double rel = std::abs(analytic - numeric) / denom;
      ++result.checked;
      if (rel > result.max_rel_error || !std::isfinite(rel)) {
        result.max_rel_error = std::isfinite(rel) ? rel : INFINITY;
        result.worst_param = p.name;
        result.worst_index = i;
        result.analytic = analytic;
        result.numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace fasloc::nn
