#pragma once

#include <functional>
#include <string>

#include "fasloc/nn/tensor.hpp"

namespace fasloc::nn {

struct GradCheckOptions {
  double epsilon = 1e-6;
  /// Denominator floor for the relative error: |a − n| / max(|a|, |n|, floor).
  double floor = 1e-7;
  /// Check every `stride`-th entry of each tensor (1 = all).
  int stride = 1;
};

struct GradCheckResult {
  double max_rel_error = 0;
  std::string worst_param;
  Eigen::Index worst_index = -1;
  double analytic = 0;
  double numeric = 0;
  std::size_t checked = 0;
};

/// Compares the gradients already stored in `params` against central
/// differences of the scalar function `loss`. `loss` must read the current
/// parameter values and have no side effects on them.
GradCheckResult finite_diff_check(const std::function<double()>& loss, const TensorList& params,
                                  const GradCheckOptions& options = {});

}  // namespace fasloc::nn
