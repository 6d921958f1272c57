#pragma once

#include <functional>

#include "rewsac/nn/param_vector.hpp"

namespace rewsac::nn {

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::size_t worst_index = 0;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
  bool pass = false;
};

/// Central-difference check of an analytic gradient of a scalar function.
/// Relative error is measured against the dominant gradient magnitude so
/// near-zero coordinates are judged on the overall scale:
///   err_i = |analytic_i - fd_i| / max(||analytic||_inf, ||fd||_inf, 1e-12)
GradCheckReport finite_diff_check(
    const std::function<double(const ParamVector&)>& f, const ParamVector& at,
    const ParamVector& analytic, double fd_step, double tolerance);

}  // namespace rewsac::nn
