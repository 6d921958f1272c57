#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rewsac/nn/param_vector.hpp"

namespace rewsac::nn {

/// Exact plain gradient step: params -= lr * grad.
/// Throws if grad contains non-finite values or shapes disagree.
void sgd_step(ParamVector& params, const ParamVector& grad, double lr);

/// Bias-corrected Adam state for one parameter vector.
struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::int64_t step_count = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_size(std::size_t n, double lr);
};

void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grad);
void adam_step(AdamState& state, ParamVector& params, const ParamVector& grad);

}  // namespace rewsac::nn
