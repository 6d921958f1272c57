#include "rewsac/nn/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace rewsac::nn {

void sgd_step(ParamVector& params, const ParamVector& grad, double lr) {
  if (grad.size() != params.size()) {
    throw std::invalid_argument("sgd_step: shape mismatch");
  }
  if (!(lr > 0.0)) throw std::invalid_argument("sgd_step: lr must be positive");
  if (!grad.all_finite()) {
    throw std::runtime_error("sgd_step: non-finite gradient");
  }
  params.axpy(-lr, grad);
}

AdamState AdamState::for_size(std::size_t n, double lr_in) {
  AdamState s;
  s.first_moment.assign(n, 0.0);
  s.second_moment.assign(n, 0.0);
  s.lr = lr_in;
  return s;
}

void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grad) {
  std::size_t n = params.size();
  if (grad.size() != n || state.first_moment.size() != n ||
      state.second_moment.size() != n) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  for (double g : grad) {
    if (!std::isfinite(g)) {
      throw std::runtime_error("adam_step: non-finite gradient");
    }
  }
  state.step_count += 1;
  double b1t = 1.0 - std::pow(state.beta1, double(state.step_count));
  double b2t = 1.0 - std::pow(state.beta2, double(state.step_count));
  double* m = state.first_moment.data();
  double* v = state.second_moment.data();
  for (std::size_t i = 0; i < n; ++i) {
    double g = grad[i];
    m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g;
    v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g * g;
    double mhat = m[i] / b1t;
    double vhat = v[i] / b2t;
    params[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
  }
}

void adam_step(AdamState& state, ParamVector& params, const ParamVector& grad) {
  adam_step(state, std::span<double>(params.data(), params.size()),
            std::span<const double>(grad.data(), grad.size()));
}

}  // namespace rewsac::nn
