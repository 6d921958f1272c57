#pragma once

#include <span>
#include <vector>

#include "rewsac/nn/param_vector.hpp"
#include "rewsac/rng.hpp"

namespace rewsac::nn {

/// Single GRU cell. Gate convention:
///   z = sigmoid(Wz x + Uz h + bz)
///   r = sigmoid(Wr x + Ur h + br)
///   c = tanh(Wh x + Uh (r * h) + bh)
///   h' = (1 - z) * h + z * c
/// Parameter segments, in order: Wz, Uz, bz, Wr, Ur, br, Wh, Uh, bh.
struct GruSpec {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;

  std::size_t param_count() const {
    return 3 * (hidden_dim * input_dim + hidden_dim * hidden_dim + hidden_dim);
  }
  ParamVector zero_params() const;
  /// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  ParamVector init_params(Rng& rng) const;
  void validate(const ParamVector& params) const;
};

/// Values stored during a forward step, consumed by the backward pass.
struct GruStepCache {
  std::vector<double> x, h_prev, z, r, cand, rh;
};

void gru_step(const GruSpec& spec, const ParamVector& params,
              std::span<const double> hidden, std::span<const double> input,
              std::vector<double>& hidden_out, GruStepCache* cache = nullptr);

std::vector<double> gru_step(const GruSpec& spec, const ParamVector& params,
                             std::span<const double> hidden,
                             std::span<const double> input);

/// Runs the cell over a sequence from h0 = 0. hidden_out[t] is the state
/// after consuming inputs[t]; caches (if given) enable a backward pass.
void gru_forward_sequence(const GruSpec& spec, const ParamVector& params,
                          std::span<const std::vector<double>> inputs,
                          std::vector<std::vector<double>>& hidden_out,
                          std::vector<GruStepCache>* caches = nullptr);

/// Accumulates d(sum_t upstreams[t] . h_t)/d params into grad_accum given the
/// caches of a forward pass (backprop through time).
void gru_backward_sequence(const GruSpec& spec, const ParamVector& params,
                           std::span<const GruStepCache> caches,
                           std::span<const std::vector<double>> upstreams,
                           ParamVector& grad_accum);

/// Gradient of sum_t upstreams[t] . h_t with respect to the parameters for a
/// sequence started at h0 = 0. Sequences must be nonempty and equal length.
ParamVector gru_sequence_grad(const GruSpec& spec, const ParamVector& params,
                              std::span<const std::vector<double>> inputs,
                              std::span<const std::vector<double>> upstreams);

}  // namespace rewsac::nn
