#pragma once

#include <span>
#include <utility>
#include <vector>

#include "rewsac/nn/param_vector.hpp"
#include "rewsac/rng.hpp"

namespace rewsac::nn {

enum class Activation { kRelu, kTanh, kIdentity };

/// Feed-forward network description. Layer i maps layer_dims()[i] to
/// layer_dims()[i+1] and applies activations[i]. Parameters live in a
/// ParamVector with one weight/bias segment pair per layer ("layerN.W" is
/// out x in row-major, "layerN.b" is out).
struct MlpSpec {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden_dims;
  std::size_t output_dim = 0;
  std::vector<Activation> activations;

  static MlpSpec make(std::size_t in, std::vector<std::size_t> hidden,
                      std::size_t out,
                      Activation hidden_act = Activation::kRelu,
                      Activation output_act = Activation::kIdentity);

  std::size_t layer_count() const { return hidden_dims.size() + 1; }
  std::vector<std::size_t> layer_dims() const;
  std::size_t param_count() const;

  /// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  ParamVector init_params(Rng& rng) const;
  ParamVector zero_params() const;

  /// Throws on any dimension or layout mismatch.
  void validate(const ParamVector& params) const;
};

/// Layer values kept from a forward pass so backward can reuse them.
/// Reusable across calls to avoid allocation in hot loops.
struct MlpWorkspace {
  std::vector<std::vector<double>> post;  // post[0]=input, post[i]=layer i out
  std::vector<std::vector<double>> pre;   // pre[i]=layer i pre-activation
};

void mlp_forward(const MlpSpec& spec, const ParamVector& params,
                 std::span<const double> input, MlpWorkspace& ws);

std::vector<double> mlp_eval(const MlpSpec& spec, const ParamVector& params,
                             std::span<const double> input);

/// Backprop of upstream . output through a stored forward pass. Accumulates
/// into grad_params if non-null; writes d(upstream . output)/d input into
/// grad_input if non-null.
void mlp_backward(const MlpSpec& spec, const ParamVector& params,
                  const MlpWorkspace& ws, std::span<const double> upstream,
                  ParamVector* grad_params, std::vector<double>* grad_input);

std::pair<ParamVector, std::vector<double>> mlp_grad(
    const MlpSpec& spec, const ParamVector& params,
    std::span<const double> input, std::span<const double> upstream);

}  // namespace rewsac::nn
