#include "rewsac/nn/mlp.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace rewsac::nn {

namespace {

double apply_act(Activation a, double x) {
  switch (a) {
    case Activation::kRelu:
      return x > 0.0 ? x : 0.0;
    case Activation::kTanh:
      return std::tanh(x);
    case Activation::kIdentity:
      return x;
  }
  return x;
}

// Derivative expressed through pre-activation x and post-activation y.
double act_deriv(Activation a, double x, double y) {
  switch (a) {
    case Activation::kRelu:
      return x > 0.0 ? 1.0 : 0.0;
    case Activation::kTanh:
      return 1.0 - y * y;
    case Activation::kIdentity:
      return 1.0;
  }
  return 1.0;
}

}  // namespace

MlpSpec MlpSpec::make(std::size_t in, std::vector<std::size_t> hidden,
                      std::size_t out, Activation hidden_act,
                      Activation output_act) {
  MlpSpec spec;
  spec.input_dim = in;
  spec.hidden_dims = std::move(hidden);
  spec.output_dim = out;
  spec.activations.assign(spec.hidden_dims.size(), hidden_act);
  spec.activations.push_back(output_act);
  return spec;
}

std::vector<std::size_t> MlpSpec::layer_dims() const {
  std::vector<std::size_t> dims;
  dims.reserve(hidden_dims.size() + 2);
  dims.push_back(input_dim);
  dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
  dims.push_back(output_dim);
  return dims;
}

std::size_t MlpSpec::param_count() const {
  auto dims = layer_dims();
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    n += dims[l + 1] * dims[l] + dims[l + 1];
  }
  return n;
}

ParamVector MlpSpec::zero_params() const {
  if (input_dim == 0 || output_dim == 0) {
    throw std::invalid_argument("MlpSpec: dims must be at least 1");
  }
  if (activations.size() != layer_count()) {
    throw std::invalid_argument("MlpSpec: need one activation per layer");
  }
  ParamVector pv;
  auto dims = layer_dims();
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    std::string base = "layer" + std::to_string(l);
    pv.add_segment(base + ".W", {dims[l + 1], dims[l]});
    pv.add_segment(base + ".b", {dims[l + 1]});
  }
  return pv;
}

ParamVector MlpSpec::init_params(Rng& rng) const {
  ParamVector pv = zero_params();
  auto dims = layer_dims();
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    double bound = std::sqrt(6.0 / double(dims[l] + dims[l + 1]));
    auto w = pv.segment(2 * l);
    for (double& v : w) v = rng.uniform(-bound, bound);
  }
  return pv;
}

void MlpSpec::validate(const ParamVector& params) const {
  if (params.size() != param_count()) {
    throw std::invalid_argument(
        "MlpSpec: parameter vector has " + std::to_string(params.size()) +
        " values, spec needs " + std::to_string(param_count()));
  }
}

void mlp_forward(const MlpSpec& spec, const ParamVector& params,
                 std::span<const double> input, MlpWorkspace& ws) {
  if (input.size() != spec.input_dim) {
    throw std::invalid_argument("mlp_forward: input dimension mismatch");
  }
  spec.validate(params);

  auto dims = spec.layer_dims();
  std::size_t layers = spec.layer_count();
  ws.post.resize(layers + 1);
  ws.pre.resize(layers);
  ws.post[0].assign(input.begin(), input.end());

  const double* p = params.data();
  std::size_t off = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    std::size_t in_n = dims[l], out_n = dims[l + 1];
    const double* W = p + off;
    const double* b = p + off + out_n * in_n;
    off += out_n * in_n + out_n;

    const std::vector<double>& x = ws.post[l];
    std::vector<double>& pre = ws.pre[l];
    std::vector<double>& post = ws.post[l + 1];
    pre.resize(out_n);
    post.resize(out_n);
    for (std::size_t o = 0; o < out_n; ++o) {
      const double* row = W + o * in_n;
      double acc = b[o];
      for (std::size_t i = 0; i < in_n; ++i) acc += row[i] * x[i];
      pre[o] = acc;
      post[o] = apply_act(spec.activations[l], acc);
    }
  }
}

std::vector<double> mlp_eval(const MlpSpec& spec, const ParamVector& params,
                             std::span<const double> input) {
  MlpWorkspace ws;
  mlp_forward(spec, params, input, ws);
  return ws.post.back();
}

void mlp_backward(const MlpSpec& spec, const ParamVector& params,
                  const MlpWorkspace& ws, std::span<const double> upstream,
                  ParamVector* grad_params, std::vector<double>* grad_input) {
  if (upstream.size() != spec.output_dim) {
    throw std::invalid_argument("mlp_backward: upstream dimension mismatch");
  }
  auto dims = spec.layer_dims();
  std::size_t layers = spec.layer_count();

  // Per-layer parameter offsets.
  std::vector<std::size_t> offsets(layers);
  std::size_t off = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    offsets[l] = off;
    off += dims[l + 1] * dims[l] + dims[l + 1];
  }

  std::vector<double> delta(upstream.begin(), upstream.end());
  std::vector<double> delta_prev;
  for (std::size_t l = layers; l-- > 0;) {
    std::size_t in_n = dims[l], out_n = dims[l + 1];
    const double* W = params.data() + offsets[l];
    const std::vector<double>& x = ws.post[l];
    const std::vector<double>& pre = ws.pre[l];
    const std::vector<double>& post = ws.post[l + 1];

    // delta through the activation.
    for (std::size_t o = 0; o < out_n; ++o) {
      delta[o] *= act_deriv(spec.activations[l], pre[o], post[o]);
    }

    if (grad_params) {
      double* gW = grad_params->data() + offsets[l];
      double* gb = gW + out_n * in_n;
      for (std::size_t o = 0; o < out_n; ++o) {
        double d = delta[o];
        double* grow = gW + o * in_n;
        for (std::size_t i = 0; i < in_n; ++i) grow[i] += d * x[i];
        gb[o] += d;
      }
    }

    bool need_input_grad = (l > 0) || (grad_input != nullptr);
    if (need_input_grad) {
      delta_prev.assign(in_n, 0.0);
      for (std::size_t o = 0; o < out_n; ++o) {
        double d = delta[o];
        const double* row = W + o * in_n;
        for (std::size_t i = 0; i < in_n; ++i) delta_prev[i] += d * row[i];
      }
      delta.swap(delta_prev);
    }
  }
  if (grad_input) *grad_input = delta;
}

std::pair<ParamVector, std::vector<double>> mlp_grad(
    const MlpSpec& spec, const ParamVector& params,
    std::span<const double> input, std::span<const double> upstream) {
  MlpWorkspace ws;
  mlp_forward(spec, params, input, ws);
  ParamVector gp = ParamVector::zeros_like(params);
  std::vector<double> gi;
  mlp_backward(spec, params, ws, upstream, &gp, &gi);
  return {std::move(gp), std::move(gi)};
}

}  // namespace rewsac::nn
