#include "rewsac/nn/gru.hpp"

#include <cmath>
#include <stdexcept>

namespace rewsac::nn {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct GruParamView {
  const double *Wz, *Uz, *bz, *Wr, *Ur, *br, *Wh, *Uh, *bh;
};

struct GruGradView {
  double *Wz, *Uz, *bz, *Wr, *Ur, *br, *Wh, *Uh, *bh;
};

GruParamView view(const GruSpec& spec, const ParamVector& p) {
  std::size_t I = spec.input_dim, H = spec.hidden_dim;
  const double* base = p.data();
  GruParamView v{};
  std::size_t gate = H * I + H * H + H;
  const double* g0 = base;
  const double* g1 = base + gate;
  const double* g2 = base + 2 * gate;
  v.Wz = g0;
  v.Uz = g0 + H * I;
  v.bz = g0 + H * I + H * H;
  v.Wr = g1;
  v.Ur = g1 + H * I;
  v.br = g1 + H * I + H * H;
  v.Wh = g2;
  v.Uh = g2 + H * I;
  v.bh = g2 + H * I + H * H;
  return v;
}

GruGradView grad_view(const GruSpec& spec, ParamVector& p) {
  auto cv = view(spec, p);
  GruGradView v{};
  v.Wz = const_cast<double*>(cv.Wz);
  v.Uz = const_cast<double*>(cv.Uz);
  v.bz = const_cast<double*>(cv.bz);
  v.Wr = const_cast<double*>(cv.Wr);
  v.Ur = const_cast<double*>(cv.Ur);
  v.br = const_cast<double*>(cv.br);
  v.Wh = const_cast<double*>(cv.Wh);
  v.Uh = const_cast<double*>(cv.Uh);
  v.bh = const_cast<double*>(cv.bh);
  return v;
}

// y += M x for an H x N row-major matrix.
void matvec_add(const double* M, const double* x, std::size_t rows,
                std::size_t cols, double* y) {
  for (std::size_t o = 0; o < rows; ++o) {
    const double* row = M + o * cols;
    double acc = 0.0;
    for (std::size_t i = 0; i < cols; ++i) acc += row[i] * x[i];
    y[o] += acc;
  }
}

// grad += d x^T (outer product accumulate) for an H x N matrix.
void outer_add(double* G, const double* d, const double* x, std::size_t rows,
               std::size_t cols) {
  for (std::size_t o = 0; o < rows; ++o) {
    double dv = d[o];
    double* row = G + o * cols;
    for (std::size_t i = 0; i < cols; ++i) row[i] += dv * x[i];
  }
}

// y += M^T d for an H x N matrix (accumulate into the N-vector y).
void matvec_t_add(const double* M, const double* d, std::size_t rows,
                  std::size_t cols, double* y) {
  for (std::size_t o = 0; o < rows; ++o) {
    double dv = d[o];
    const double* row = M + o * cols;
    for (std::size_t i = 0; i < cols; ++i) y[i] += dv * row[i];
  }
}

}  // namespace

ParamVector GruSpec::zero_params() const {
  if (input_dim == 0 || hidden_dim == 0) {
    throw std::invalid_argument("GruSpec: dims must be at least 1");
  }
  ParamVector pv;
  const char* gates[3] = {"z", "r", "h"};
  for (const char* g : gates) {
    pv.add_segment(std::string("W") + g, {hidden_dim, input_dim});
    pv.add_segment(std::string("U") + g, {hidden_dim, hidden_dim});
    pv.add_segment(std::string("b") + g, {hidden_dim});
  }
  return pv;
}

ParamVector GruSpec::init_params(Rng& rng) const {
  ParamVector pv = zero_params();
  double bw = std::sqrt(6.0 / double(input_dim + hidden_dim));
  double bu = std::sqrt(6.0 / double(2 * hidden_dim));
  const char* gates[3] = {"z", "r", "h"};
  for (const char* g : gates) {
    for (double& v : pv.segment(std::string("W") + g)) v = rng.uniform(-bw, bw);
    for (double& v : pv.segment(std::string("U") + g)) v = rng.uniform(-bu, bu);
  }
  return pv;
}

void GruSpec::validate(const ParamVector& params) const {
  if (params.size() != param_count()) {
    throw std::invalid_argument("GruSpec: parameter size mismatch");
  }
}

void gru_step(const GruSpec& spec, const ParamVector& params,
              std::span<const double> hidden, std::span<const double> input,
              std::vector<double>& hidden_out, GruStepCache* cache) {
  std::size_t I = spec.input_dim, H = spec.hidden_dim;
  if (hidden.size() != H || input.size() != I) {
    throw std::invalid_argument("gru_step: dimension mismatch");
  }
  spec.validate(params);
  auto v = view(spec, params);

  std::vector<double> z(H), r(H), cand(H), rh(H);
  // z and r gates.
  std::vector<double> az(v.bz, v.bz + H), ar(v.br, v.br + H);
  matvec_add(v.Wz, input.data(), H, I, az.data());
  matvec_add(v.Uz, hidden.data(), H, H, az.data());
  matvec_add(v.Wr, input.data(), H, I, ar.data());
  matvec_add(v.Ur, hidden.data(), H, H, ar.data());
  for (std::size_t i = 0; i < H; ++i) {
    z[i] = sigmoid(az[i]);
    r[i] = sigmoid(ar[i]);
    rh[i] = r[i] * hidden[i];
  }
  // Candidate.
  std::vector<double> ac(v.bh, v.bh + H);
  matvec_add(v.Wh, input.data(), H, I, ac.data());
  matvec_add(v.Uh, rh.data(), H, H, ac.data());
  for (std::size_t i = 0; i < H; ++i) cand[i] = std::tanh(ac[i]);

  hidden_out.resize(H);
  for (std::size_t i = 0; i < H; ++i) {
    hidden_out[i] = (1.0 - z[i]) * hidden[i] + z[i] * cand[i];
  }

  if (cache) {
    cache->x.assign(input.begin(), input.end());
    cache->h_prev.assign(hidden.begin(), hidden.end());
    cache->z = std::move(z);
    cache->r = std::move(r);
    cache->cand = std::move(cand);
    cache->rh = std::move(rh);
  }
}

std::vector<double> gru_step(const GruSpec& spec, const ParamVector& params,
                             std::span<const double> hidden,
                             std::span<const double> input) {
  std::vector<double> out;
  gru_step(spec, params, hidden, input, out);
  return out;
}

void gru_forward_sequence(const GruSpec& spec, const ParamVector& params,
                          std::span<const std::vector<double>> inputs,
                          std::vector<std::vector<double>>& hidden_out,
                          std::vector<GruStepCache>* caches) {
  if (inputs.empty()) {
    throw std::invalid_argument("gru_forward_sequence: empty sequence");
  }
  std::size_t T = inputs.size();
  hidden_out.resize(T);
  if (caches) caches->resize(T);
  std::vector<double> h(spec.hidden_dim, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    gru_step(spec, params, h, inputs[t], hidden_out[t],
             caches ? &(*caches)[t] : nullptr);
    h = hidden_out[t];
  }
}

void gru_backward_sequence(const GruSpec& spec, const ParamVector& params,
                           std::span<const GruStepCache> caches,
                           std::span<const std::vector<double>> upstreams,
                           ParamVector& grad_accum) {
  if (caches.size() != upstreams.size()) {
    throw std::invalid_argument(
        "gru_backward_sequence: caches/upstreams length mismatch");
  }
  std::size_t I = spec.input_dim, H = spec.hidden_dim;
  auto v = view(spec, params);
  auto g = grad_view(spec, grad_accum);

  std::vector<double> carry(H, 0.0);  // dL/dh_t flowing backward
  std::vector<double> delta(H), dz(H), dcand(H), dac(H), drh(H), dr(H),
      daz(H), dar(H), dh_prev(H);

  for (std::size_t t = caches.size(); t-- > 0;) {
    const GruStepCache& c = caches[t];
    if (upstreams[t].size() != H) {
      throw std::invalid_argument("gru_backward_sequence: upstream dim");
    }
    for (std::size_t i = 0; i < H; ++i) delta[i] = upstreams[t][i] + carry[i];

    for (std::size_t i = 0; i < H; ++i) {
      dz[i] = delta[i] * (c.cand[i] - c.h_prev[i]);
      dcand[i] = delta[i] * c.z[i];
      dh_prev[i] = delta[i] * (1.0 - c.z[i]);
      dac[i] = dcand[i] * (1.0 - c.cand[i] * c.cand[i]);
    }

    // Candidate path.
    outer_add(g.Wh, dac.data(), c.x.data(), H, I);
    outer_add(g.Uh, dac.data(), c.rh.data(), H, H);
    for (std::size_t i = 0; i < H; ++i) g.bh[i] += dac[i];
    std::fill(drh.begin(), drh.end(), 0.0);
    matvec_t_add(v.Uh, dac.data(), H, H, drh.data());
    for (std::size_t i = 0; i < H; ++i) {
      dr[i] = drh[i] * c.h_prev[i];
      dh_prev[i] += drh[i] * c.r[i];
    }

    // Gate pre-activations.
    for (std::size_t i = 0; i < H; ++i) {
      daz[i] = dz[i] * c.z[i] * (1.0 - c.z[i]);
      dar[i] = dr[i] * c.r[i] * (1.0 - c.r[i]);
    }
    outer_add(g.Wz, daz.data(), c.x.data(), H, I);
    outer_add(g.Uz, daz.data(), c.h_prev.data(), H, H);
    outer_add(g.Wr, dar.data(), c.x.data(), H, I);
    outer_add(g.Ur, dar.data(), c.h_prev.data(), H, H);
    for (std::size_t i = 0; i < H; ++i) {
      g.bz[i] += daz[i];
      g.br[i] += dar[i];
    }
    matvec_t_add(v.Uz, daz.data(), H, H, dh_prev.data());
    matvec_t_add(v.Ur, dar.data(), H, H, dh_prev.data());

    carry = dh_prev;
  }
}

ParamVector gru_sequence_grad(const GruSpec& spec, const ParamVector& params,
                              std::span<const std::vector<double>> inputs,
                              std::span<const std::vector<double>> upstreams) {
  if (inputs.empty() || inputs.size() != upstreams.size()) {
    throw std::invalid_argument(
        "gru_sequence_grad: sequences must be nonempty and equal length");
  }
  std::vector<std::vector<double>> hidden;
  std::vector<GruStepCache> caches;
  gru_forward_sequence(spec, params, inputs, hidden, &caches);
  ParamVector grad = ParamVector::zeros_like(params);
  gru_backward_sequence(spec, params, caches, upstreams, grad);
  return grad;
}

}  // namespace rewsac::nn
