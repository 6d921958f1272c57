#include "rewsac/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <stdexcept>

namespace rewsac {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727;  // 0.5 * log(2 pi)

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log-std squash into (lo, hi) and its derivative wrt the raw output.
double squash_log_std(double raw, double lo, double hi) {
  return lo + (hi - lo) * sigmoid(raw);
}

double squash_log_std_deriv(double raw, double lo, double hi) {
  double s = sigmoid(raw);
  return (hi - lo) * s * (1.0 - s);
}

}  // namespace

std::vector<double> InputNormalizer::apply(std::span<const double> s,
                                           std::span<const double> a) const {
  std::vector<double> x;
  x.reserve(s.size() + a.size());
  x.insert(x.end(), s.begin(), s.end());
  x.insert(x.end(), a.begin(), a.end());
  if (x.size() != mean.size()) {
    throw std::invalid_argument("InputNormalizer: dimension mismatch");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = (x[i] - mean[i]) / std[i];
  }
  return x;
}

InputNormalizer InputNormalizer::identity(std::size_t dim) {
  InputNormalizer n;
  n.mean.assign(dim, 0.0);
  n.std.assign(dim, 1.0);
  return n;
}

GaussianEnsemble GaussianEnsemble::make(std::size_t count,
                                        std::size_t state_dim,
                                        std::size_t action_dim,
                                        const std::vector<std::size_t>& hidden,
                                        double lr, Rng& rng) {
  if (count == 0) {
    throw std::invalid_argument("GaussianEnsemble: need at least one model");
  }
  GaussianEnsemble ens;
  ens.state_dim = state_dim;
  ens.action_dim = action_dim;
  ens.input_norm = InputNormalizer::identity(state_dim + action_dim);
  nn::MlpSpec spec = nn::MlpSpec::make(state_dim + action_dim, hidden,
                                       2 * state_dim, nn::Activation::kRelu);
  for (std::size_t b = 0; b < count; ++b) {
    ProbabilisticModel m;
    m.spec = spec;
    m.params = spec.init_params(rng);
    ens.models.push_back(std::move(m));
    ens.opt_states.push_back(nn::AdamState::for_size(spec.param_count(), lr));
  }
  ens.bootstrap_indices.assign(count, {});
  return ens;
}

double nll_loss(const ProbabilisticModel& model, const InputNormalizer& norm,
                std::span<const Transition> batch, nn::ParamVector* grad) {
  if (batch.empty()) {
    throw std::invalid_argument("nll_loss: batch must be nonempty");
  }
  std::size_t sd = model.state_dim();
  double inv_n = 1.0 / double(batch.size());
  double total = 0.0;
  nn::MlpWorkspace ws;
  std::vector<double> upstream(2 * sd);
  for (const Transition& t : batch) {
    std::vector<double> x = norm.apply(t.s, t.a);
    mlp_forward(model.spec, model.params, x, ws);
    const std::vector<double>& out = ws.post.back();
    for (std::size_t d = 0; d < sd; ++d) {
      double delta = t.s_next[d] - t.s[d];
      double mu = out[d];
      double raw = out[sd + d];
      double log_std =
          squash_log_std(raw, model.log_std_min, model.log_std_max);
      double inv_var = std::exp(-2.0 * log_std);
      double resid = delta - mu;
      total += log_std + 0.5 * resid * resid * inv_var + kHalfLog2Pi;
      if (grad) {
        // d/dmu = -resid / sigma^2 ; d/dlog_std = 1 - resid^2 / sigma^2
        upstream[d] = -resid * inv_var * inv_n;
        upstream[sd + d] =
            (1.0 - resid * resid * inv_var) * inv_n *
            squash_log_std_deriv(raw, model.log_std_min, model.log_std_max);
      }
    }
    if (grad) {
      mlp_backward(model.spec, model.params, ws, upstream, grad, nullptr);
    }
  }
  return total * inv_n;
}

namespace {

struct ModelTrainResult {
  nn::ParamVector params;
  nn::AdamState opt;
  double holdout_nll = 0.0;
};

ModelTrainResult train_one_model(const ProbabilisticModel& model_in,
                                 nn::AdamState opt,
                                 const InputNormalizer& norm,
                                 const ReplayBuffer& buffer,
                                 const std::vector<std::size_t>& indices,
                                 const EnsembleTrainConfig& cfg,
                                 std::uint64_t seed) {
  ProbabilisticModel model = model_in;
  Rng rng(seed);

  // Deterministic shuffle of the bootstrap indices, then split.
  std::vector<std::size_t> order = indices;
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.index(i)]);
  }
  std::size_t holdout_n =
      std::max<std::size_t>(1, std::size_t(double(order.size()) *
                                           cfg.holdout_fraction));
  if (holdout_n >= order.size()) holdout_n = order.size() / 2;
  std::size_t train_n = order.size() - holdout_n;

  std::vector<Transition> batch;
  batch.reserve(cfg.batch_size);
  std::size_t batches_done = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fresh pass order over the training part each epoch.
    for (std::size_t i = train_n; i > 1; --i) {
      std::swap(order[i - 1], order[rng.index(i)]);
    }
    for (std::size_t pos = 0; pos < train_n; pos += cfg.batch_size) {
      if (cfg.max_batches_per_model != 0 &&
          batches_done >= cfg.max_batches_per_model) {
        break;
      }
      std::size_t end = std::min(pos + cfg.batch_size, train_n);
      batch.clear();
      for (std::size_t i = pos; i < end; ++i) {
        batch.push_back(buffer.at(order[i]));
      }
      nn::ParamVector grad = nn::ParamVector::zeros_like(model.params);
      nll_loss(model, norm, batch, &grad);
      nn::adam_step(opt, model.params, grad);
      ++batches_done;
    }
  }

  // Holdout NLL on the reserved tail (untouched by the epoch reshuffles).
  std::vector<Transition> holdout;
  holdout.reserve(holdout_n);
  for (std::size_t i = train_n; i < order.size(); ++i) {
    holdout.push_back(buffer.at(order[i]));
  }
  ModelTrainResult res;
  res.holdout_nll = holdout.empty() ? 0.0 : nll_loss(model, norm, holdout);
  res.params = std::move(model.params);
  res.opt = std::move(opt);
  return res;
}

}  // namespace

EnsembleTrainReport train_ensemble(GaussianEnsemble& ensemble,
                                   const ReplayBuffer& buffer,
                                   const EnsembleTrainConfig& cfg,
                                   std::uint64_t seed) {
  if (buffer.size() == 0) {
    throw std::runtime_error("train_ensemble: empty buffer");
  }
  Rng rng(seed);
  ensemble.bootstrap_indices = buffer.bootstrap_datasets(ensemble.size(), rng);

  // Refit the shared input normalizer from the whole buffer.
  std::size_t dim = ensemble.state_dim + ensemble.action_dim;
  std::vector<double> mean(dim, 0.0), var(dim, 0.0);
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    const Transition& t = buffer.at(i);
    for (std::size_t d = 0; d < ensemble.state_dim; ++d) mean[d] += t.s[d];
    for (std::size_t d = 0; d < ensemble.action_dim; ++d) {
      mean[ensemble.state_dim + d] += t.a[d];
    }
  }
  for (double& v : mean) v /= double(buffer.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    const Transition& t = buffer.at(i);
    for (std::size_t d = 0; d < ensemble.state_dim; ++d) {
      var[d] += (t.s[d] - mean[d]) * (t.s[d] - mean[d]);
    }
    for (std::size_t d = 0; d < ensemble.action_dim; ++d) {
      std::size_t j = ensemble.state_dim + d;
      var[j] += (t.a[d] - mean[j]) * (t.a[d] - mean[j]);
    }
  }
  ensemble.input_norm.mean = mean;
  ensemble.input_norm.std.resize(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    ensemble.input_norm.std[d] =
        std::max(std::sqrt(var[d] / double(buffer.size())), 1e-6);
  }

  // Per-model seeds derived up front so serial and parallel runs agree.
  std::vector<std::uint64_t> model_seeds(ensemble.size());
  for (auto& s : model_seeds) s = rng.fork_seed();

  std::vector<ModelTrainResult> results(ensemble.size());
  if (cfg.parallel && ensemble.size() > 1) {
    std::vector<std::future<ModelTrainResult>> futures;
    futures.reserve(ensemble.size());
    for (std::size_t b = 0; b < ensemble.size(); ++b) {
      futures.push_back(std::async(std::launch::async, [&, b] {
        return train_one_model(ensemble.models[b], ensemble.opt_states[b],
                               ensemble.input_norm, buffer,
                               ensemble.bootstrap_indices[b], cfg,
                               model_seeds[b]);
      }));
    }
    for (std::size_t b = 0; b < ensemble.size(); ++b) {
      results[b] = futures[b].get();
    }
  } else {
    for (std::size_t b = 0; b < ensemble.size(); ++b) {
      results[b] = train_one_model(ensemble.models[b], ensemble.opt_states[b],
                                   ensemble.input_norm, buffer,
                                   ensemble.bootstrap_indices[b], cfg,
                                   model_seeds[b]);
    }
  }

  EnsembleTrainReport report;
  for (std::size_t b = 0; b < ensemble.size(); ++b) {
    ensemble.models[b].params = std::move(results[b].params);
    ensemble.opt_states[b] = std::move(results[b].opt);
    report.holdout_nll += results[b].holdout_nll;
  }
  report.holdout_nll /= double(ensemble.size());
  return report;
}

std::vector<GaussianPrediction> predict_distribution(
    const GaussianEnsemble& ensemble, std::span<const double> s,
    std::span<const double> a) {
  if (s.size() != ensemble.state_dim || a.size() != ensemble.action_dim) {
    throw std::invalid_argument("predict_distribution: dimension mismatch");
  }
  std::vector<double> x = ensemble.input_norm.apply(s, a);
  std::vector<GaussianPrediction> out;
  out.reserve(ensemble.size());
  nn::MlpWorkspace ws;
  for (const ProbabilisticModel& m : ensemble.models) {
    mlp_forward(m.spec, m.params, x, ws);
    const std::vector<double>& y = ws.post.back();
    GaussianPrediction p;
    std::size_t sd = ensemble.state_dim;
    p.mean.resize(sd);
    p.std.resize(sd);
    for (std::size_t d = 0; d < sd; ++d) {
      p.mean[d] = s[d] + y[d];
      p.std[d] =
          std::exp(squash_log_std(y[sd + d], m.log_std_min, m.log_std_max));
    }
    out.push_back(std::move(p));
  }
  return out;
}

TransitionSet sample_transition_set(const GaussianEnsemble& ensemble,
                                    std::span<const double> state,
                                    std::span<const double> action,
                                    std::size_t samples_per_model,
                                    const RewardFn& reward, Rng& rng) {
  if (samples_per_model == 0) {
    throw std::invalid_argument("sample_transition_set: M >= 1 required");
  }
  auto preds = predict_distribution(ensemble, state, action);
  TransitionSet set;
  set.trunk_state.assign(state.begin(), state.end());
  set.action.assign(action.begin(), action.end());
  std::size_t fanout = ensemble.size() * samples_per_model;
  set.rewards.reserve(fanout);
  set.next_states.reserve(fanout);
  std::size_t sd = ensemble.state_dim;
  for (const GaussianPrediction& p : preds) {
    for (std::size_t m = 0; m < samples_per_model; ++m) {
      std::vector<double> s_next(sd);
      for (std::size_t d = 0; d < sd; ++d) {
        s_next[d] = p.mean[d] + p.std[d] * rng.normal();
      }
      set.rewards.push_back(reward(state, action, s_next));
      set.next_states.push_back(std::move(s_next));
    }
  }
  set.chosen_next = rng.index(fanout);
  return set;
}

namespace {

Rollout rollout_impl(const GaussianEnsemble& ensemble,
                     std::span<const double> start_state,
                     const std::function<std::vector<double>(
                         std::span<const double>, Rng&)>& next_action,
                     std::size_t horizon, std::size_t samples_per_model,
                     const RewardFn& reward, Rng& rng) {
  Rollout roll;
  roll.sets.reserve(horizon);
  std::vector<double> trunk(start_state.begin(), start_state.end());
  for (std::size_t k = 0; k < horizon; ++k) {
    std::vector<double> action = next_action(trunk, rng);
    TransitionSet set = sample_transition_set(
        ensemble, trunk, action, samples_per_model, reward, rng);
    set.depth = k;
    trunk = set.next_states[set.chosen_next];
    roll.sets.push_back(std::move(set));
  }
  return roll;
}

}  // namespace

Rollout rollout_with_actions(const GaussianEnsemble& ensemble,
                             std::span<const double> start_state,
                             std::span<const std::vector<double>> actions,
                             std::size_t horizon,
                             std::size_t samples_per_model,
                             const RewardFn& reward, Rng& rng) {
  if (actions.size() < horizon) {
    throw std::invalid_argument(
        "rollout_with_actions: fewer actions than rollout horizon");
  }
  std::size_t k = 0;
  return rollout_impl(
      ensemble, start_state,
      [&](std::span<const double>, Rng&) { return actions[k++]; }, horizon,
      samples_per_model, reward, rng);
}

Rollout rollout_with_policy(const GaussianEnsemble& ensemble,
                            std::span<const double> start_state,
                            const PolicyFn& policy, std::size_t horizon,
                            std::size_t samples_per_model,
                            const RewardFn& reward, Rng& rng) {
  return rollout_impl(ensemble, start_state, policy, horizon,
                      samples_per_model, reward, rng);
}

}  // namespace rewsac
