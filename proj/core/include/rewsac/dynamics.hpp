#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rewsac/nn/mlp.hpp"
#include "rewsac/nn/optim.hpp"
#include "rewsac/replay.hpp"
#include "rewsac/rng.hpp"

namespace rewsac {

/// r(s, a, s_next) for imagined transitions; supplied by the environment.
using RewardFn = std::function<double(
    std::span<const double>, std::span<const double>, std::span<const double>)>;

/// Normalization of the model input [s | a], fit from buffer statistics at
/// each retrain.
struct InputNormalizer {
  std::vector<double> mean;
  std::vector<double> std;  // floored at 1e-6

  std::vector<double> apply(std::span<const double> s,
                            std::span<const double> a) const;
  static InputNormalizer identity(std::size_t dim);
};

/// Probabilistic next-state model: an MLP maps the normalized [s | a] to
/// (mean, raw log-std) of the state delta s' - s. The log-std is squashed
/// into [log_std_min, log_std_max] with a sigmoid, so predicted stddevs stay
/// strictly inside exp(bounds) and the squash remains differentiable.
struct ProbabilisticModel {
  nn::MlpSpec spec;
  nn::ParamVector params;
  double log_std_min = -5.0;
  double log_std_max = 0.5;

  std::size_t state_dim() const { return spec.output_dim / 2; }
};

struct GaussianPrediction {
  std::vector<double> mean;  // of s'
  std::vector<double> std;
};

/// Ensemble of bootstrapped probabilistic models. Each model trains on its
/// own with-replacement resample of the replay buffer; all models share one
/// input normalizer. Optimizer state is kept so retrains warm-start.
struct GaussianEnsemble {
  std::vector<ProbabilisticModel> models;
  std::vector<std::vector<std::size_t>> bootstrap_indices;
  std::vector<nn::AdamState> opt_states;
  InputNormalizer input_norm;
  std::size_t state_dim = 0;
  std::size_t action_dim = 0;

  static GaussianEnsemble make(std::size_t count, std::size_t state_dim,
                               std::size_t action_dim,
                               const std::vector<std::size_t>& hidden,
                               double lr, Rng& rng);
  std::size_t size() const { return models.size(); }
};

/// One rollout step's fan-out: the trunk (state, action) plus the M*B
/// predicted (reward, next state) pairs and the index chosen to continue the
/// trunk.
struct TransitionSet {
  std::vector<double> trunk_state;
  std::vector<double> action;
  std::vector<double> rewards;                   // M*B
  std::vector<std::vector<double>> next_states;  // M*B
  std::size_t chosen_next = 0;
  std::size_t depth = 0;

  std::size_t fanout() const { return rewards.size(); }
};

struct Rollout {
  std::vector<TransitionSet> sets;
};

/// Mean over the batch of the Gaussian negative log-likelihood of the state
/// delta, constant included:
///   mean_batch sum_d [ log sigma_d + (delta_d - mu_d)^2 / (2 sigma_d^2)
///                      + 0.5 log(2 pi) ]
/// Accumulates d(loss)/d params into grad if non-null.
double nll_loss(const ProbabilisticModel& model, const InputNormalizer& norm,
                std::span<const Transition> batch,
                nn::ParamVector* grad = nullptr);

struct EnsembleTrainConfig {
  std::size_t epochs = 3;
  std::size_t batch_size = 256;
  std::size_t max_batches_per_model = 100;  // 0 = unlimited
  double holdout_fraction = 0.1;
  bool parallel = false;
};

struct EnsembleTrainReport {
  double holdout_nll = 0.0;  // mean over models after training
};

/// Redraws bootstrap index sets, refits the input normalizer from the buffer,
/// and trains every model on minibatches from its own resample, holding out
/// a fraction for the NLL metric. Deterministic given the seed; with
/// cfg.parallel the models train on worker threads using per-model seeds
/// derived up front (results are identical to the serial mode).
EnsembleTrainReport train_ensemble(GaussianEnsemble& ensemble,
                                   const ReplayBuffer& buffer,
                                   const EnsembleTrainConfig& cfg,
                                   std::uint64_t seed);

/// Per-model mean/std of s' (mean = s + predicted delta mean).
std::vector<GaussianPrediction> predict_distribution(
    const GaussianEnsemble& ensemble, std::span<const double> s,
    std::span<const double> a);

/// Draws samples_per_model states from each model's Gaussian, scores them
/// with the reward oracle, and picks the trunk continuation uniformly from
/// the fan-out.
TransitionSet sample_transition_set(const GaussianEnsemble& ensemble,
                                    std::span<const double> state,
                                    std::span<const double> action,
                                    std::size_t samples_per_model,
                                    const RewardFn& reward, Rng& rng);

/// Policy queried at each trunk state (explore mode).
using PolicyFn =
    std::function<std::vector<double>(std::span<const double>, Rng&)>;

/// Fixed real action sequence (meta-training mode). Throws if fewer actions
/// than `horizon` are supplied.
Rollout rollout_with_actions(const GaussianEnsemble& ensemble,
                             std::span<const double> start_state,
                             std::span<const std::vector<double>> actions,
                             std::size_t horizon,
                             std::size_t samples_per_model,
                             const RewardFn& reward, Rng& rng);

Rollout rollout_with_policy(const GaussianEnsemble& ensemble,
                            std::span<const double> start_state,
                            const PolicyFn& policy, std::size_t horizon,
                            std::size_t samples_per_model,
                            const RewardFn& reward, Rng& rng);

}  // namespace rewsac
