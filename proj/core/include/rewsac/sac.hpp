#pragma once

#include <span>
#include <vector>

#include "rewsac/dynamics.hpp"
#include "rewsac/nn/mlp.hpp"
#include "rewsac/nn/optim.hpp"
#include "rewsac/replay.hpp"
#include "rewsac/rng.hpp"

namespace rewsac {

struct SacConfig {
  double gamma = 0.99;
  double tau = 0.005;
  double lr_actor = 3e-4;
  double lr_critic = 3e-4;
  double lr_alpha = 3e-4;
  double target_entropy = 0.0;  // set by SacState::make
  double init_alpha = 0.2;
  double log_std_min = -5.0;
  double log_std_max = 2.0;
};

struct PolicySample {
  std::vector<double> action;
  double log_prob = 0.0;
};

/// Soft Actor-Critic state: squashed-Gaussian actor, twin critics with
/// Polyak-averaged targets, and an automatically tuned temperature. The
/// actor MLP outputs [mean | raw log-std]; the log-std is squashed into
/// [log_std_min, log_std_max] with a sigmoid. Actions are tanh-squashed and
/// rescaled into the action bounds.
struct SacState {
  nn::MlpSpec actor_spec;
  nn::MlpSpec critic_spec;
  nn::ParamVector actor;
  nn::ParamVector critic1, critic2;
  nn::ParamVector target1, target2;
  double log_alpha = 0.0;
  nn::AdamState actor_opt, critic1_opt, critic2_opt, alpha_opt;
  SacConfig cfg;
  std::vector<double> action_low, action_high;

  double alpha() const;
  std::size_t state_dim() const { return actor_spec.input_dim; }
  std::size_t action_dim() const { return action_low.size(); }

  /// target_entropy defaults to -action_dim when cfg.target_entropy == 0.
  static SacState make(std::size_t state_dim, std::size_t action_dim,
                       const std::vector<std::size_t>& actor_hidden,
                       const std::vector<std::size_t>& critic_hidden,
                       std::vector<double> action_low,
                       std::vector<double> action_high, SacConfig cfg,
                       Rng& rng);
};

/// Draws an action from the squashed Gaussian. temperature_scale multiplies
/// the pre-squash standard deviation by sqrt(temperature_scale); the explore
/// policy uses the lambda_e scale, normal sampling uses 1. log_prob includes
/// the tanh and rescaling corrections.
PolicySample policy_sample(const SacState& sac, std::span<const double> state,
                           Rng& rng, double temperature_scale = 1.0);

/// Deterministic head: tanh of the mean, rescaled to bounds.
std::vector<double> policy_mean_action(const SacState& sac,
                                       std::span<const double> state);

/// Gradients for the twin critics, handled as one logical parameter block.
struct CriticGrad {
  nn::ParamVector q1, q2;

  static CriticGrad zeros_like(const SacState& sac);
  void set_zero();
  double dot(const CriticGrad& other) const;
  void axpy(double a, const CriticGrad& other);
  bool all_finite() const;
};

/// Soft Bellman residual over a batch, summed over both critics:
///   sum_batch 1/2 { Q_i(s,a) - [r + gamma (min_j targetQ_j(s',a')
///                                - alpha log pi(a'|s'))] }^2
/// a' is drawn from the current actor per transition (shared by both
/// critics); the target is a constant with respect to everything. Evaluated
/// at explicit critic parameters so callers can probe candidates.
double critic_loss_at(const SacState& sac, const nn::ParamVector& q1,
                      const nn::ParamVector& q2,
                      std::span<const Transition> batch, Rng& noise,
                      CriticGrad* grad = nullptr);

double critic_loss(const SacState& sac, std::span<const Transition> batch,
                   Rng& noise, CriticGrad* grad = nullptr);

/// Policy loss sum_s [ alpha log pi(a^|s) - min_i Q_i(s, a^) ] with a^
/// reparameterized; the gradient flows through a^ into the actor only.
/// Q always uses the critics stored in `sac` (candidate actor parameters may
/// be supplied explicitly).
double actor_loss_at(const SacState& sac, const nn::ParamVector& actor_params,
                     std::span<const std::vector<double>> states, Rng& noise,
                     nn::ParamVector* grad = nullptr);

double actor_loss(const SacState& sac,
                  std::span<const std::vector<double>> states, Rng& noise,
                  nn::ParamVector* grad = nullptr);

/// TransitionSet variants: the loss sums over the M*B fan-out members with
/// the trunk (state, action) shared. For the policy term the members only
/// differ in (r, s'), which the term does not use, so one reparameterized
/// draw per set is scaled by the fan-out size.
double critic_loss_set_at(const SacState& sac, const nn::ParamVector& q1,
                          const nn::ParamVector& q2, const TransitionSet& set,
                          Rng& noise, CriticGrad* grad = nullptr);

double actor_loss_set_at(const SacState& sac,
                         const nn::ParamVector& actor_params,
                         const TransitionSet& set, Rng& noise,
                         nn::ParamVector* grad = nullptr);

/// One Adam step on log_alpha minimizing
///   mean_s [ -alpha (log pi(a^|s) + target_entropy) ].
void temperature_update(SacState& sac,
                        std::span<const std::vector<double>> states,
                        Rng& noise);

/// theta_bar <- tau theta + (1 - tau) theta_bar for both target critics.
void target_soft_update(SacState& sac);

struct RealUpdateReport {
  double critic_loss = 0.0;
  double actor_loss = 0.0;
};

/// One Adam step on the critics, one on the actor (with the stepped
/// critics), a temperature update on the batch states, and a target soft
/// update, in that order.
RealUpdateReport sac_update_real(SacState& sac,
                                 std::span<const Transition> batch, Rng& rng);

}  // namespace rewsac
