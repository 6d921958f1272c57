#include "rewsac/sac.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rewsac {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double squash(double raw, double lo, double hi) {
  return lo + (hi - lo) * sigmoid(raw);
}

double squash_deriv(double raw, double lo, double hi) {
  double s = sigmoid(raw);
  return (hi - lo) * s * (1.0 - s);
}

// log(1 - tanh(u)^2), stable for large |u|.
double log_one_minus_tanh_sq(double u) {
  double au = std::abs(u);
  return 2.0 * (std::log(2.0) - au - std::log1p(std::exp(-2.0 * au)));
}

void concat(std::span<const double> s, std::span<const double> a,
            std::vector<double>& out) {
  out.clear();
  out.insert(out.end(), s.begin(), s.end());
  out.insert(out.end(), a.begin(), a.end());
}

// One reparameterized draw from the squashed Gaussian, with everything the
// backward pass needs.
struct ActorDraw {
  std::vector<double> mean, raw, sigma, xi, u, tanh_u, action;
  double log_prob = 0.0;
  nn::MlpWorkspace ws;
};

void actor_draw(const SacState& sac, const nn::ParamVector& actor_params,
                std::span<const double> state, Rng& rng, double scale,
                ActorDraw& d) {
  std::size_t A = sac.action_dim();
  mlp_forward(sac.actor_spec, actor_params, state, d.ws);
  const std::vector<double>& out = d.ws.post.back();
  double sqrt_scale = std::sqrt(scale);
  d.mean.assign(out.begin(), out.begin() + A);
  d.raw.assign(out.begin() + A, out.end());
  d.sigma.resize(A);
  d.xi.resize(A);
  d.u.resize(A);
  d.tanh_u.resize(A);
  d.action.resize(A);
  d.log_prob = 0.0;
  for (std::size_t i = 0; i < A; ++i) {
    double log_std =
        squash(d.raw[i], sac.cfg.log_std_min, sac.cfg.log_std_max);
    d.sigma[i] = std::exp(log_std);
    d.xi[i] = rng.normal();
    double sigma_eff = d.sigma[i] * sqrt_scale;
    d.u[i] = d.mean[i] + sigma_eff * d.xi[i];
    d.tanh_u[i] = std::tanh(d.u[i]);
    double half_span = 0.5 * (sac.action_high[i] - sac.action_low[i]);
    double center = 0.5 * (sac.action_high[i] + sac.action_low[i]);
    d.action[i] = center + half_span * d.tanh_u[i];
    d.log_prob += -0.5 * d.xi[i] * d.xi[i] - std::log(sigma_eff) -
                  kHalfLog2Pi - log_one_minus_tanh_sq(d.u[i]) -
                  std::log(half_span);
  }
}

}  // namespace

double SacState::alpha() const { return std::exp(log_alpha); }

SacState SacState::make(std::size_t state_dim, std::size_t action_dim,
                        const std::vector<std::size_t>& actor_hidden,
                        const std::vector<std::size_t>& critic_hidden,
                        std::vector<double> action_low,
                        std::vector<double> action_high, SacConfig cfg,
                        Rng& rng) {
  if (action_low.size() != action_dim || action_high.size() != action_dim) {
    throw std::invalid_argument("SacState::make: bound dims");
  }
  SacState sac;
  sac.actor_spec = nn::MlpSpec::make(state_dim, actor_hidden, 2 * action_dim,
                                     nn::Activation::kRelu);
  sac.critic_spec = nn::MlpSpec::make(state_dim + action_dim, critic_hidden, 1,
                                      nn::Activation::kRelu);
  sac.actor = sac.actor_spec.init_params(rng);
  sac.critic1 = sac.critic_spec.init_params(rng);
  sac.critic2 = sac.critic_spec.init_params(rng);
  sac.target1 = sac.critic1;
  sac.target2 = sac.critic2;
  if (cfg.target_entropy == 0.0) {
    cfg.target_entropy = -double(action_dim);
  }
  sac.log_alpha = std::log(cfg.init_alpha);
  sac.cfg = cfg;
  sac.action_low = std::move(action_low);
  sac.action_high = std::move(action_high);
  sac.actor_opt =
      nn::AdamState::for_size(sac.actor.size(), cfg.lr_actor);
  sac.critic1_opt =
      nn::AdamState::for_size(sac.critic1.size(), cfg.lr_critic);
  sac.critic2_opt =
      nn::AdamState::for_size(sac.critic2.size(), cfg.lr_critic);
  sac.alpha_opt = nn::AdamState::for_size(1, cfg.lr_alpha);
  return sac;
}

PolicySample policy_sample(const SacState& sac, std::span<const double> state,
                           Rng& rng, double temperature_scale) {
  if (!(temperature_scale > 0.0)) {
    throw std::invalid_argument("policy_sample: temperature_scale > 0");
  }
  ActorDraw d;
  actor_draw(sac, sac.actor, state, rng, temperature_scale, d);
  return {std::move(d.action), d.log_prob};
}

std::vector<double> policy_mean_action(const SacState& sac,
                                       std::span<const double> state) {
  std::vector<double> out = mlp_eval(sac.actor_spec, sac.actor, state);
  std::size_t A = sac.action_dim();
  std::vector<double> action(A);
  for (std::size_t i = 0; i < A; ++i) {
    double half_span = 0.5 * (sac.action_high[i] - sac.action_low[i]);
    double center = 0.5 * (sac.action_high[i] + sac.action_low[i]);
    action[i] = center + half_span * std::tanh(out[i]);
  }
  return action;
}

CriticGrad CriticGrad::zeros_like(const SacState& sac) {
  CriticGrad g;
  g.q1 = nn::ParamVector::zeros_like(sac.critic1);
  g.q2 = nn::ParamVector::zeros_like(sac.critic2);
  return g;
}

void CriticGrad::set_zero() {
  q1.set_zero();
  q2.set_zero();
}

double CriticGrad::dot(const CriticGrad& other) const {
  return q1.dot(other.q1) + q2.dot(other.q2);
}

void CriticGrad::axpy(double a, const CriticGrad& other) {
  q1.axpy(a, other.q1);
  q2.axpy(a, other.q2);
}

bool CriticGrad::all_finite() const {
  return q1.all_finite() && q2.all_finite();
}

namespace {

// Entropy-regularized target value for one next state; constant wrt the
// critics being trained. a' comes from the live actor in `sac`.
double bellman_target(const SacState& sac, double r,
                      std::span<const double> s_next, Rng& noise,
                      ActorDraw& scratch, nn::MlpWorkspace& tws,
                      std::vector<double>& xin) {
  actor_draw(sac, sac.actor, s_next, noise, 1.0, scratch);
  concat(s_next, scratch.action, xin);
  mlp_forward(sac.critic_spec, sac.target1, xin, tws);
  double t1 = tws.post.back()[0];
  mlp_forward(sac.critic_spec, sac.target2, xin, tws);
  double t2 = tws.post.back()[0];
  double q_min = std::min(t1, t2);
  return r + sac.cfg.gamma * (q_min - sac.alpha() * scratch.log_prob);
}

}  // namespace

double critic_loss_at(const SacState& sac, const nn::ParamVector& q1,
                      const nn::ParamVector& q2,
                      std::span<const Transition> batch, Rng& noise,
                      CriticGrad* grad) {
  if (batch.empty()) {
    throw std::invalid_argument("critic_loss: batch must be nonempty");
  }
  double loss = 0.0;
  ActorDraw scratch;
  nn::MlpWorkspace tws, ws1, ws2;
  std::vector<double> xin;
  std::vector<double> upstream(1);
  for (const Transition& t : batch) {
    double y = bellman_target(sac, t.r, t.s_next, noise, scratch, tws, xin);
    concat(t.s, t.a, xin);
    mlp_forward(sac.critic_spec, q1, xin, ws1);
    mlp_forward(sac.critic_spec, q2, xin, ws2);
    double d1 = ws1.post.back()[0] - y;
    double d2 = ws2.post.back()[0] - y;
    loss += 0.5 * (d1 * d1 + d2 * d2);
    if (grad) {
      upstream[0] = d1;
      mlp_backward(sac.critic_spec, q1, ws1, upstream, &grad->q1, nullptr);
      upstream[0] = d2;
      mlp_backward(sac.critic_spec, q2, ws2, upstream, &grad->q2, nullptr);
    }
  }
  return loss;
}

double critic_loss(const SacState& sac, std::span<const Transition> batch,
                   Rng& noise, CriticGrad* grad) {
  return critic_loss_at(sac, sac.critic1, sac.critic2, batch, noise, grad);
}

double critic_loss_set_at(const SacState& sac, const nn::ParamVector& q1,
                          const nn::ParamVector& q2, const TransitionSet& set,
                          Rng& noise, CriticGrad* grad) {
  if (set.fanout() == 0) {
    throw std::invalid_argument("critic_loss_set: empty fan-out");
  }
  ActorDraw scratch;
  nn::MlpWorkspace tws, ws1, ws2;
  std::vector<double> xin;
  concat(set.trunk_state, set.action, xin);
  mlp_forward(sac.critic_spec, q1, xin, ws1);
  mlp_forward(sac.critic_spec, q2, xin, ws2);
  double v1 = ws1.post.back()[0];
  double v2 = ws2.post.back()[0];

  double loss = 0.0, acc1 = 0.0, acc2 = 0.0;
  std::vector<double> txin;
  for (std::size_t m = 0; m < set.fanout(); ++m) {
    double y = bellman_target(sac, set.rewards[m], set.next_states[m], noise,
                              scratch, tws, txin);
    double d1 = v1 - y;
    double d2 = v2 - y;
    loss += 0.5 * (d1 * d1 + d2 * d2);
    acc1 += d1;
    acc2 += d2;
  }
  if (grad) {
    // Q(s, a) is shared by all members, so one backward per critic with the
    // summed residual as upstream.
    std::vector<double> upstream(1);
    upstream[0] = acc1;
    mlp_backward(sac.critic_spec, q1, ws1, upstream, &grad->q1, nullptr);
    upstream[0] = acc2;
    mlp_backward(sac.critic_spec, q2, ws2, upstream, &grad->q2, nullptr);
  }
  return loss;
}

namespace {

// Shared core of the policy loss: one reparameterized draw at `state`,
// scaled by `multiplicity` (1 for plain states, M*B for transition sets).
double actor_loss_term(const SacState& sac,
                       const nn::ParamVector& actor_params,
                       std::span<const double> state, double multiplicity,
                       Rng& noise, nn::ParamVector* grad, ActorDraw& d,
                       nn::MlpWorkspace& cws, std::vector<double>& xin,
                       std::vector<double>& dq_dinput,
                       std::vector<double>& upstream) {
  std::size_t A = sac.action_dim();
  double alpha = sac.alpha();
  actor_draw(sac, actor_params, state, noise, 1.0, d);
  concat(state, d.action, xin);
  mlp_forward(sac.critic_spec, sac.critic1, xin, cws);
  double v1 = cws.post.back()[0];
  nn::MlpWorkspace cws2;
  mlp_forward(sac.critic_spec, sac.critic2, xin, cws2);
  double v2 = cws2.post.back()[0];
  bool use1 = v1 <= v2;
  double q_min = use1 ? v1 : v2;
  double term = multiplicity * (alpha * d.log_prob - q_min);
  if (!grad) return term;

  // dQ/da from the argmin critic (input gradient only).
  static const std::vector<double> kOne{1.0};
  std::vector<double> gin;
  mlp_backward(sac.critic_spec, use1 ? sac.critic1 : sac.critic2,
               use1 ? cws : cws2, kOne, nullptr, &gin);
  dq_dinput.assign(gin.begin() + state.size(), gin.end());

  upstream.assign(2 * A, 0.0);
  for (std::size_t i = 0; i < A; ++i) {
    double half_span = 0.5 * (sac.action_high[i] - sac.action_low[i]);
    double da_du = half_span * (1.0 - d.tanh_u[i] * d.tanh_u[i]);
    double dL_du = alpha * 2.0 * d.tanh_u[i] - dq_dinput[i] * da_du;
    double sqd = squash_deriv(d.raw[i], sac.cfg.log_std_min,
                              sac.cfg.log_std_max);
    upstream[i] = multiplicity * dL_du;
    upstream[A + i] =
        multiplicity * (dL_du * d.xi[i] * d.sigma[i] * sqd - alpha * sqd);
  }
  mlp_backward(sac.actor_spec, actor_params, d.ws, upstream, grad, nullptr);
  return term;
}

}  // namespace

double actor_loss_at(const SacState& sac, const nn::ParamVector& actor_params,
                     std::span<const std::vector<double>> states, Rng& noise,
                     nn::ParamVector* grad) {
  if (states.empty()) {
    throw std::invalid_argument("actor_loss: states must be nonempty");
  }
  double loss = 0.0;
  ActorDraw d;
  nn::MlpWorkspace cws;
  std::vector<double> xin, dq, upstream;
  for (const auto& s : states) {
    loss += actor_loss_term(sac, actor_params, s, 1.0, noise, grad, d, cws,
                            xin, dq, upstream);
  }
  return loss;
}

double actor_loss(const SacState& sac,
                  std::span<const std::vector<double>> states, Rng& noise,
                  nn::ParamVector* grad) {
  return actor_loss_at(sac, sac.actor, states, noise, grad);
}

double actor_loss_set_at(const SacState& sac,
                         const nn::ParamVector& actor_params,
                         const TransitionSet& set, Rng& noise,
                         nn::ParamVector* grad) {
  ActorDraw d;
  nn::MlpWorkspace cws;
  std::vector<double> xin, dq, upstream;
  return actor_loss_term(sac, actor_params, set.trunk_state,
                         double(set.fanout()), noise, grad, d, cws, xin, dq,
                         upstream);
}

void temperature_update(SacState& sac,
                        std::span<const std::vector<double>> states,
                        Rng& noise) {
  if (states.empty()) {
    throw std::invalid_argument("temperature_update: states nonempty");
  }
  double mean_term = 0.0;
  for (const auto& s : states) {
    PolicySample ps = policy_sample(sac, s, noise, 1.0);
    mean_term += ps.log_prob + sac.cfg.target_entropy;
  }
  mean_term /= double(states.size());
  // J(log_alpha) = -alpha * mean(log pi + target_entropy)
  double grad = -sac.alpha() * mean_term;
  std::array<double, 1> p{sac.log_alpha};
  std::array<double, 1> g{grad};
  nn::adam_step(sac.alpha_opt, std::span<double>(p),
                std::span<const double>(g));
  sac.log_alpha = p[0];
}

void target_soft_update(SacState& sac) {
  double tau = sac.cfg.tau;
  for (std::size_t i = 0; i < sac.target1.size(); ++i) {
    sac.target1.values()[i] =
        tau * sac.critic1.values()[i] + (1.0 - tau) * sac.target1.values()[i];
    sac.target2.values()[i] =
        tau * sac.critic2.values()[i] + (1.0 - tau) * sac.target2.values()[i];
  }
}

RealUpdateReport sac_update_real(SacState& sac,
                                 std::span<const Transition> batch,
                                 Rng& rng) {
  RealUpdateReport rep;
  CriticGrad cg = CriticGrad::zeros_like(sac);
  rep.critic_loss = critic_loss(sac, batch, rng, &cg);
  nn::adam_step(sac.critic1_opt, sac.critic1, cg.q1);
  nn::adam_step(sac.critic2_opt, sac.critic2, cg.q2);

  std::vector<std::vector<double>> states;
  states.reserve(batch.size());
  for (const Transition& t : batch) states.push_back(t.s);
  nn::ParamVector ag = nn::ParamVector::zeros_like(sac.actor);
  rep.actor_loss = actor_loss(sac, states, rng, &ag);
  nn::adam_step(sac.actor_opt, sac.actor, ag);

  temperature_update(sac, states, rng);
  target_soft_update(sac);
  return rep;
}

}  // namespace rewsac
