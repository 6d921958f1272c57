#include "rewsac/envs/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rewsac::envs {

namespace {

constexpr double kPi = std::numbers::pi;

double clamp(double v, double lo, double hi) {
  return std::min(std::max(v, lo), hi);
}

double sq(double v) { return v * v; }

}  // namespace

std::vector<double> Env::reset(std::uint64_t seed) {
  rng_ = Rng(seed);
  return reset();
}

std::vector<double> Env::reset() {
  obs_ = sample_initial(rng_);
  step_index_ = 0;
  return obs_;
}

StepResult Env::step(std::span<const double> action) {
  if (action.size() != spec_.action_dim) {
    throw std::invalid_argument("Env::step: action dimension mismatch");
  }
  if (step_index_ >= spec_.horizon) {
    throw std::logic_error("Env::step: episode already finished; reset first");
  }
  std::vector<double> a(action.begin(), action.end());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = clamp(a[i], spec_.action_low[i], spec_.action_high[i]);
  }
  std::vector<double> next = dynamics(obs_, a);
  StepResult res;
  res.reward = reward(obs_, a, next);
  res.observation = next;
  obs_ = std::move(next);
  step_index_ += 1;
  res.done = (step_index_ == spec_.horizon);
  return res;
}

void Env::set_state(std::vector<double> obs, std::size_t step_index) {
  if (obs.size() != spec_.state_dim || step_index > spec_.horizon) {
    throw std::invalid_argument("Env::set_state: invalid state");
  }
  obs_ = std::move(obs);
  step_index_ = step_index;
}

// ---------------------------------------------------------------------------
// Pendulum: observation [cos th, sin th, thdot], torque 1-d in [-2, 2].
// Explicit Euler with dt = 0.05, g = 10, m = 1, l = 1, |thdot| <= 8.
// Initial state: th ~ U[-pi, pi], thdot ~ U[-1, 1].
// Reward on the landed state: -(th'^2 + 0.1 thdot'^2 + 0.001 a^2); the best
// achievable value is 0 at the upright equilibrium.
// ---------------------------------------------------------------------------
class PendulumEnv final : public Env {
 public:
  PendulumEnv() {
    spec_.name = "pendulum";
    spec_.state_dim = 3;
    spec_.action_dim = 1;
    spec_.action_low = {-2.0};
    spec_.action_high = {2.0};
    spec_.horizon = 200;
  }

  double reward(std::span<const double> s, std::span<const double> a,
                std::span<const double> s_next) const override {
    check_dims(s, a, s_next);
    double th = std::atan2(s_next[1], s_next[0]);
    double thdot = s_next[2];
    return -(sq(th) + 0.1 * sq(thdot) + 0.001 * sq(a[0]));
  }

 protected:
  std::vector<double> sample_initial(Rng& rng) const override {
    double th = rng.uniform(-kPi, kPi);
    double thdot = rng.uniform(-1.0, 1.0);
    return {std::cos(th), std::sin(th), thdot};
  }

  std::vector<double> dynamics(std::span<const double> s,
                               std::span<const double> a) const override {
    constexpr double g = 10.0, m = 1.0, l = 1.0, dt = 0.05, max_speed = 8.0;
    double th = std::atan2(s[1], s[0]);
    double thdot = s[2];
    double acc = 3.0 * g / (2.0 * l) * std::sin(th) + 3.0 / (m * l * l) * a[0];
    double th_next = th + thdot * dt;
    double thdot_next = clamp(thdot + acc * dt, -max_speed, max_speed);
    return {std::cos(th_next), std::sin(th_next), thdot_next};
  }

 private:
  void check_dims(std::span<const double> s, std::span<const double> a,
                  std::span<const double> s_next) const {
    if (s.size() != 3 || a.size() != 1 || s_next.size() != 3) {
      throw std::invalid_argument("pendulum reward: dimension mismatch");
    }
  }
};

// ---------------------------------------------------------------------------
// PointMass2D: observation [px, py, vx, vy], force 2-d in [-1, 1]^2.
// Explicit Euler with dt = 0.1; |v| <= 2 per axis, positions clamped to
// [-2, 2]^2. Goal at the origin. Initial p ~ U[-1.5, 1.5]^2, v ~ U[-0.1,
// 0.1]^2. Reward on the landed state: -|p'| - 0.01 |a|^2.
// ---------------------------------------------------------------------------
class PointMassEnv final : public Env {
 public:
  PointMassEnv() {
    spec_.name = "pointmass";
    spec_.state_dim = 4;
    spec_.action_dim = 2;
    spec_.action_low = {-1.0, -1.0};
    spec_.action_high = {1.0, 1.0};
    spec_.horizon = 100;
  }

  double reward(std::span<const double> s, std::span<const double> a,
                std::span<const double> s_next) const override {
    if (s.size() != 4 || a.size() != 2 || s_next.size() != 4) {
      throw std::invalid_argument("pointmass reward: dimension mismatch");
    }
    double dist = std::sqrt(sq(s_next[0]) + sq(s_next[1]));
    return -dist - 0.01 * (sq(a[0]) + sq(a[1]));
  }

 protected:
  std::vector<double> sample_initial(Rng& rng) const override {
    return {rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5),
            rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)};
  }

  std::vector<double> dynamics(std::span<const double> s,
                               std::span<const double> a) const override {
    constexpr double dt = 0.1, vmax = 2.0, pmax = 2.0;
    double px = clamp(s[0] + s[2] * dt, -pmax, pmax);
    double py = clamp(s[1] + s[3] * dt, -pmax, pmax);
    double vx = clamp(s[2] + a[0] * dt, -vmax, vmax);
    double vy = clamp(s[3] + a[1] * dt, -vmax, vmax);
    return {px, py, vx, vy};
  }
};

// ---------------------------------------------------------------------------
// CartPoleSwingUpContinuous: observation [x, xdot, cos th, sin th, thdot]
// with th = 0 upright; force 1-d in [-10, 10]. The pole starts hanging
// (th ~ pi). Explicit Euler with dt = 0.05; |x| <= 2.4 (hitting the wall
// stops the cart), |xdot| <= 5, |thdot| <= 8.
// Reward on the landed state: cos th' - 0.001 a^2.
// ---------------------------------------------------------------------------
class CartPoleSwingUpEnv final : public Env {
 public:
  CartPoleSwingUpEnv() {
    spec_.name = "cartpole-swingup";
    spec_.state_dim = 5;
    spec_.action_dim = 1;
    spec_.action_low = {-10.0};
    spec_.action_high = {10.0};
    spec_.horizon = 200;
  }

  double reward(std::span<const double> s, std::span<const double> a,
                std::span<const double> s_next) const override {
    if (s.size() != 5 || a.size() != 1 || s_next.size() != 5) {
      throw std::invalid_argument("cartpole reward: dimension mismatch");
    }
    return s_next[2] - 0.001 * sq(a[0]);
  }

 protected:
  std::vector<double> sample_initial(Rng& rng) const override {
    double x = rng.uniform(-0.05, 0.05);
    double xdot = rng.uniform(-0.05, 0.05);
    double th = kPi + rng.uniform(-0.05, 0.05);
    double thdot = rng.uniform(-0.05, 0.05);
    return {x, xdot, std::cos(th), std::sin(th), thdot};
  }

  std::vector<double> dynamics(std::span<const double> s,
                               std::span<const double> a) const override {
    constexpr double mc = 1.0, mp = 0.1, l = 0.5, g = 9.8, dt = 0.05;
    constexpr double xmax = 2.4, vmax = 5.0, wmax = 8.0;
    double x = s[0], xdot = s[1];
    double th = std::atan2(s[3], s[2]);
    double thdot = s[4];
    double sin_th = std::sin(th), cos_th = std::cos(th);
    double total = mc + mp;
    double temp = (a[0] + mp * l * sq(thdot) * sin_th) / total;
    double thacc = (g * sin_th - cos_th * temp) /
                   (l * (4.0 / 3.0 - mp * sq(cos_th) / total));
    double xacc = temp - mp * l * thacc * cos_th / total;

    double x_next = x + xdot * dt;
    double xdot_next = clamp(xdot + xacc * dt, -vmax, vmax);
    if (x_next <= -xmax || x_next >= xmax) {
      x_next = clamp(x_next, -xmax, xmax);
      xdot_next = 0.0;
    }
    double th_next = th + thdot * dt;
    double thdot_next = clamp(thdot + thacc * dt, -wmax, wmax);
    return {x_next, xdot_next, std::cos(th_next), std::sin(th_next),
            thdot_next};
  }
};

std::unique_ptr<Env> make_env(const std::string& name) {
  if (name == "pendulum") return std::make_unique<PendulumEnv>();
  if (name == "pointmass") return std::make_unique<PointMassEnv>();
  if (name == "cartpole-swingup") return std::make_unique<CartPoleSwingUpEnv>();
  throw std::invalid_argument("make_env: unknown environment '" + name + "'");
}

std::vector<std::string> env_names() {
  return {"pendulum", "pointmass", "cartpole-swingup"};
}

}  // namespace rewsac::envs
