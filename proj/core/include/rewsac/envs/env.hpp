#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rewsac/rng.hpp"

namespace rewsac::envs {

struct EnvSpec {
  std::string name;
  std::size_t state_dim = 0;
  std::size_t action_dim = 0;
  std::vector<double> action_low;
  std::vector<double> action_high;
  std::size_t horizon = 0;
};

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool done = false;
};

/// Analytic continuous-control environment with an exposed reward oracle.
/// Episodes run a fixed horizon: done is true exactly when step_index reaches
/// spec().horizon, never earlier. Dynamics are deterministic; randomness only
/// enters through reset(). Actions are clipped to the action bounds before
/// the dynamics, and the reported reward uses the clipped action.
class Env {
 public:
  virtual ~Env() = default;

  const EnvSpec& spec() const { return spec_; }

  std::vector<double> reset(std::uint64_t seed);
  /// Redraws an initial state from the env's own generator without reseeding.
  std::vector<double> reset();

  StepResult step(std::span<const double> action);

  /// Pure reward oracle r(s, a, s'); the same function scores imagined
  /// transitions produced by a learned model.
  virtual double reward(std::span<const double> s, std::span<const double> a,
                        std::span<const double> s_next) const = 0;

  std::span<const double> observation() const { return obs_; }
  std::size_t step_index() const { return step_index_; }

  // Checkpoint access.
  std::string rng_state() const { return rng_.serialize(); }
  void set_rng_state(const std::string& s) { rng_.deserialize(s); }
  void set_state(std::vector<double> obs, std::size_t step_index);

 protected:
  virtual std::vector<double> sample_initial(Rng& rng) const = 0;
  virtual std::vector<double> dynamics(std::span<const double> s,
                                       std::span<const double> a) const = 0;

  EnvSpec spec_;
  std::vector<double> obs_;
  std::size_t step_index_ = 0;
  Rng rng_{0};
};

/// Known names: "pendulum", "pointmass", "cartpole-swingup".
/// Throws std::invalid_argument for anything else.
std::unique_ptr<Env> make_env(const std::string& name);

std::vector<std::string> env_names();

}  // namespace rewsac::envs
