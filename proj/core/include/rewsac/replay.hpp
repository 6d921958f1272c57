#pragma once

#include <cstdint>
#include <vector>

#include "rewsac/rng.hpp"

namespace rewsac {

struct Transition {
  std::vector<double> s;
  std::vector<double> a;
  double r = 0.0;
  std::vector<double> s_next;
  std::int64_t episode_id = 0;
  std::int64_t step_in_episode = 0;
};

/// FIFO buffer of real transitions with episode structure. Supports uniform
/// batch sampling, contiguous in-episode state/action-sequence sampling for
/// model rollouts, and with-replacement bootstrap index sets for ensemble
/// training. All sampling is reproducible from the given generator.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  /// Index 0 is the oldest retained transition.
  const Transition& at(std::size_t i) const { return entries_[i]; }

  /// n transitions uniform with replacement. Throws on an empty buffer.
  std::vector<Transition> sample_batch(std::size_t n, Rng& rng) const;

  struct StateActionSequence {
    std::vector<double> start_state;
    std::vector<std::vector<double>> actions;
  };

  /// Each returned sequence is `horizon` consecutive real actions from a
  /// single episode starting at the returned real state. Throws if no stored
  /// episode has `horizon` consecutive steps.
  std::vector<StateActionSequence> sample_state_action_sequences(
      std::size_t count, std::size_t horizon, Rng& rng) const;

  /// One index multiset per model, each of size() indices drawn uniformly
  /// with replacement. Throws on an empty buffer.
  std::vector<std::vector<std::size_t>> bootstrap_datasets(std::size_t models,
                                                           Rng& rng) const;

  // Checkpoint access.
  const std::vector<Transition>& entries() const { return entries_; }
  void restore(std::vector<Transition> entries);

 private:
  bool sequence_ok(std::size_t start, std::size_t horizon) const;

  std::size_t capacity_;
  std::vector<Transition> entries_;  // oldest first
};

}  // namespace rewsac
