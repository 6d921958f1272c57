#include "rewsac/replay.hpp"

#include <stdexcept>
#include <string>

namespace rewsac {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) {
    throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  }
  entries_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  if (entries_.size() == capacity_) {
    entries_.erase(entries_.begin());
  }
  entries_.push_back(std::move(t));
}

std::vector<Transition> ReplayBuffer::sample_batch(std::size_t n,
                                                   Rng& rng) const {
  if (entries_.empty()) {
    throw std::runtime_error("ReplayBuffer::sample_batch: empty buffer");
  }
  std::vector<Transition> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(entries_[rng.index(entries_.size())]);
  }
  return out;
}

bool ReplayBuffer::sequence_ok(std::size_t start, std::size_t horizon) const {
  if (start + horizon > entries_.size()) return false;
  const Transition& first = entries_[start];
  for (std::size_t k = 1; k < horizon; ++k) {
    const Transition& t = entries_[start + k];
    if (t.episode_id != first.episode_id ||
        t.step_in_episode != first.step_in_episode + std::int64_t(k)) {
      return false;
    }
  }
  return true;
}

std::vector<ReplayBuffer::StateActionSequence>
ReplayBuffer::sample_state_action_sequences(std::size_t count,
                                            std::size_t horizon,
                                            Rng& rng) const {
  if (horizon == 0) {
    throw std::invalid_argument("sample_state_action_sequences: horizon >= 1");
  }
  if (entries_.size() < horizon) {
    throw std::runtime_error(
        "sample_state_action_sequences: no stored episode has " +
        std::to_string(horizon) + " consecutive steps");
  }

  std::vector<StateActionSequence> out;
  out.reserve(count);
  std::size_t starts = entries_.size() - horizon + 1;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t start = 0;
    bool found = false;
    // Rejection sampling stays uniform over valid starts; episodes are
    // mostly contiguous so acceptance is high.
    for (int attempt = 0; attempt < 256; ++attempt) {
      start = rng.index(starts);
      if (sequence_ok(start, horizon)) {
        found = true;
        break;
      }
    }
    if (!found) {
      // Exhaustive fallback: collect every valid start once and pick.
      std::vector<std::size_t> valid;
      for (std::size_t sidx = 0; sidx < starts; ++sidx) {
        if (sequence_ok(sidx, horizon)) valid.push_back(sidx);
      }
      if (valid.empty()) {
        throw std::runtime_error(
            "sample_state_action_sequences: no stored episode has " +
            std::to_string(horizon) + " consecutive steps");
      }
      start = valid[rng.index(valid.size())];
    }
    StateActionSequence seq;
    seq.start_state = entries_[start].s;
    seq.actions.reserve(horizon);
    for (std::size_t k = 0; k < horizon; ++k) {
      seq.actions.push_back(entries_[start + k].a);
    }
    out.push_back(std::move(seq));
  }
  return out;
}

std::vector<std::vector<std::size_t>> ReplayBuffer::bootstrap_datasets(
    std::size_t models, Rng& rng) const {
  if (entries_.empty()) {
    throw std::runtime_error("ReplayBuffer::bootstrap_datasets: empty buffer");
  }
  std::vector<std::vector<std::size_t>> out(models);
  std::size_t n = entries_.size();
  for (auto& indices : out) {
    indices.resize(n);
    for (std::size_t i = 0; i < n; ++i) indices[i] = rng.index(n);
  }
  return out;
}

void ReplayBuffer::restore(std::vector<Transition> entries) {
  if (entries.size() > capacity_) {
    throw std::invalid_argument("ReplayBuffer::restore: over capacity");
  }
  entries_ = std::move(entries);
}

}  // namespace rewsac
