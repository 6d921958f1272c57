#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace rewsac {

/// Seedable random source. All randomness in the library flows through this
/// wrapper so that runs are reproducible and generator state can be captured
/// in checkpoints as a plain string. The normal() draw is stateless between
/// calls (no cached spare), so the engine state alone determines the stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (cosine branch only).
  double normal();

  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  /// Derive a seed for an independent child stream; advances this generator.
  std::uint64_t fork_seed() { return engine_(); }

  std::string serialize() const;
  void deserialize(const std::string& text);

 private:
  std::mt19937_64 engine_;
};

}  // namespace rewsac
