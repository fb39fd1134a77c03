#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pcl {

// SplitMix64 finalizer. Used only to derive seeds, never as the stream itself.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Folds a list of fields into one seed with a splitmix avalanche per field.
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> fields) noexcept;

// Per-trajectory random stream. Not thread-safe; one stream per trial.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  // Stream for (master_seed, trial_index) when no experiment grid is involved.
  static RngStream for_trial(std::uint64_t master_seed, std::uint64_t trial_index) {
    return RngStream(mix_seed({master_seed, trial_index}));
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer on [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    std::uniform_int_distribution<std::uint64_t> dist(0, bound - 1);
    return dist(engine_);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pcl
