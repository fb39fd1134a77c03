#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pcl/rng.hpp"

namespace pcl {

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

struct DriftMonteCarlo {
  MeanEstimate drift_dot_s;       // <S' - S, S>
  MeanEstimate expected_norm_sq;  // ‖S'‖^2
};

// One-step samples from the fixed configuration `theta`.
DriftMonteCarlo one_step_drift_monte_carlo(std::span<const double> theta, std::uint64_t samples, RngStream& rng);

// Fraction of one-step samples where gamma_max strictly drops, with its
// binomial standard error.
MeanEstimate gamma_max_decrease_probability(std::span<const double> theta, std::uint64_t samples, RngStream& rng);

struct IdentitySuiteOptions {
  std::uint64_t seed = 7;
  std::size_t configs = 1000;
  std::vector<std::size_t> n_values{3, 10, 50};
  std::size_t mc_configs_per_n = 10;  // drift Monte Carlo runs on the first few of each N
  std::uint64_t mc_samples = 100000;
  double identity_tol = 1e-9;  // times N^2
  double z_limit = 4.0;
};

struct IdentityFailure {
  std::string check;
  std::vector<double> theta;
  double value = 0.0;
  double limit = 0.0;
};

struct IdentitySuiteReport {
  std::size_t configs = 0;
  std::size_t degenerate = 0;
  std::size_t mc_configs = 0;
  double worst_identity_ratio = 0.0;  // residual / (tol N^2)
  double worst_z = 0.0;
  std::vector<IdentityFailure> failures;

  bool passed() const { return failures.empty(); }
};

IdentitySuiteReport run_identity_suite(const IdentitySuiteOptions& opt);

}  // namespace pcl
