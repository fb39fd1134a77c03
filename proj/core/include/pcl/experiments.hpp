#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pcl/state.hpp"

namespace pcl {

const char* tool_version() noexcept;

// Which event defines T_eps in an experiment.
//   paper: L <= 2 eps^2 (scalar), every L_d <= 2 eps^2 (box), gamma_max >= 2pi - eps (circle)
//   exact_range: range <= eps (Euclidean for box, circular diameter for circle)
//   lyapunov_theoretical: L <= N eps^2 (scalar), L_T <= N eps^2 (box)
enum class StopRule { paper, exact_range, lyapunov_theoretical };

const char* stop_rule_name(StopRule r) noexcept;

struct ExperimentConfig {
  Model model = Model::scalar;
  std::vector<std::size_t> n_grid;
  std::vector<double> eps_grid;
  std::size_t dim = 1;
  double a = 0.0;
  double b = 1.0;
  std::uint64_t trials = 1000;
  std::uint64_t master_seed = 0;
  bool master_seed_given = false;  // set when the config file names a seed
  StopRule stopping = StopRule::paper;
  std::optional<std::uint64_t> max_steps;
  // Forced initial state (row-major for box); requires a single N.
  std::optional<std::vector<double>> initial;
  std::uint64_t trace_every = 0;  // 0 disables traces
  std::uint64_t trace_trials = 1;
  std::string output_path = "out";
  std::string format = "csv";
  std::size_t workers = 0;  // 0: hardware concurrency
};

// Throws ConfigError naming the first offending field.
void validate(const ExperimentConfig& cfg);

struct AggregateStats {
  std::uint64_t count = 0;
  double mean = 0.0;
  std::optional<double> std_dev;    // unbiased, needs count >= 2
  std::optional<double> std_error;  // std_dev / sqrt(count)
};

AggregateStats aggregate(std::span<const double> samples);

struct TrialRow {
  Model model = Model::scalar;
  std::size_t n = 0;
  std::size_t dim = 1;
  double eps = 0.0;
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> t_eps;
  std::optional<std::uint64_t> t_eps_prime;
  std::optional<std::uint64_t> t_hd;
  bool cap_hit = false;
  double final_range = 0.0;
  std::optional<double> final_lyapunov;
  std::vector<double> final_mean;

  friend bool operator==(const TrialRow&, const TrialRow&) = default;
};

struct AggregateRow {
  Model model = Model::scalar;
  std::size_t n = 0;
  std::size_t dim = 1;
  double eps = 0.0;
  std::uint64_t trials = 0;
  AggregateStats t_hat;
  std::optional<AggregateStats> thd_hat;
  double bound_exact = 0.0;
  double bound_simplified = 0.0;
  std::uint64_t cap_exhausted = 0;  // not serialized; reported separately
};

struct TraceRow {
  Model model = Model::scalar;
  std::size_t n = 0;
  std::size_t dim = 1;
  double eps = 0.0;
  std::uint64_t trial = 0;
  std::uint64_t step = 0;
  std::optional<double> lyapunov;
  double range = 0.0;
  std::vector<double> mean;
  std::optional<double> sum_x;
  std::optional<double> sum_y;
  std::optional<double> gamma_max;
};

struct ResultTable {
  std::uint64_t master_seed = 0;
  std::vector<TrialRow> trials;
  std::vector<AggregateRow> aggregates;
  std::vector<TraceRow> traces;

  std::uint64_t cap_exhausted_total() const;
};

// Folds (master_seed, model_id, N, eps_index, trial_index) through a
// splitmix avalanche; see mix_seed.
std::uint64_t seed_for_trial(std::uint64_t master_seed, std::uint64_t model_id, std::uint64_t n,
                             std::uint64_t eps_index, std::uint64_t trial_index);

// Model id used for seeding: the model tag in the low byte, D above it.
std::uint64_t model_seed_id(Model model, std::size_t dim);

// Theoretical bound pair for one cell (exact, simplified).
std::pair<double, double> cell_bound(const ExperimentConfig& cfg, std::size_t n, double eps);

// 10x the simplified bound when finite and below 1e9, else 1e8.
std::uint64_t default_step_cap(const ExperimentConfig& cfg, std::size_t n, double eps);

// Runs every (N, eps) cell. Output is identical for any worker count.
ResultTable run_experiment(const ExperimentConfig& cfg, std::size_t workers);

enum class PresetScale { full, reduced, desk };

// The built-in grids. Box presets come back one config per D.
std::vector<ExperimentConfig> paper_presets(Model model, PresetScale scale);

}  // namespace pcl
