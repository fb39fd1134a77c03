#include "pcl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <tuple>
#include <type_traits>

#include "pcl/bounds.hpp"
#include "pcl/dynamics.hpp"
#include "pcl/errors.hpp"
#include "pcl/observables.hpp"
#include "pcl/rng.hpp"
#include "pcl/trajectory.hpp"

#ifndef PCL_VERSION_STRING
#define PCL_VERSION_STRING "0.0.0"
#endif

namespace pcl {

const char* tool_version() noexcept { return PCL_VERSION_STRING; }

const char* stop_rule_name(StopRule r) noexcept {
  switch (r) {
    case StopRule::paper: return "paper";
    case StopRule::exact_range: return "exact-range";
    case StopRule::lyapunov_theoretical: return "lyapunov-theoretical";
  }
  return "?";
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.n_grid.empty()) throw ConfigError("N", "grid must not be empty");
  if (cfg.eps_grid.empty()) throw ConfigError("epsilon", "grid must not be empty");
  for (std::size_t n : cfg.n_grid)
    if (n < 2) throw ConfigError("N", "every N must be >= 2");
  for (double e : cfg.eps_grid) {
    if (!(e > 0.0) || !std::isfinite(e)) throw ConfigError("epsilon", "every epsilon must be finite and > 0");
    if (cfg.model == Model::circle && !(e < 2.0 * kPi / 3.0))
      throw ConfigError("epsilon", "circle epsilon must be < 2pi/3");
  }
  if (cfg.trials < 1) throw ConfigError("trials", "must be >= 1");
  if (!(cfg.a < cfg.b) || !std::isfinite(cfg.a) || !std::isfinite(cfg.b))
    throw ConfigError("domain", "requires finite a < b");
  if (cfg.model == Model::box && cfg.dim < 1) throw ConfigError("D", "must be >= 1");
  if (cfg.model != Model::box && cfg.dim != 1) throw ConfigError("D", "only the box model takes D != 1");
  if (cfg.model == Model::circle && cfg.stopping == StopRule::lyapunov_theoretical)
    throw ConfigError("stopping", "lyapunov-theoretical does not apply to the circle model");
  if (cfg.max_steps && *cfg.max_steps < 1) throw ConfigError("max_steps", "must be >= 1");
  if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("format", "must be csv or json");
  if (cfg.initial) {
    if (cfg.n_grid.size() != 1) throw ConfigError("initial", "a forced initial state needs exactly one N");
    if (cfg.initial->size() != cfg.n_grid[0] * cfg.dim)
      throw ConfigError("initial", "length must equal N (times D for box)");
    for (double v : *cfg.initial) {
      if (cfg.model == Model::circle) {
        if (!(v >= 0.0 && v < kTwoPi)) throw ConfigError("initial", "angles must lie in [0, 2pi)");
      } else if (!(v >= cfg.a && v <= cfg.b)) {
        throw ConfigError("initial", "values must lie inside the domain");
      }
    }
  }
}

AggregateStats aggregate(std::span<const double> samples) {
  AggregateStats s;
  s.count = samples.size();
  if (samples.empty()) return s;
  double sum = 0.0;
  for (double v : samples) sum += v;
  s.mean = sum / static_cast<double>(s.count);
  if (s.count >= 2) {
    double ss = 0.0;
    for (double v : samples) ss += (v - s.mean) * (v - s.mean);
    s.std_dev = std::sqrt(ss / static_cast<double>(s.count - 1));
    s.std_error = *s.std_dev / std::sqrt(static_cast<double>(s.count));
  }
  return s;
}

std::uint64_t ResultTable::cap_exhausted_total() const {
  std::uint64_t total = 0;
  for (const auto& a : aggregates) total += a.cap_exhausted;
  return total;
}

std::uint64_t seed_for_trial(std::uint64_t master_seed, std::uint64_t model_id, std::uint64_t n,
                             std::uint64_t eps_index, std::uint64_t trial_index) {
  return mix_seed({master_seed, model_id, n, eps_index, trial_index});
}

std::uint64_t model_seed_id(Model model, std::size_t dim) {
  return static_cast<std::uint64_t>(model) | (static_cast<std::uint64_t>(dim) << 8);
}

std::pair<double, double> cell_bound(const ExperimentConfig& cfg, std::size_t n, double eps) {
  switch (cfg.model) {
    case Model::scalar: {
      const auto b = t_eps_bound_uniform_init(n, eps, cfg.a, cfg.b);
      return {b.exact, b.simplified};
    }
    case Model::box: {
      const auto b = t_eps_bound_vector(n, cfg.dim, eps, UniformCube{cfg.a, cfg.b});
      return {b.exact, b.simplified};
    }
    case Model::circle: {
      if (n < 3) {
        const double inf = std::numeric_limits<double>::infinity();
        return {inf, inf};
      }
      const double v = t_eps_bound_circle(n, eps);
      return {v, v};
    }
  }
  return {0.0, 0.0};
}

std::uint64_t default_step_cap(const ExperimentConfig& cfg, std::size_t n, double eps) {
  if (cfg.max_steps) return *cfg.max_steps;
  const double b = cell_bound(cfg, n, eps).second;
  if (std::isfinite(b) && b < 1e9) return static_cast<std::uint64_t>(std::ceil(10.0 * b));
  return kDefaultStepCap;
}

namespace {

struct Cell {
  std::size_t n;
  std::size_t eps_index;
  double eps;
};

struct TrialOutput {
  TrialRow row;
  std::vector<TraceRow> trace;
};

TraceRow trace_row(const TrialRow& base, std::uint64_t step, const ObservableFrame& f) {
  TraceRow t;
  t.model = base.model;
  t.n = base.n;
  t.dim = base.dim;
  t.eps = base.eps;
  t.trial = base.trial;
  t.step = step;
  t.lyapunov = f.lyapunov ? f.lyapunov : f.lyapunov_total;
  t.range = f.range.value_or(0.0);
  t.mean = f.mean;
  if (f.vector_sum) {
    t.sum_x = (*f.vector_sum)[0];
    t.sum_y = (*f.vector_sum)[1];
  }
  t.gamma_max = f.gamma_max;
  return t;
}

template <class State>
void add_trace_observer(TrajectoryOptions<State>& opts, const ExperimentConfig& cfg, const TrialRow& base,
                        std::vector<TraceRow>& out) {
  if (cfg.trace_every == 0 || base.trial >= cfg.trace_trials) return;
  opts.observe_every = cfg.trace_every;
  opts.observers.push_back([&cfg, &base, &out](std::uint64_t k, const State& x) {
    if constexpr (std::is_same_v<State, VectorState>) {
      out.push_back(trace_row(base, k, make_frame(k, x)));
    } else if (cfg.model == Model::circle) {
      out.push_back(trace_row(base, k, make_circle_frame(k, x)));
    } else {
      out.push_back(trace_row(base, k, make_frame(k, std::span<const double>(x))));
    }
  });
}

TrialOutput run_one(const ExperimentConfig& cfg, const Cell& cell, std::uint64_t trial) {
  TrialOutput out;
  TrialRow& r = out.row;
  r.model = cfg.model;
  r.n = cell.n;
  r.dim = cfg.dim;
  r.eps = cell.eps;
  r.trial = trial;
  r.seed = seed_for_trial(cfg.master_seed, model_seed_id(cfg.model, cfg.dim), cell.n, cell.eps_index, trial);
  RngStream rng(r.seed);
  const double n = static_cast<double>(cell.n);
  const double e2 = cell.eps * cell.eps;
  const std::uint64_t cap = default_step_cap(cfg, cell.n, cell.eps);

  if (cfg.model == Model::scalar) {
    ScalarState x = cfg.initial ? *cfg.initial : init_uniform(rng, IntervalDomain{cfg.a, cfg.b}, cell.n);
    TrajectoryOptions<ScalarState> opts;
    opts.max_steps = cap;
    switch (cfg.stopping) {
      case StopRule::paper: opts.policies.push_back(LyapunovThreshold{2.0 * e2}); break;
      case StopRule::exact_range: opts.policies.push_back(RangeThreshold{cell.eps}); break;
      case StopRule::lyapunov_theoretical: opts.policies.push_back(LyapunovThreshold{n * e2}); break;
    }
    opts.policies.push_back(LyapunovThreshold{n * e2});
    add_trace_observer(opts, cfg, r, out.trace);
    const auto rec = run_scalar_trajectory(rng, x, opts);
    r.t_eps = rec.stopping.first_hit[0];
    r.t_eps_prime = rec.stopping.first_hit[1];
    r.cap_hit = rec.stopping.cap_exhausted;
    r.final_range = range_scalar(x);
    r.final_lyapunov = lyapunov_scalar(x);
    r.final_mean = {mean_state(x)};
  } else if (cfg.model == Model::box) {
    VectorState x = cfg.initial ? VectorState(cell.n, cfg.dim, *cfg.initial)
                                : init_uniform(rng, BoxDomain{cfg.a, cfg.b, cfg.dim}, cell.n);
    TrajectoryOptions<VectorState> opts;
    opts.max_steps = cap;
    switch (cfg.stopping) {
      case StopRule::paper: opts.policies.push_back(VectorLyapunovThreshold{2.0 * e2, true}); break;
      case StopRule::exact_range: opts.policies.push_back(RangeThreshold{cell.eps}); break;
      case StopRule::lyapunov_theoretical: opts.policies.push_back(VectorLyapunovThreshold{n * e2, false}); break;
    }
    opts.policies.push_back(VectorLyapunovThreshold{n * e2, false});
    add_trace_observer(opts, cfg, r, out.trace);
    const auto rec = run_vector_trajectory(rng, x, opts);
    r.t_eps = rec.stopping.first_hit[0];
    r.t_eps_prime = rec.stopping.first_hit[1];
    r.cap_hit = rec.stopping.cap_exhausted;
    r.final_range = range_vector(x);
    r.final_lyapunov = lyapunov_per_dimension(x).total;
    r.final_mean = mean_state(x);
  } else {
    AngularState x = cfg.initial ? *cfg.initial : init_uniform_circle(rng, cell.n);
    TrajectoryOptions<AngularState> opts;
    opts.max_steps = cap;
    // Once in a half-disk the circular diameter is 2pi - gamma_max, so the
    // exact-range rule and the paper rule coincide for eps < 2pi/3.
    opts.policies.push_back(CircleArc{cell.eps});
    opts.policies.push_back(HalfDisk{});
    add_trace_observer(opts, cfg, r, out.trace);
    const auto rec = run_circle_trajectory(rng, x, opts);
    r.t_eps = rec.stopping.first_hit[0];
    r.t_hd = rec.stopping.first_hit[1];
    r.cap_hit = rec.stopping.cap_exhausted;
    r.final_range = circle_pairwise_diameter(x);
    const auto s = vector_sum(x);
    if (!s.degenerate) r.final_mean = {std::atan2(s.s[1], s.s[0])};
  }
  return out;
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& cfg, std::size_t workers) {
  validate(cfg);
  std::vector<Cell> cells;
  for (std::size_t n : cfg.n_grid)
    for (std::size_t e = 0; e < cfg.eps_grid.size(); ++e) cells.push_back({n, e, cfg.eps_grid[e]});

  const std::size_t per_cell = cfg.trials;
  const std::size_t total = cells.size() * per_cell;
  std::vector<TrialOutput> outputs(total);

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<std::size_t>(workers, std::max<std::size_t>(total, 1));

  // Each task writes only its own slot, so the layout is fixed by task index.
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= total) return;
      try {
        outputs[t] = run_one(cfg, cells[t / per_cell], t % per_cell);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(total);
        return;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  ResultTable table;
  table.master_seed = cfg.master_seed;
  table.trials.reserve(total);
  for (auto& o : outputs) {
    table.trials.push_back(std::move(o.row));
    for (auto& tr : o.trace) table.traces.push_back(std::move(tr));
  }

  for (std::size_t c = 0; c < cells.size(); ++c) {
    AggregateRow a;
    a.model = cfg.model;
    a.n = cells[c].n;
    a.dim = cfg.dim;
    a.eps = cells[c].eps;
    a.trials = per_cell;
    std::vector<double> t, thd;
    for (std::size_t i = 0; i < per_cell; ++i) {
      const auto& row = table.trials[c * per_cell + i];
      if (row.cap_hit) ++a.cap_exhausted;
      if (row.t_eps) t.push_back(static_cast<double>(*row.t_eps));
      if (row.t_hd) thd.push_back(static_cast<double>(*row.t_hd));
    }
    a.t_hat = aggregate(t);
    if (cfg.model == Model::circle) a.thd_hat = aggregate(thd);
    std::tie(a.bound_exact, a.bound_simplified) = cell_bound(cfg, a.n, a.eps);
    table.aggregates.push_back(std::move(a));
  }
  return table;
}

std::vector<ExperimentConfig> paper_presets(Model model, PresetScale scale) {
  ExperimentConfig base;
  base.model = model;
  base.master_seed = 20240601;
  base.stopping = StopRule::paper;
  std::vector<std::size_t> dims{1};

  if (model == Model::box) {
    switch (scale) {
      case PresetScale::full:
        base.n_grid = {5, 10, 50, 100, 250};
        base.eps_grid = {5e-4, 1e-3, 5e-3, 0.01, 0.05, 0.1};
        base.trials = 1000;
        dims = {2, 3, 4};
        break;
      case PresetScale::reduced:
        base.n_grid = {5, 10, 50};
        base.eps_grid = {1e-3, 0.01, 0.1};
        base.trials = 1000;
        dims = {2, 3};
        break;
      case PresetScale::desk:
        base.n_grid = {5, 10, 20};
        base.eps_grid = {1e-3, 0.01, 0.1};
        base.trials = 50;
        dims = {2};
        break;
    }
  } else {
    switch (scale) {
      case PresetScale::full:
        base.n_grid = {5, 10, 100, 250, 500, 750, 1000};
        base.eps_grid = {1e-4, 5e-4, 1e-3, 5e-3, 1e-2, 5e-2, 0.1};
        base.trials = 1000;
        break;
      case PresetScale::reduced:
        base.n_grid = {5, 10, 100, 250, 500};
        base.eps_grid = {1e-4, 5e-4, 1e-3, 5e-3, 1e-2, 5e-2, 0.1};
        base.trials = 1000;
        break;
      case PresetScale::desk:
        base.n_grid = {5, 10, 20, 50};
        base.eps_grid = {1e-3, 1e-2, 0.1};
        base.trials = 50;
        break;
    }
  }

  std::vector<ExperimentConfig> out;
  for (std::size_t d : dims) {
    ExperimentConfig c = base;
    c.dim = d;
    out.push_back(c);
  }
  return out;
}

}  // namespace pcl
