// Acceptance harness. `pcl_acceptance` runs every criterion; `pcl_acceptance 3 7`
// runs a subset. One PASS/FAIL line per criterion; exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "pcl/analysis.hpp"
#include "pcl/bounds.hpp"
#include "pcl/dynamics.hpp"
#include "pcl/experiments.hpp"
#include "pcl/markov.hpp"
#include "pcl/observables.hpp"
#include "pcl/persist.hpp"
#include "pcl/properties.hpp"
#include "pcl/stopping.hpp"
#include "pcl/trajectory.hpp"
#include "stats.hpp"

using namespace pcl;
using testing_stats::Accumulator;

namespace {

// Pinned tolerances.
constexpr double kZ = 4.0;
constexpr double kMarkovRelGap = 1e-9;
constexpr double kIdentityTol = 1e-9;  // times N^2
constexpr double kAnalyticTol = 1e-3;
constexpr double kThdSlopeLo = 0.8, kThdSlopeHi = 1.05;
constexpr double kOneDSlopeLo = 0.7, kOneDSlopeHi = 1.05;
constexpr double kCnMin = 0.9;

constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// 1. One-step contraction of the Lyapunov quantity.
void one_step_contraction(Outcome& o) {
  double worst = 0.0;
  for (std::size_t n : {2u, 3u, 5u, 10u}) {
    RngStream rng(mix_seed({kSeed, 1, n}));
    const auto x0 = init_uniform(rng, IntervalDomain{}, n);
    const double target = contraction_factor(n) * lyapunov_scalar(x0);
    Accumulator acc;
    auto x = x0;
    for (int m = 0; m < 100000; ++m) {
      x = x0;
      step_scalar(rng, x);
      acc.add(lyapunov_scalar(x));
    }
    const double z = std::fabs(acc.z(target));
    worst = std::max(worst, z);
    o.require(z <= kZ, "N=" + std::to_string(n) + " z=" + num(z));
  }
  o.detail << " N in {2,3,5,10}, 1e5 samples, worst |z|=" << num(worst) << " (limit " << kZ << ")";
}

// 2. Multi-step decay and the range sandwich for uniform starts.
void multi_step_decay(Outcome& o) {
  const std::size_t n = 5;
  const std::vector<std::uint64_t> ks{1, 5, 20};
  std::map<std::uint64_t, Accumulator> lyap, range_sq;
  for (std::uint64_t t = 0; t < 2000; ++t) {
    RngStream rng(mix_seed({kSeed, 2, t}));
    auto x = init_uniform(rng, IntervalDomain{}, n);
    for (std::uint64_t k = 1; k <= ks.back(); ++k) {
      step_scalar(rng, x);
      if (k == 1 || k == 5 || k == 20) {
        lyap[k].add(lyapunov_scalar(x));
        const double r = range_scalar(x);
        range_sq[k].add(r * r);
      }
    }
  }
  double worst = 0.0;
  for (auto k : ks) {
    const double target = std::pow(49.0 / 60.0, static_cast<double>(k)) * (10.0 / 3.0);
    const double z = std::fabs(lyap[k].z(target));
    worst = std::max(worst, z);
    o.require(z <= kZ, "E L at k=" + std::to_string(k) + " z=" + num(z));
    const auto sw = expected_range_sq_bounds_uniform(k, n, 0.0, 1.0);
    const double m = range_sq[k].mean(), se = range_sq[k].std_error();
    o.require(m >= sw.lower - kZ * se && m <= sw.upper + kZ * se,
              "E r^2 at k=" + std::to_string(k) + "=" + num(m) + " outside [" + num(sw.lower) + "," +
                  num(sw.upper) + "]");
  }
  o.detail << " N=5, 2000 trajectories, k in {1,5,20}, worst |z|=" << num(worst)
           << ", E r^2 inside sandwich up to " << kZ << " SE";
}

// 3. Empirical first-hit time under the uniform-start bound.
void bound_dominance(Outcome& o) {
  ExperimentConfig c;
  c.model = Model::scalar;
  c.n_grid = {5, 10, 100};
  c.eps_grid = {1e-3, 1e-2, 1e-1};
  c.trials = 1000;
  c.stopping = StopRule::exact_range;
  c.master_seed = kSeed;
  const auto t = run_experiment(c, 0);
  double worst = 0.0;
  for (const auto& a : t.aggregates) {
    const double ratio = a.t_hat.mean / a.bound_exact;
    worst = std::max(worst, ratio);
    o.require(a.t_hat.mean <= a.bound_exact && a.t_hat.count == c.trials,
              "N=" + std::to_string(a.n) + " eps=" + num(a.eps) + " T=" + num(a.t_hat.mean) + " bound=" +
                  num(a.bound_exact));
  }
  const auto ref = t_eps_bound_uniform_init(10, 0.01, 0.0, 1.0);
  o.detail << " 9 cells x 1000 trials, max T_hat/bound=" << num(worst) << ", N=10 eps=0.01 bound exact "
           << num(ref.exact) << " simplified " << num(ref.simplified);
}

// 4. Consensus value is unbiased; expected-state predictor matches.
void limit_mean(Outcome& o) {
  const std::size_t n = 5;
  Accumulator diff;
  for (std::uint64_t t = 0; t < 2000; ++t) {
    RngStream rng(mix_seed({kSeed, 4, t}));
    auto x = init_uniform(rng, IntervalDomain{}, n);
    const double start = mean_state(x);
    TrajectoryOptions<ScalarState> opts;
    opts.policies = {RangeThreshold{1e-6}};
    const auto rec = run_scalar_trajectory(rng, x, opts);
    o.require(!rec.stopping.cap_exhausted, "trial " + std::to_string(t) + " hit the step cap");
    diff.add(mean_state(x) - start);
  }
  const double z0 = std::fabs(diff.z(0.0));
  o.require(z0 <= kZ, "x_inf - mean0 z=" + num(z0));

  RngStream init(mix_seed({kSeed, 4, 9999}));
  const auto x0 = init_uniform(init, IntervalDomain{}, n);
  double worst = 0.0;
  for (std::uint64_t k : {1u, 10u}) {
    const auto predicted = expected_state(k, x0);
    std::vector<Accumulator> acc(n);
    RngStream rng(mix_seed({kSeed, 4, k}));
    for (int m = 0; m < 100000; ++m) {
      auto x = x0;
      for (std::uint64_t s = 0; s < k; ++s) step_scalar(rng, x);
      for (std::size_t i = 0; i < n; ++i) acc[i].add(x[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double z = std::fabs(acc[i].z(predicted[i]));
      worst = std::max(worst, z);
      o.require(z <= kZ, "E X_k[" + std::to_string(i) + "] k=" + std::to_string(k) + " z=" + num(z));
    }
  }
  o.detail << " N=5, 2000 trials to range<=1e-6, |z(x_inf - mean0)|=" << num(z0)
           << "; expected_state at k in {1,10}, 1e5 samples, worst |z|=" << num(worst);
}

// 5. D-dimensional bound dominance and per-dimension contraction.
void box_dimensions(Outcome& o) {
  double worst = 0.0;
  for (std::size_t d : {2u, 3u}) {
    ExperimentConfig c;
    c.model = Model::box;
    c.dim = d;
    c.n_grid = {5, 10, 50};
    c.eps_grid = {1e-2, 1e-1};
    c.trials = 1000;
    c.stopping = StopRule::exact_range;
    c.master_seed = kSeed;
    const auto t = run_experiment(c, 0);
    for (const auto& a : t.aggregates) {
      worst = std::max(worst, a.t_hat.mean / a.bound_exact);
      o.require(a.t_hat.mean <= a.bound_exact && a.t_hat.count == c.trials,
                "D=" + std::to_string(d) + " N=" + std::to_string(a.n) + " eps=" + num(a.eps));
    }
  }
  double worst_z = 0.0;
  const std::size_t n = 5;
  for (std::size_t d : {2u, 3u}) {
    std::map<std::uint64_t, std::vector<Accumulator>> lyap;
    for (std::uint64_t t = 0; t < 2000; ++t) {
      RngStream rng(mix_seed({kSeed, 5, d, t}));
      auto x = init_uniform(rng, BoxDomain{0.0, 1.0, d}, n);
      for (std::uint64_t k = 1; k <= 20; ++k) {
        step_vector(rng, x);
        if (k == 1 || k == 5 || k == 20) {
          auto& slot = lyap[k];
          slot.resize(d);
          const auto l = lyapunov_per_dimension(x);
          for (std::size_t j = 0; j < d; ++j) slot[j].add(l.per_dim[j]);
        }
      }
    }
    for (auto& [k, accs] : lyap) {
      const double target = std::pow(49.0 / 60.0, static_cast<double>(k)) * (10.0 / 3.0);
      for (std::size_t j = 0; j < d; ++j) {
        const double z = std::fabs(accs[j].z(target));
        worst_z = std::max(worst_z, z);
        o.require(z <= kZ, "D=" + std::to_string(d) + " dim " + std::to_string(j) + " k=" + std::to_string(k));
      }
    }
  }
  o.detail << " D in {2,3}, 12 cells x 1000 trials, max T_hat/bound=" << num(worst)
           << "; per-dimension decay N=5 worst |z|=" << num(worst_z);
}

// 6. Half-disk absorption and ordering against the arc criterion.
void circle_stability(Outcome& o) {
  std::uint64_t trials = 0, stable = 0, ordered = 0;
  for (std::size_t n : {5u, 50u}) {
    for (std::uint64_t t = 0; t < 2000; ++t) {
      RngStream rng(mix_seed({kSeed, 6, n, t}));
      auto theta = init_uniform_circle(rng, n);
      bool seen = false, lost = false;
      TrajectoryOptions<AngularState> opts;
      opts.policies = {HalfDisk{}, CircleArc{0.1}};
      opts.observe_every = 1;
      opts.observers.push_back([&](std::uint64_t, const AngularState& s) {
        const bool now = half_disk_witness(s).has_value();
        if (seen && !now) lost = true;
        seen = seen || now;
      });
      const auto rec = run_circle_trajectory(rng, theta, opts);
      ++trials;
      const auto& hit = rec.stopping.first_hit;
      if (!lost && seen) ++stable;
      if (hit[0] && hit[1] && *hit[0] <= *hit[1]) ++ordered;
    }
  }
  o.require(stable == trials, "half-disk lost in " + std::to_string(trials - stable) + " trials");
  o.require(ordered == trials, "T_HD > T_arc in " + std::to_string(trials - ordered) + " trials");
  o.detail << " N in {5,50}, " << trials << " trajectories, witness stable " << stable << "/" << trials
           << ", T_HD <= T_arc(0.1) " << ordered << "/" << trials;
}

// 7. Regression slopes on the reduced grid.
void circle_empirical_laws(Outcome& o) {
  const auto scalar = paper_presets(Model::scalar, PresetScale::reduced).at(0);
  const auto st = run_experiment(scalar, 0);
  o.require(st.cap_exhausted_total() == 0, "1D cap exhausted");
  const auto sf = fit_grid(st.aggregates);
  double min_cn = 1e300;
  for (const auto& f : sf.per_n)
    if (f.n >= 100) min_cn = std::min(min_cn, f.c);
  const double a = sf.offset ? sf.offset->a : std::nan("");
  o.require(sf.offset && a >= kOneDSlopeLo && a <= kOneDSlopeHi,
            "1D a=" + num(a) + " not in [" + num(kOneDSlopeLo) + "," + num(kOneDSlopeHi) + "]");
  o.require(min_cn >= kCnMin, "c_N=" + num(min_cn) + " < " + num(kCnMin));

  const auto circle = paper_presets(Model::circle, PresetScale::reduced).at(0);
  const auto ct = run_experiment(circle, 0);
  o.require(ct.cap_exhausted_total() == 0, "circle cap exhausted");
  const auto cf = fit_grid(ct.aggregates);
  const double ahd = cf.thd ? cf.thd->a_hd : std::nan("");
  o.require(cf.thd && ahd >= kThdSlopeLo && ahd <= kThdSlopeHi,
            "a_HD=" + num(ahd) + " not in [" + num(kThdSlopeLo) + "," + num(kThdSlopeHi) + "]");
  o.detail << " reduced grid N in {5,10,100,250,500}, 7 eps, 1000 trials: 1D a=" << num(a)
           << " b=" << num(sf.offset ? sf.offset->b : std::nan("")) << " min c_N(N>=100)=" << num(min_cn)
           << "; circle a_HD=" << num(ahd) << " f_HD=" << num(cf.thd ? cf.thd->f_hd : std::nan(""));
}

// 8. Closed-form absorption time against the tridiagonal solve.
void markov_oracle(Outcome& o) {
  double worst = 0.0;
  for (std::size_t n = 1; n <= 12; ++n)
    for (double c : {0.01, 0.1, 0.3, 0.45}) {
      const double closed = absorption_closed_form(n, c).value;
      const double solved = absorption_solve(n, c).expected.at(0);
      worst = std::max(worst, std::fabs(closed - solved) / solved);
    }
  o.require(worst <= kMarkovRelGap, "relative gap " + num(worst));
  for (double c : {0.01, 0.1, 0.3, 0.45}) {
    const double v = absorption_closed_form(1, c).value;
    o.require(std::fabs(v - 1.0 / c) <= kMarkovRelGap * (1.0 / c), "n=1 c=" + num(c));
  }
  const double twelve = absorption_closed_form(2, 1.0 / 3.0).value;
  o.require(std::fabs(twelve - 12.0) <= kMarkovRelGap * 12.0, "n=2 c=1/3 gives " + num(twelve));
  o.detail << " 48 (n,c) pairs, worst relative gap " << num(worst) << " (limit " << kMarkovRelGap << ")";
}

// 9. Circle identities, drift Monte Carlo and the two-agent values.
void circle_identities(Outcome& o) {
  IdentitySuiteOptions opt;
  opt.identity_tol = kIdentityTol;
  opt.z_limit = kZ;
  const auto r = run_identity_suite(opt);
  o.require(r.passed(), std::to_string(r.failures.size()) + " identity/drift failures");
  const auto d = one_step_drift_closed_form(std::vector<double>{0.0, std::numbers::pi / 2.0});
  o.require(std::fabs(d.drift_dot_s - 0.54637) <= kAnalyticTol, "drift " + num(d.drift_dot_s));
  o.require(std::fabs(d.expected_norm_sq - 3.62107) <= kAnalyticTol, "norm " + num(d.expected_norm_sq));
  o.detail << " " << r.configs << " configs, worst residual/(1e-9 N^2)=" << num(r.worst_identity_ratio) << ", "
           << r.mc_configs << " MC configs x 1e5 samples worst |z|=" << num(r.worst_z) << "; N=2 values "
           << num(d.drift_dot_s) << ", " << num(d.expected_norm_sq);
}

// 10. Probability that the maximal empty angle shrinks in one step.
void gamma_max_bound(Outcome& o) {
  double worst = -1e300;
  std::size_t configs = 0;
  auto check = [&](const std::vector<double>& theta, RngStream& rng) {
    const double n = static_cast<double>(theta.size());
    const double limit = 0.5 * (1.0 - 1.0 / n);
    const auto p = gamma_max_decrease_probability(theta, 100000, rng);
    const double margin = (p.mean - limit) / std::max(p.std_error, 1e-300);
    worst = std::max(worst, p.mean - (limit + kZ * p.std_error));
    o.require(p.mean <= limit + kZ * p.std_error,
              "N=" + std::to_string(theta.size()) + " p=" + num(p.mean) + " z=" + num(margin));
    ++configs;
  };
  // With four agents no gap can be below pi/2; the equispaced square is the
  // closure of the admissible set.
  RngStream rng(mix_seed({kSeed, 10}));
  for (int r = 0; r < 3; ++r) {
    const double shift = 2.0 * std::numbers::pi * rng.uniform();
    std::vector<double> sq;
    for (int i = 0; i < 4; ++i) sq.push_back(std::fmod(shift + i * std::numbers::pi / 2.0, 2.0 * std::numbers::pi));
    check(sq, rng);
  }
  for (int found = 0; found < 5;) {
    std::vector<double> theta(8);
    for (auto& t : theta) t = 2.0 * std::numbers::pi * rng.uniform();
    if (circular_gaps(theta).gamma_max >= std::numbers::pi / 2.0) continue;
    ++found;
    check(theta, rng);
  }
  o.detail << " " << configs << " configs (N=4 closure, N=8 gamma_max<pi/2), 1e5 samples each, max p-(bound+4sd)="
           << num(worst);
}

// 11. Byte-identical tables across repeat runs and worker counts.
void determinism(Outcome& o) {
  std::size_t compared = 0;
  for (Model m : {Model::scalar, Model::box, Model::circle}) {
    ExperimentConfig c;
    c.model = m;
    c.dim = m == Model::box ? 3 : 1;
    c.n_grid = {5, 20};
    c.eps_grid = {0.1, 0.01};
    c.trials = 40;
    c.master_seed = kSeed;
    c.trace_every = 5;
    const auto a = run_experiment(c, 1);
    for (std::size_t w : {1u, 2u, 4u}) {
      const auto b = run_experiment(c, w);
      const bool same = trials_csv(a) == trials_csv(b) && aggregates_csv(a) == aggregates_csv(b) &&
                        traces_csv(a) == traces_csv(b) && table_json(a) == table_json(b);
      o.require(same, std::string(model_name(m)) + " workers=" + std::to_string(w));
      ++compared;
    }
  }
  o.detail << " " << compared << " reruns (3 models x workers {1,2,4}) compared byte for byte";
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(Outcome&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "one-step contraction", one_step_contraction},
      {2, "multi-step decay", multi_step_decay},
      {3, "bound dominance", bound_dominance},
      {4, "limit mean", limit_mean},
      {5, "D-dimensional", box_dimensions},
      {6, "circle stability and ordering", circle_stability},
      {7, "circle empirical laws", circle_empirical_laws},
      {8, "Markov oracle equivalence", markov_oracle},
      {9, "circle identities and drift", circle_identities},
      {10, "maximal-empty-angle decrease", gamma_max_bound},
      {11, "determinism", determinism},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : criteria()) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d: %s  %s:%s (%.1fs)\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.str().c_str(),
                secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
