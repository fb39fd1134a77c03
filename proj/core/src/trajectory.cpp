#include "pcl/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>

#include "pcl/dynamics.hpp"
#include "pcl/errors.hpp"
#include "pcl/observables.hpp"

namespace pcl {

namespace {

// Incremental estimates are only trusted to decide "clearly not fired";
// inside this band the exact value is recomputed.
constexpr double kRefineBand = 1.01;

// Running shifted sums for one coordinate: L = 2(N*S2 - S1^2).
struct MomentTracker {
  double shift = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;

  template <class Get>
  void reset(std::size_t n, Get get) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += get(i);
    shift = m / static_cast<double>(n);
    s1 = s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = get(i) - shift;
      s1 += d;
      s2 += d * d;
    }
  }

  void replace(double old_v, double new_v) {
    const double a = old_v - shift;
    const double b = new_v - shift;
    s1 += b - a;
    s2 += b * b - a * a;
  }

  double lyapunov(std::size_t n) const { return 2.0 * (static_cast<double>(n) * s2 - s1 * s1); }
};

// Hull of one coordinate with the agents attaining it.
struct HullTracker {
  std::size_t imin = 0;
  std::size_t imax = 0;

  template <class Get>
  void reset(std::size_t n, Get get) {
    imin = imax = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (get(i) < get(imin)) imin = i;
      if (get(i) > get(imax)) imax = i;
    }
  }

  // Updated values stay inside the old hull, so only a touched extreme can move it.
  bool stale(AgentPair p) const {
    return imin == p.first || imin == p.second || imax == p.first || imax == p.second;
  }
};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

class ScalarTracker {
 public:
  explicit ScalarTracker(const ScalarState& x) : mirror_(x) { resync(x); }

  void update(AgentPair p, const ScalarState& x) {
    for (std::size_t i : {p.first, p.second}) {
      moments_.replace(mirror_[i], x[i]);
      mirror_[i] = x[i];
    }
    if (++since_sync_ >= x.size()) resync(x);
    if (hull_.stale(p)) hull_.reset(x.size(), [&](std::size_t i) { return x[i]; });
  }

  bool fired(const StoppingPolicy& policy, std::uint64_t k, const ScalarState& x) {
    ObservableFrame f;
    f.step = k;
    f.range = x[hull_.imax] - x[hull_.imin];
    if (const auto* l = std::get_if<LyapunovThreshold>(&policy)) {
      const double est = moments_.lyapunov(x.size());
      if (est > kRefineBand * l->tau) return false;
      f.lyapunov = lyapunov_scalar(x);
    }
    return check(policy, f);
  }

 private:
  void resync(const ScalarState& x) {
    moments_.reset(x.size(), [&](std::size_t i) { return x[i]; });
    hull_.reset(x.size(), [&](std::size_t i) { return x[i]; });
    since_sync_ = 0;
  }

  ScalarState mirror_;
  MomentTracker moments_;
  HullTracker hull_;
  std::size_t since_sync_ = 0;
};

class VectorTracker {
 public:
  explicit VectorTracker(const VectorState& x) : mirror_(x), moments_(x.dim()), hulls_(x.dim()) { resync(x); }

  void update(AgentPair p, const VectorState& x) {
    const std::size_t dim = x.dim();
    for (std::size_t i : {p.first, p.second})
      for (std::size_t d = 0; d < dim; ++d) {
        moments_[d].replace(mirror_.at(i, d), x.at(i, d));
        mirror_.at(i, d) = x.at(i, d);
      }
    if (++since_sync_ >= x.agents()) {
      resync(x);
      return;
    }
    for (std::size_t d = 0; d < dim; ++d)
      if (hulls_[d].stale(p)) hulls_[d].reset(x.agents(), [&](std::size_t i) { return x.at(i, d); });
  }

  bool fired(const StoppingPolicy& policy, std::uint64_t k, const VectorState& x) {
    ObservableFrame f;
    f.step = k;
    const std::size_t n = x.agents();
    return std::visit(
        overloaded{
            [&](const RangeThreshold& r) {
              // Largest coordinate range is a lower bound on the Euclidean diameter.
              double lower = 0.0;
              for (std::size_t d = 0; d < x.dim(); ++d)
                lower = std::max(lower, x.at(hulls_[d].imax, d) - x.at(hulls_[d].imin, d));
              if (lower > r.eps) return false;
              f.range = range_vector(x);
              return check(policy, f);
            },
            [&](const VectorLyapunovThreshold& v) {
              double total = 0.0;
              for (const auto& m : moments_) {
                const double est = m.lyapunov(n);
                if (v.per_dimension && est > kRefineBand * v.tau) return false;
                total += est;
              }
              if (!v.per_dimension && total > kRefineBand * v.tau) return false;
              auto exact = lyapunov_per_dimension(x);
              f.lyapunov_per_dim = std::move(exact.per_dim);
              f.lyapunov_total = exact.total;
              return check(policy, f);
            },
            [&](const auto&) { return check(policy, f); },
        },
        policy);
  }

 private:
  void resync(const VectorState& x) {
    for (std::size_t d = 0; d < x.dim(); ++d) {
      auto get = [&](std::size_t i) { return x.at(i, d); };
      moments_[d].reset(x.agents(), get);
      hulls_[d].reset(x.agents(), get);
    }
    since_sync_ = 0;
  }

  VectorState mirror_;
  std::vector<MomentTracker> moments_;
  std::vector<HullTracker> hulls_;
  std::size_t since_sync_ = 0;
};

// Sorted angles plus the multiset of circular gaps, both O(log N) per move.
// A gap is always computed by the same expression from the same two stored
// angles, so every erase finds the exact value that was inserted.
class CircleTracker {
 public:
  explicit CircleTracker(const AngularState& theta) : mirror_(theta) {
    for (std::size_t i = 0; i < theta.size(); ++i) angles_.emplace(theta[i], i);
    for (auto it = angles_.begin(); it != angles_.end(); ++it) gaps_.insert(gap_after(it));
  }

  void update(AgentPair p, const AngularState& theta) {
    for (std::size_t i : {p.first, p.second}) {
      if (mirror_[i] == theta[i]) continue;
      remove(mirror_[i], i);
      insert(theta[i], i);
      mirror_[i] = theta[i];
    }
  }

  double gamma_max() const { return *gaps_.rbegin(); }

  bool fired(const StoppingPolicy& policy, std::uint64_t k, const AngularState& theta) {
    ObservableFrame f;
    f.step = k;
    f.gamma_max = gamma_max();
    if (std::holds_alternative<RangeThreshold>(policy))
      f.range = *f.gamma_max > kPi ? kTwoPi - *f.gamma_max : circle_pairwise_diameter(theta);
    return check(policy, f);
  }

 private:
  using Entry = std::pair<double, std::size_t>;
  using AngleSet = std::set<Entry>;

  double gap_after(AngleSet::const_iterator it) const {
    auto next = std::next(it);
    if (next == angles_.end()) return angles_.begin()->first + kTwoPi - it->first;
    return next->first - it->first;
  }

  AngleSet::const_iterator cyclic_prev(AngleSet::const_iterator it) const {
    if (it == angles_.begin()) return std::prev(angles_.end());
    return std::prev(it);
  }

  void erase_gap(double g) {
    const auto it = gaps_.find(g);
    if (it == gaps_.end()) throw std::logic_error("circle tracker: gap bookkeeping out of sync");
    gaps_.erase(it);
  }

  void remove(double angle, std::size_t agent) {
    const auto it = angles_.find({angle, agent});
    if (angles_.size() == 1) {
      angles_.clear();
      gaps_.clear();
      return;
    }
    const auto prev = cyclic_prev(it);
    erase_gap(gap_after(prev));
    erase_gap(gap_after(it));
    angles_.erase(it);
    gaps_.insert(gap_after(prev));
  }

  void insert(double angle, std::size_t agent) {
    if (angles_.empty()) {
      const auto it = angles_.emplace(angle, agent).first;
      gaps_.insert(gap_after(it));
      return;
    }
    const Entry e{angle, agent};
    auto succ = angles_.lower_bound(e);
    const auto prev = cyclic_prev(succ == angles_.end() ? angles_.begin() : succ);
    erase_gap(gap_after(prev));
    const auto it = angles_.insert(e).first;
    gaps_.insert(gap_after(prev));
    gaps_.insert(gap_after(it));
  }

  AngularState mirror_;
  AngleSet angles_;
  std::multiset<double> gaps_;
};

template <class State, class Tracker, class Step>
TrialRecord drive(RngStream& rng, State& x, const TrajectoryOptions<State>& opts, Model model, Step step) {
  if (opts.policies.empty()) throw ConfigError("stopping", "at least one stopping policy is required");
  std::uint64_t cap = opts.max_steps.value_or(kDefaultStepCap);
  for (const auto& p : opts.policies) {
    validate(p, model);
    if (const auto* m = std::get_if<MaxSteps>(&p)) cap = std::min(cap, m->cap);
  }

  Tracker tracker(x);
  TrialRecord rec;
  auto& hits = rec.stopping.first_hit;
  hits.assign(opts.policies.size(), std::nullopt);
  std::size_t pending = hits.size();

  auto evaluate = [&](std::uint64_t k) {
    for (std::size_t i = 0; i < hits.size(); ++i)
      if (!hits[i] && tracker.fired(opts.policies[i], k, x)) {
        hits[i] = k;
        --pending;
      }
  };
  auto observe = [&](std::uint64_t k) {
    for (const auto& obs : opts.observers) obs(k, x);
  };
  const std::uint64_t every = opts.observers.empty() ? 0 : opts.observe_every;

  std::uint64_t k = 0;
  evaluate(0);
  if (every) observe(0);
  while (pending > 0 && k < cap) {
    const AgentPair p = step(rng, x);
    ++k;
    tracker.update(p, x);
    evaluate(k);
    if (every && k % every == 0) observe(k);
  }
  if (every && k % every != 0) observe(k);

  rec.steps = k;
  for (std::size_t i = 0; i < hits.size(); ++i)
    if (!hits[i] && !std::holds_alternative<MaxSteps>(opts.policies[i])) rec.stopping.cap_exhausted = true;
  return rec;
}

}  // namespace

TrialRecord run_scalar_trajectory(RngStream& rng, ScalarState& x, const TrajectoryOptions<ScalarState>& opts) {
  require_agents(x.size());
  return drive<ScalarState, ScalarTracker>(rng, x, opts, Model::scalar,
                                           [](RngStream& r, ScalarState& s) { return step_scalar(r, s); });
}

TrialRecord run_vector_trajectory(RngStream& rng, VectorState& x, const TrajectoryOptions<VectorState>& opts) {
  require_agents(x.agents());
  return drive<VectorState, VectorTracker>(rng, x, opts, Model::box,
                                           [](RngStream& r, VectorState& s) { return step_vector(r, s); });
}

TrialRecord run_circle_trajectory(RngStream& rng, AngularState& theta, const TrajectoryOptions<AngularState>& opts) {
  require_agents(theta.size());
  for (double t : theta)
    if (!(t >= 0.0 && t < kTwoPi)) throw InvalidArgument("angles must lie in [0, 2pi)");
  return drive<AngularState, CircleTracker>(rng, theta, opts, Model::circle,
                                            [](RngStream& r, AngularState& s) { return step_circle(r, s); });
}

}  // namespace pcl
