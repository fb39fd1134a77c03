#include "pcl/properties.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pcl/dynamics.hpp"
#include "pcl/errors.hpp"
#include "pcl/observables.hpp"

namespace pcl {

namespace {

struct Welford {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  MeanEstimate estimate() const {
    MeanEstimate e;
    e.mean = mean;
    if (n >= 2) e.std_error = std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
    return e;
  }
};

double z_score(double observed, const MeanEstimate& est) {
  const double diff = std::fabs(observed - est.mean);
  if (est.std_error > 0.0) return diff / est.std_error;
  return diff > 1e-12 ? std::numeric_limits<double>::infinity() : 0.0;
}

}  // namespace

DriftMonteCarlo one_step_drift_monte_carlo(std::span<const double> theta, std::uint64_t samples, RngStream& rng) {
  require_agents(theta.size());
  if (samples < 2) throw InvalidArgument("drift Monte Carlo needs at least 2 samples");
  const auto s = vector_sum(theta).s;
  std::vector<double> work(theta.begin(), theta.end());
  Welford dot, norm;
  for (std::uint64_t k = 0; k < samples; ++k) {
    const auto p = step_circle(rng, work);
    // Only two unit vectors moved, so update S in O(1).
    double sx = s[0], sy = s[1];
    for (std::size_t idx : {p.first, p.second}) {
      sx += std::cos(work[idx]) - std::cos(theta[idx]);
      sy += std::sin(work[idx]) - std::sin(theta[idx]);
    }
    dot.add((sx - s[0]) * s[0] + (sy - s[1]) * s[1]);
    norm.add(sx * sx + sy * sy);
    work[p.first] = theta[p.first];
    work[p.second] = theta[p.second];
  }
  return {dot.estimate(), norm.estimate()};
}

MeanEstimate gamma_max_decrease_probability(std::span<const double> theta, std::uint64_t samples, RngStream& rng) {
  require_agents(theta.size());
  if (samples == 0) throw InvalidArgument("need at least one sample");
  const double g0 = circular_gaps(theta).gamma_max;
  std::vector<double> work(theta.begin(), theta.end());
  std::uint64_t hits = 0;
  for (std::uint64_t k = 0; k < samples; ++k) {
    const auto p = step_circle(rng, work);
    if (circular_gaps(work).gamma_max < g0) ++hits;
    work[p.first] = theta[p.first];
    work[p.second] = theta[p.second];
  }
  MeanEstimate e;
  e.mean = static_cast<double>(hits) / static_cast<double>(samples);
  e.std_error = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(samples));
  return e;
}

IdentitySuiteReport run_identity_suite(const IdentitySuiteOptions& opt) {
  if (opt.n_values.empty()) throw InvalidArgument("identity suite needs at least one N");
  IdentitySuiteReport rep;
  std::vector<std::size_t> mc_done(opt.n_values.size(), 0);
  for (std::size_t c = 0; c < opt.configs; ++c) {
    const std::size_t slot = c % opt.n_values.size();
    const std::size_t n = opt.n_values[slot];
    auto rng = RngStream::for_trial(opt.seed, c);
    const auto theta = init_uniform_circle(rng, n);
    ++rep.configs;

    const double limit = opt.identity_tol * static_cast<double>(n * n);
    const auto res = circle_identity_residuals(theta);
    if (res.degenerate_sum) ++rep.degenerate;
    auto check = [&](const char* name, double v) {
      rep.worst_identity_ratio = std::max(rep.worst_identity_ratio, v / limit);
      if (!(v < limit)) rep.failures.push_back({name, theta, v, limit});
    };
    if (res.norm_projection) check("norm_projection", *res.norm_projection);
    if (res.cos_alpha_beta) check("cos_alpha_beta", *res.cos_alpha_beta);
    check("cos_two_alpha", res.cos_two_alpha);

    if (mc_done[slot] < opt.mc_configs_per_n) {
      ++mc_done[slot];
      ++rep.mc_configs;
      const auto closed = one_step_drift_closed_form(theta);
      const auto mc = one_step_drift_monte_carlo(theta, opt.mc_samples, rng);
      const double z1 = z_score(closed.drift_dot_s, mc.drift_dot_s);
      const double z2 = z_score(closed.expected_norm_sq, mc.expected_norm_sq);
      rep.worst_z = std::max({rep.worst_z, z1, z2});
      if (!(z1 <= opt.z_limit)) rep.failures.push_back({"drift_dot_s", theta, z1, opt.z_limit});
      if (!(z2 <= opt.z_limit)) rep.failures.push_back({"expected_norm_sq", theta, z2, opt.z_limit});
    }
  }
  return rep;
}

}  // namespace pcl
