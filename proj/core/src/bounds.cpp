#include "pcl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pcl/errors.hpp"

namespace pcl {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be finite and > 0");
}

void require_interval(double a, double b) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw InvalidArgument("bounds require finite a < b");
}

double exact_factor(std::size_t n) {
  const double nn = static_cast<double>(n);
  return 3.0 * nn * (nn - 1.0) / (2.0 * nn + 1.0);
}

// Both forms share the log term; it is clamped at zero independently.
BoundValue from_logs(std::size_t n, double log_exact, double log_simplified) {
  BoundValue v;
  v.clamped = log_exact < 0.0 || log_simplified < 0.0;
  v.exact = exact_factor(n) * (std::max(0.0, log_exact) + 1.0);
  v.simplified = 1.5 * static_cast<double>(n) * (std::max(0.0, log_simplified) + 1.0);
  return v;
}

}  // namespace

double contraction_deficit(std::size_t n) {
  require_agents(n);
  const double nn = static_cast<double>(n);
  return (2.0 * nn + 1.0) / (3.0 * nn * (nn - 1.0));
}

double contraction_factor(std::size_t n) { return 1.0 - contraction_deficit(n); }

double expected_lyapunov(std::uint64_t k, double l0, std::size_t n) {
  if (!(l0 >= 0.0)) throw InvalidArgument("L0 must be >= 0");
  return l0 * std::pow(contraction_factor(n), static_cast<double>(k));
}

double expected_initial_lyapunov_uniform(std::size_t n, double a, double b) {
  require_agents(n);
  require_interval(a, b);
  const double nn = static_cast<double>(n);
  return nn * (nn - 1.0) * (b - a) * (b - a) / 6.0;
}

BoundValue t_eps_bound_scalar(std::size_t n, double eps, double l0) {
  require_agents(n);
  require_positive(eps, "eps");
  require_positive(l0, "L0");
  const double lg = std::log(l0 / (static_cast<double>(n) * eps * eps));
  return from_logs(n, lg, lg);
}

BoundValue t_eps_bound_interval(std::size_t n, double eps, double a, double b) {
  require_agents(n);
  require_positive(eps, "eps");
  require_interval(a, b);
  // Worst case L0 = N^2 (b-a)^2 / 2.
  const double nn = static_cast<double>(n);
  const double w2 = (b - a) * (b - a);
  const double lg = std::log(nn / (eps * eps)) + std::log(w2 / 2.0);
  return from_logs(n, lg, lg);
}

BoundValue t_eps_bound_uniform_init(std::size_t n, double eps, double a, double b) {
  require_agents(n);
  require_positive(eps, "eps");
  require_interval(a, b);
  // E(L0) = N(N-1)(b-a)^2/6; the simplified form rounds N-1 up to N.
  const double nn = static_cast<double>(n);
  const double w2 = (b - a) * (b - a);
  const double lg_exact = std::log((nn - 1.0) / (eps * eps)) + std::log(w2 / 6.0);
  const double lg_simple = std::log(nn / (eps * eps)) + std::log(w2 / 6.0);
  return from_logs(n, lg_exact, lg_simple);
}

BoundValue t_eps_bound_vector(std::size_t n, std::size_t dim, double eps, const VectorBoundInput& input) {
  require_agents(n);
  require_positive(eps, "eps");
  if (dim < 1) throw InvalidArgument("dimension must be >= 1");
  const double nn = static_cast<double>(n);
  const double dd = static_cast<double>(dim);
  if (const auto* g = std::get_if<GivenLyapunov>(&input)) {
    if (g->l_d0.size() != dim) throw InvalidArgument("need one initial Lyapunov value per dimension");
    double total = 0.0;
    for (double l : g->l_d0) total += l;
    require_positive(total, "sum of initial Lyapunov values");
    const double lg = std::log(total / (nn * eps * eps));
    return from_logs(n, lg, lg);
  }
  if (const auto* w = std::get_if<WorstCaseCube>(&input)) {
    require_interval(w->a, w->b);
    const double w2 = (w->b - w->a) * (w->b - w->a);
    const double lg = std::log(dd * nn / (eps * eps)) + std::log(w2 / 2.0);
    return from_logs(n, lg, lg);
  }
  const auto& u = std::get<UniformCube>(input);
  require_interval(u.a, u.b);
  const double w2 = (u.b - u.a) * (u.b - u.a);
  const double lg_exact = std::log(dd * (nn - 1.0) / (eps * eps)) + std::log(w2 / 6.0);
  const double lg_simple = std::log(dd * nn / (eps * eps)) + std::log(w2 / 6.0);
  return from_logs(n, lg_exact, lg_simple);
}

RangeSqBounds expected_range_sq_bounds(std::uint64_t k, double l0, std::size_t n) {
  const double nn = static_cast<double>(n);
  const double l = expected_lyapunov(k, l0, n);
  return {2.0 * l / (nn * nn), l / nn};
}

RangeSqBounds expected_range_sq_bounds_uniform(std::uint64_t k, std::size_t n, double a, double b) {
  require_agents(n);
  require_interval(a, b);
  const double nn = static_cast<double>(n);
  const double rk = std::pow(contraction_factor(n), static_cast<double>(k)) * (b - a) * (b - a);
  return {(nn - 1.0) * rk / (3.0 * nn), (nn - 1.0) * rk / 6.0};
}

RangeSqBounds expected_range_sq_bounds_vector(std::uint64_t k, double total_l0, std::size_t n) {
  const double nn = static_cast<double>(n);
  const double l = expected_lyapunov(k, total_l0, n);
  return {2.0 * l / (nn * nn * nn), l / nn};
}

RangeSqBounds expected_range_sq_bounds_vector_uniform(std::uint64_t k, std::size_t n, std::size_t dim, double a,
                                                      double b) {
  require_agents(n);
  require_interval(a, b);
  const double nn = static_cast<double>(n);
  const double rk =
      std::pow(contraction_factor(n), static_cast<double>(k)) * static_cast<double>(dim) * (b - a) * (b - a);
  return {(nn - 1.0) * rk / (3.0 * nn * nn), (nn - 1.0) * rk / 6.0};
}

std::vector<double> expected_state(std::uint64_t k, std::span<const double> x0) {
  require_agents(x0.size());
  const double nn = static_cast<double>(x0.size());
  double mean = 0.0;
  for (double v : x0) mean += v;
  mean /= nn;
  // N = 2: the factor is 0^k, exactly the mean for k >= 1.
  const double f = std::pow(1.0 - 1.0 / (nn - 1.0), static_cast<double>(k));
  std::vector<double> out(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) out[i] = mean + f * (x0[i] - mean);
  return out;
}

VectorState expected_state(std::uint64_t k, const VectorState& x0) {
  VectorState out(x0.agents(), x0.dim());
  for (std::size_t d = 0; d < x0.dim(); ++d) {
    const auto col = expected_state(k, x0.column(d));
    for (std::size_t i = 0; i < x0.agents(); ++i) out.at(i, d) = col[i];
  }
  return out;
}

double q_ab(double a, double b) {
  require_interval(a, b);
  double q = 0.0;
  if (a >= 0.0) q += (a * a) / (b * b);
  if (b <= 0.0) q += (b * b) / (a * a);
  return q;
}

BoundValue gossip_time_bound(std::size_t n, double eps, double a, double b) {
  require_agents(n);
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("gossip bound requires eps in (0, 1)");
  const double q = q_ab(a, b);
  if (!(q < 1.0)) throw InvalidArgument("gossip bound degenerate: q_ab = 1");
  const double nn = static_cast<double>(n);
  BoundValue v;
  v.exact = (-3.0 * std::log(eps) + std::log(2.0 * (nn - 1.0) * (1.0 - q))) / -std::log1p(-contraction_deficit(n));
  v.simplified = 1.5 * nn * std::log(nn / (eps * eps * eps)) + 1.5 * nn * std::log(2.0 * (1.0 - q));
  return v;
}

EdsmBounds edsm_bounds(double alpha, double eps) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("EDSM rate alpha must lie in (0, 1)");
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("EDSM eps must lie in (0, 1]");
  const double g = -std::log(eps) / -std::log1p(-alpha);
  return {g + 1.0 / alpha, g};
}

LargeValue t_hd_bound(std::size_t n, double delta) {
  if (n < 3) throw InvalidArgument("half-disk bound requires N >= 3");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  const double nn = static_cast<double>(n);
  const std::uint64_t half = n / 2;
  const double pairs = nn * (nn - 1.0) / 2.0;

  // log10 of 1/eta, eta = (1 - 2x) x^2 (2/(N(N-1)))^2 with x = theta_delta/pi.
  double log10_inv_eta = 0.0;
  const bool optimum = delta == kHalfDiskDeltaOpt;
  if (optimum) {
    // x = 1/3 exactly: 1/eta = 27 (N(N-1)/2)^2.
    log10_inv_eta = std::log10(27.0) + 2.0 * std::log10(pairs);
  } else {
    const double x = (kPi / 2.0 - std::acos(delta)) / kPi;
    log10_inv_eta = -(std::log10(1.0 - 2.0 * x) + 2.0 * std::log10(x)) + 2.0 * std::log10(pairs);
  }

  LargeValue out;
  const double log10_power = static_cast<double>(half) * log10_inv_eta;
  if (log10_power > 300.0) {
    out.value = std::numeric_limits<double>::infinity();
    out.overflow = true;
    out.log10 = log10_power;  // the 2*floor(N/2) term is invisible at this scale
    return out;
  }
  const double inv_eta = optimum ? 27.0 * pairs * pairs : std::pow(10.0, log10_inv_eta);
  out.value = std::pow(inv_eta, static_cast<double>(half)) + 2.0 * static_cast<double>(half);
  out.log10 = std::log10(out.value);
  if (optimum && n <= 6) {
    const auto k = static_cast<std::uint64_t>(27 * (n * (n - 1) / 2) * (n * (n - 1) / 2));
    std::uint64_t p = 1;
    for (std::uint64_t i = 0; i < half; ++i) p *= k;
    out.exact_integer = p + 2 * half;
  }
  return out;
}

double t_eps_bound_circle(std::size_t n, double eps, double b_hd) {
  require_agents(n);
  require_positive(eps, "eps");
  if (!(b_hd >= 0.0)) throw InvalidArgument("B_HD must be >= 0");
  const double nn = static_cast<double>(n);
  return b_hd + 1.5 * nn * std::log(nn / (eps * eps)) + 1.5 * nn * (std::log(kPi * kPi / 2.0) + 1.0);
}

double t_eps_bound_circle(std::size_t n, double eps) { return t_eps_bound_circle(n, eps, t_hd_bound(n).value); }

}  // namespace pcl
