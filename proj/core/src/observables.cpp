#include "pcl/observables.hpp"

#include <algorithm>
#include <cmath>

#include "pcl/dynamics.hpp"
#include "pcl/errors.hpp"

namespace pcl {

namespace {

double dot(const std::array<double, 2>& u, const std::array<double, 2>& v) { return u[0] * v[0] + u[1] * v[1]; }

}  // namespace

double lyapunov_scalar(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const double n = static_cast<double>(x.size());
  // Shift by x[0] so constant configurations give exactly zero.
  const double x0 = x[0];
  double mean = 0.0;
  for (double v : x) mean += v - x0;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - x0 - mean) * (v - x0 - mean);
  return 2.0 * n * ss;
}

VectorLyapunov lyapunov_per_dimension(const VectorState& x) {
  VectorLyapunov out;
  out.per_dim.resize(x.dim());
  for (std::size_t d = 0; d < x.dim(); ++d) {
    const auto col = x.column(d);
    out.per_dim[d] = lyapunov_scalar(col);
    out.total += out.per_dim[d];
  }
  return out;
}

double range_scalar(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *hi - *lo;
}

double range_vector(const VectorState& x) {
  double best = 0.0;
  for (std::size_t i = 0; i < x.agents(); ++i) {
    const auto xi = x.row(i);
    for (std::size_t j = i + 1; j < x.agents(); ++j) {
      const auto xj = x.row(j);
      double s = 0.0;
      for (std::size_t d = 0; d < x.dim(); ++d) s += (xi[d] - xj[d]) * (xi[d] - xj[d]);
      best = std::max(best, s);
    }
  }
  return std::sqrt(best);
}

double mean_state(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

std::vector<double> mean_state(const VectorState& x) {
  std::vector<double> m(x.dim(), 0.0);
  for (std::size_t i = 0; i < x.agents(); ++i)
    for (std::size_t d = 0; d < x.dim(); ++d) m[d] += x.at(i, d);
  for (auto& v : m) v /= static_cast<double>(x.agents());
  return m;
}

CircularGaps circular_gaps(std::span<const double> theta) {
  require_agents(theta.size());
  std::vector<double> s(theta.begin(), theta.end());
  std::sort(s.begin(), s.end());
  CircularGaps out;
  out.gaps.reserve(s.size());
  for (std::size_t i = 0; i + 1 < s.size(); ++i) out.gaps.push_back(s[i + 1] - s[i]);
  out.gaps.push_back(s.front() + kTwoPi - s.back());
  out.gamma_max = *std::max_element(out.gaps.begin(), out.gaps.end());
  return out;
}

std::optional<double> half_disk_witness(std::span<const double> theta) {
  require_agents(theta.size());
  std::vector<double> s(theta.begin(), theta.end());
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  // Largest gap and the angle where it starts.
  double gmax = s.front() + kTwoPi - s.back();
  double gstart = s.back();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double g = s[i + 1] - s[i];
    if (g > gmax) {
      gmax = g;
      gstart = s[i];
    }
  }
  if (!(gmax > kPi)) return std::nullopt;
  const double w = std::fmod(gstart + 0.5 * gmax + kPi, kTwoPi);
  for (double t : s)
    if (!(std::cos(t - w) > 0.0)) return std::nullopt;
  return w;
}

double circle_pairwise_diameter(std::span<const double> theta) {
  const auto g = circular_gaps(theta);
  if (g.gamma_max > kPi) return kTwoPi - g.gamma_max;
  double best = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i)
    for (std::size_t j = i + 1; j < theta.size(); ++j) {
      const double d = std::fabs(theta[i] - theta[j]);
      best = std::max(best, std::min(d, kTwoPi - d));
    }
  return best;
}

VectorSum vector_sum(std::span<const double> theta) {
  VectorSum out;
  for (double t : theta) {
    out.s[0] += std::cos(t);
    out.s[1] += std::sin(t);
  }
  out.norm = std::hypot(out.s[0], out.s[1]);
  // Cancellation leaves O(N ulp) noise where the exact sum is zero.
  out.degenerate = out.norm <= 1e-12 * static_cast<double>(theta.size());
  return out;
}

double sinc(double a) {
  if (std::fabs(a) < 1e-4) {
    const double a2 = a * a;
    return 1.0 - a2 / 6.0 + a2 * a2 / 120.0;
  }
  return std::sin(a) / a;
}

PairGeometry pair_geometry(double theta_i, double theta_j, const VectorSum& s) {
  PairGeometry g;
  double mid = theta_i;
  if (const auto arc = geodesic_arc(theta_i, theta_j)) {
    g.alpha = 0.5 * arc->length;
    mid = arc->start + g.alpha;
  }
  g.bisector = {std::cos(mid), std::sin(mid)};
  if (!s.degenerate) {
    const double cross = s.s[0] * g.bisector[1] - s.s[1] * g.bisector[0];
    g.beta = std::atan2(cross, dot(s.s, g.bisector));
  }
  return g;
}

IdentityResiduals circle_identity_residuals(std::span<const double> theta) {
  require_agents(theta.size());
  const auto s = vector_sum(theta);
  const double n = static_cast<double>(theta.size());
  IdentityResiduals r;
  r.degenerate_sum = s.degenerate;

  double sum_cos2a = 0.0;
  double sum_cacb = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i)
    for (std::size_t j = i + 1; j < theta.size(); ++j) {
      const auto g = pair_geometry(theta[i], theta[j], s);
      sum_cos2a += std::cos(2.0 * g.alpha);
      if (g.beta) sum_cacb += std::cos(g.alpha) * std::cos(*g.beta);
    }
  r.cos_two_alpha = std::fabs(sum_cos2a - (s.norm * s.norm - n) / 2.0);
  if (!s.degenerate) {
    const double phi = std::atan2(s.s[1], s.s[0]);
    double proj = 0.0;
    for (double t : theta) proj += std::cos(t - phi);
    r.norm_projection = std::fabs(s.norm - proj);
    r.cos_alpha_beta = std::fabs(sum_cacb - (n - 1.0) / 2.0 * s.norm);
  }
  return r;
}

DriftClosedForm one_step_drift_closed_form(std::span<const double> theta) {
  require_agents(theta.size());
  const auto s = vector_sum(theta);
  const double n = static_cast<double>(theta.size());
  const double norm2 = s.s[0] * s.s[0] + s.s[1] * s.s[1];
  // <x_bis, S> stands in for cos(beta) ‖S‖ so S = 0 needs no special case.
  double sum_drift = 0.0;
  double sum_norm = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i)
    for (std::size_t j = i + 1; j < theta.size(); ++j) {
      const auto g = pair_geometry(theta[i], theta[j], s);
      const double sc = sinc(g.alpha);
      const double proj = dot(g.bisector, s.s);
      sum_drift += sc * proj;
      sum_norm += sc * sc + 2.0 * sc * proj - 4.0 * sc * std::cos(g.alpha);
    }
  const double w = 4.0 / (n * (n - 1.0));
  DriftClosedForm out;
  out.drift_dot_s = -(2.0 / n) * norm2 + w * sum_drift;
  out.expected_norm_sq = norm2 + 4.0 * (1.0 - 1.0 / (2.0 * (n - 1.0))) * (1.0 - norm2 / n) + w * sum_norm;
  return out;
}

ObservableFrame make_frame(std::uint64_t step, std::span<const double> x) {
  ObservableFrame f;
  f.step = step;
  f.lyapunov = lyapunov_scalar(x);
  f.range = range_scalar(x);
  f.mean = {mean_state(x)};
  return f;
}

ObservableFrame make_frame(std::uint64_t step, const VectorState& x) {
  ObservableFrame f;
  f.step = step;
  auto l = lyapunov_per_dimension(x);
  f.lyapunov_per_dim = std::move(l.per_dim);
  f.lyapunov_total = l.total;
  f.range = range_vector(x);
  f.mean = mean_state(x);
  return f;
}

ObservableFrame make_circle_frame(std::uint64_t step, std::span<const double> theta) {
  ObservableFrame f;
  f.step = step;
  const auto s = vector_sum(theta);
  f.vector_sum = s.s;
  f.gamma_max = circular_gaps(theta).gamma_max;
  f.range = circle_pairwise_diameter(theta);
  if (!s.degenerate) f.mean = {std::atan2(s.s[1], s.s[0])};
  return f;
}

}  // namespace pcl
