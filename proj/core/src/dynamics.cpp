#include "pcl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pcl/errors.hpp"

namespace pcl {

const char* model_name(Model m) noexcept {
  switch (m) {
    case Model::scalar: return "scalar";
    case Model::box: return "box";
    case Model::circle: return "circle";
  }
  return "?";
}

VectorState::VectorState(std::size_t n, std::size_t dim, std::vector<double> data)
    : n_(n), dim_(dim), data_(std::move(data)) {
  if (data_.size() != n * dim) throw InvalidArgument("VectorState: data size does not match N*D");
}

std::vector<double> VectorState::column(std::size_t d) const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = at(i, d);
  return out;
}

void require_agents(std::size_t n) {
  if (n < 2) throw InvalidArgument("invalid agent count " + std::to_string(n) + " (need N >= 2)");
}

void validate(const IntervalDomain& d) {
  if (!(d.a < d.b) || !std::isfinite(d.a) || !std::isfinite(d.b))
    throw InvalidArgument("domain requires finite a < b");
}

void validate(const BoxDomain& d) {
  validate(IntervalDomain{d.a, d.b});
  if (d.dim < 1) throw InvalidArgument("box dimension must be >= 1");
}

AgentPair select_pair(RngStream& rng, std::size_t n) {
  require_agents(n);
  // Index k over pairs (i, j), i < j, enumerated column by column:
  // pairs with second == j occupy [j(j-1)/2, j(j+1)/2).
  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t k = rng.below(total);
  auto j = static_cast<std::uint64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(k))) / 2.0);
  while (j * (j - 1) / 2 > k) --j;
  while ((j + 1) * j / 2 <= k) ++j;
  const std::uint64_t i = k - j * (j - 1) / 2;
  return {static_cast<std::size_t>(i), static_cast<std::size_t>(j)};
}

AgentPair step_scalar(RngStream& rng, std::span<double> x) {
  const AgentPair p = select_pair(rng, x.size());
  const double lo = std::min(x[p.first], x[p.second]);
  const double hi = std::max(x[p.first], x[p.second]);
  const double w = hi - lo;
  // Clamp guards the last ulp so the hull can never grow.
  x[p.first] = std::min(hi, lo + rng.uniform() * w);
  x[p.second] = std::min(hi, lo + rng.uniform() * w);
  return p;
}

AgentPair step_vector(RngStream& rng, VectorState& x) {
  const AgentPair p = select_pair(rng, x.agents());
  const double l1 = rng.uniform();
  const double l2 = rng.uniform();
  auto xi = x.row(p.first);
  auto xj = x.row(p.second);
  for (std::size_t d = 0; d < x.dim(); ++d) {
    const double a = xi[d];
    const double b = xj[d];
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    xi[d] = std::clamp(a + l1 * (b - a), lo, hi);
    xj[d] = std::clamp(a + l2 * (b - a), lo, hi);
  }
  return p;
}

std::optional<GeodesicArc> geodesic_arc(double theta1, double theta2) {
  if (theta1 == theta2) return std::nullopt;
  const double lo = std::min(theta1, theta2);
  const double hi = std::max(theta1, theta2);
  const double delta = hi - lo;
  if (delta <= kPi) return GeodesicArc{lo, delta};
  return GeodesicArc{hi, kTwoPi - delta};
}

double sample_on_arc(const GeodesicArc& arc, double u) {
  double t = arc.start + u * arc.length;
  // t < 3pi here, so one subtraction suffices and is exact (Sterbenz).
  if (t >= kTwoPi) t -= kTwoPi;
  return t;
}

AgentPair step_circle(RngStream& rng, std::span<double> theta) {
  const AgentPair p = select_pair(rng, theta.size());
  const auto arc = geodesic_arc(theta[p.first], theta[p.second]);
  // Draws are consumed either way so the stream stays aligned across branches.
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  if (arc) {
    theta[p.first] = sample_on_arc(*arc, u1);
    theta[p.second] = sample_on_arc(*arc, u2);
  }
  return p;
}

ScalarState init_uniform(RngStream& rng, const IntervalDomain& domain, std::size_t n) {
  validate(domain);
  require_agents(n);
  ScalarState x(n);
  const double w = domain.b - domain.a;
  for (auto& v : x) v = std::min(domain.b, domain.a + rng.uniform() * w);
  return x;
}

VectorState init_uniform(RngStream& rng, const BoxDomain& domain, std::size_t n) {
  validate(domain);
  require_agents(n);
  VectorState x(n, domain.dim);
  const double w = domain.b - domain.a;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < domain.dim; ++d) x.at(i, d) = std::min(domain.b, domain.a + rng.uniform() * w);
  return x;
}

AngularState init_uniform_circle(RngStream& rng, std::size_t n) {
  require_agents(n);
  AngularState t(n);
  for (auto& v : t) {
    v = rng.uniform() * kTwoPi;
    if (v >= kTwoPi) v = 0.0;
  }
  return t;
}

}  // namespace pcl
