#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "pcl/rng.hpp"
#include "pcl/state.hpp"

namespace pcl {

struct AgentPair {
  std::size_t first;   // always < second
  std::size_t second;
};

// Uniform over the N(N-1)/2 unordered pairs.
AgentPair select_pair(RngStream& rng, std::size_t n);

// Each step mutates in place and returns the pair it touched. A coincident
// pair still counts as a step.
AgentPair step_scalar(RngStream& rng, std::span<double> x);
AgentPair step_vector(RngStream& rng, VectorState& x);
AgentPair step_circle(RngStream& rng, std::span<double> theta);

// Counter-clockwise arc from `start` of the given length in (0, pi].
struct GeodesicArc {
  double start;
  double length;
};

// nullopt when theta1 == theta2 (zero-length arc).
std::optional<GeodesicArc> geodesic_arc(double theta1, double theta2);

// start + u * length folded back into [0, 2pi).
double sample_on_arc(const GeodesicArc& arc, double u);

ScalarState init_uniform(RngStream& rng, const IntervalDomain& domain, std::size_t n);
VectorState init_uniform(RngStream& rng, const BoxDomain& domain, std::size_t n);
AngularState init_uniform_circle(RngStream& rng, std::size_t n);

}  // namespace pcl
