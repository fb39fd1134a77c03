#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "pcl/state.hpp"

namespace pcl {

// Bound evaluated in both the exact 3N(N-1)/(2N+1) form and the simplified
// (3/2)N form. `clamped` is set when a negative log argument was cut to zero.
struct BoundValue {
  double exact = 0.0;
  double simplified = 0.0;
  bool clamped = false;
};

// A value that may exceed double range. When `overflow` is set, `value` is
// +inf and `log10` still holds the magnitude.
struct LargeValue {
  double value = 0.0;
  double log10 = 0.0;
  bool overflow = false;
  std::optional<std::uint64_t> exact_integer;
};

struct RangeSqBounds {
  double lower = 0.0;
  double upper = 0.0;
};

double contraction_factor(std::size_t n);
// 1 - contraction_factor(n), computed without cancellation.
double contraction_deficit(std::size_t n);

double expected_lyapunov(std::uint64_t k, double l0, std::size_t n);
// E(L^0) for iid uniform opinions on [a, b].
double expected_initial_lyapunov_uniform(std::size_t n, double a, double b);

BoundValue t_eps_bound_scalar(std::size_t n, double eps, double l0);
BoundValue t_eps_bound_interval(std::size_t n, double eps, double a, double b);
BoundValue t_eps_bound_uniform_init(std::size_t n, double eps, double a, double b);

struct GivenLyapunov {
  std::vector<double> l_d0;
};
struct WorstCaseCube {
  double a;
  double b;
};
struct UniformCube {
  double a;
  double b;
};
using VectorBoundInput = std::variant<GivenLyapunov, WorstCaseCube, UniformCube>;
BoundValue t_eps_bound_vector(std::size_t n, std::size_t dim, double eps, const VectorBoundInput& input);

RangeSqBounds expected_range_sq_bounds(std::uint64_t k, double l0, std::size_t n);
RangeSqBounds expected_range_sq_bounds_uniform(std::uint64_t k, std::size_t n, double a, double b);
RangeSqBounds expected_range_sq_bounds_vector(std::uint64_t k, double total_l0, std::size_t n);
RangeSqBounds expected_range_sq_bounds_vector_uniform(std::uint64_t k, std::size_t n, std::size_t dim, double a,
                                                      double b);

std::vector<double> expected_state(std::uint64_t k, std::span<const double> x0);
VectorState expected_state(std::uint64_t k, const VectorState& x0);

double q_ab(double a, double b);
BoundValue gossip_time_bound(std::size_t n, double eps, double a, double b);

struct EdsmBounds {
  double cv = 0.0;
  double gossip = 0.0;
};
EdsmBounds edsm_bounds(double alpha, double eps);

inline constexpr double kHalfDiskDeltaOpt = 0.86602540378443864676372317075294;  // sqrt(3)/2

LargeValue t_hd_bound(std::size_t n, double delta = kHalfDiskDeltaOpt);

double t_eps_bound_circle(std::size_t n, double eps, double b_hd);
double t_eps_bound_circle(std::size_t n, double eps);

}  // namespace pcl
