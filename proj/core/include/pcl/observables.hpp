#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pcl/state.hpp"

namespace pcl {

// Sum over ordered pairs i != j of squared differences.
double lyapunov_scalar(std::span<const double> x);

struct VectorLyapunov {
  std::vector<double> per_dim;
  double total = 0.0;
};
VectorLyapunov lyapunov_per_dimension(const VectorState& x);

double range_scalar(std::span<const double> x);
// Exact Euclidean diameter, O(N^2 D).
double range_vector(const VectorState& x);

double mean_state(std::span<const double> x);
std::vector<double> mean_state(const VectorState& x);

struct CircularGaps {
  std::vector<double> gaps;  // in sorted-angle order, wrap gap last
  double gamma_max = 0.0;
};
CircularGaps circular_gaps(std::span<const double> theta);

std::optional<double> half_disk_witness(std::span<const double> theta);

double circle_pairwise_diameter(std::span<const double> theta);

struct VectorSum {
  std::array<double, 2> s{0.0, 0.0};
  double norm = 0.0;
  bool degenerate = false;  // norm == 0, direction undefined
};
VectorSum vector_sum(std::span<const double> theta);

struct PairGeometry {
  double alpha = 0.0;                  // half the geodesic arc length
  std::array<double, 2> bisector{};    // unit vector at the arc midpoint
  std::optional<double> beta;          // oriented angle of bisector w.r.t. S; absent when S = 0
};
PairGeometry pair_geometry(double theta_i, double theta_j, const VectorSum& s);

struct IdentityResiduals {
  std::optional<double> norm_projection;  // |‖S‖ - sum cos(theta_i - theta_S)|
  std::optional<double> cos_alpha_beta;   // |sum cos a cos b - (N-1)/2 ‖S‖|
  double cos_two_alpha = 0.0;             // |sum cos 2a - (‖S‖^2 - N)/2|
  bool degenerate_sum = false;
};
IdentityResiduals circle_identity_residuals(std::span<const double> theta);

struct DriftClosedForm {
  double drift_dot_s = 0.0;       // <E Delta, S>
  double expected_norm_sq = 0.0;  // E ‖S^{k+1}‖^2
};
DriftClosedForm one_step_drift_closed_form(std::span<const double> theta);

// sin(a)/a with a series near 0.
double sinc(double a);

// Everything a stopping check or observer might want at one step. Fields
// not meaningful for the model stay empty.
struct ObservableFrame {
  std::uint64_t step = 0;
  std::optional<double> lyapunov;
  std::vector<double> lyapunov_per_dim;
  std::optional<double> lyapunov_total;
  std::optional<double> range;
  std::vector<double> mean;
  std::optional<std::array<double, 2>> vector_sum;
  std::optional<double> gamma_max;
};

ObservableFrame make_frame(std::uint64_t step, std::span<const double> x);
ObservableFrame make_frame(std::uint64_t step, const VectorState& x);
ObservableFrame make_circle_frame(std::uint64_t step, std::span<const double> theta);

}  // namespace pcl
