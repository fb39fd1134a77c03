#pragma once

#include <cstddef>
#include <vector>

#include "pcl/bounds.hpp"

namespace pcl {

// Chebyshev polynomial of the second kind, closed-form in three regimes.
double chebyshev_U(std::size_t i, double x);

// Increase probability of the worst-case chain for N agents.
double chain_c(std::size_t n_agents);
// Number of transitions to absorption, floor(N/2).
std::size_t chain_n(std::size_t n_agents);

// Entry (i, j), 0-based, of the inverse of the n x n tridiagonal Toeplitz
// matrix with diagonal 1, superdiagonal -c, subdiagonal -(1-c). c in (0, 1/2).
double toeplitz_inverse_entry(std::size_t n, double c, std::size_t i, std::size_t j);

// Row-major inverse of I - W' obtained from the Toeplitz inverse by a
// Sherman-Morrison rank-one correction on the first row.
std::vector<double> absorption_matrix_inverse(std::size_t n, double c);

// E_0 from the Chebyshev closed form. Throws UnsupportedRegime for c >= 1/2.
LargeValue absorption_closed_form(std::size_t n, double c);

struct AbsorptionResult {
  std::vector<double> expected;  // E_0 .. E_{n-1}; E_n = 0 is implicit
};

// Direct solve of (I - W') E = 1 by tridiagonal elimination; c in (0, 1).
AbsorptionResult absorption_solve(std::size_t n, double c);

// ((1-c)/c)^n in log space.
LargeValue absorption_asymptotic(std::size_t n, double c);

}  // namespace pcl
