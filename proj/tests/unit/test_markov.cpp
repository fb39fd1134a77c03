#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "pcl/errors.hpp"
#include "pcl/markov.hpp"

using namespace pcl;

namespace {

// Dense (I - W') for the birth-death chain on 0..n with n absorbing; the
// walk holds at 0 with probability 1 - c. Long double because the system is
// badly conditioned for small c.
using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

MatL dense_system(std::size_t n, double c) {
  MatL a = MatL::Identity(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n) a(i, i + 1) -= c;
    if (i == 0) a(0, 0) -= 1.0 - c;
    else a(i, i - 1) -= 1.0 - c;
  }
  return a;
}

// Expected time to climb from k to k+1: tau_0 = 1/c and
// tau_k = (1 + (1 - c) tau_{k-1}) / c. All terms are positive, so the sum is
// free of cancellation however badly conditioned the linear system is.
std::vector<long double> ladder_times(std::size_t n, double c) {
  std::vector<long double> tau(n);
  const long double cl = c;
  tau[0] = 1.0L / cl;
  for (std::size_t k = 1; k < n; ++k) tau[k] = (1.0L + (1.0L - cl) * tau[k - 1]) / cl;
  std::vector<long double> e(n);
  long double acc = 0.0L;
  for (std::size_t k = n; k-- > 0;) e[k] = acc += tau[k];
  return e;
}

}  // namespace

TEST(Chebyshev, Examples) {
  for (double x : {-3.0, -1.0, 0.0, 0.4, 1.0, 7.0}) EXPECT_DOUBLE_EQ(chebyshev_U(0, x), 1.0);
  EXPECT_DOUBLE_EQ(chebyshev_U(2, 1.0), 3.0);
  EXPECT_DOUBLE_EQ(chebyshev_U(3, -1.0), -4.0);
  EXPECT_NEAR(chebyshev_U(1, 2.0), 4.0, 1e-13);
}

TEST(Chebyshev, MatchesRecurrence) {
  for (double x = -20.0; x <= 20.0; x += 0.37) {
    double um1 = 1.0, u = 2.0 * x;  // U_0, U_1
    EXPECT_NEAR(chebyshev_U(1, x), u, 1e-10 * std::max(1.0, std::fabs(u)));
    for (std::size_t i = 2; i <= 50; ++i) {
      const double next = 2.0 * x * u - um1;
      um1 = u;
      u = next;
      const double got = chebyshev_U(i, x);
      // Near the roots the relative error of either side blows up; compare
      // against the scale of the polynomial instead.
      const double scale = std::max({1.0, std::fabs(u), std::pow(std::fabs(x) + std::sqrt(x * x + 1), i) * 1e-6});
      EXPECT_NEAR(got, u, 1e-10 * scale) << "i=" << i << " x=" << x;
    }
  }
}

TEST(Chain, Parameters) {
  EXPECT_NEAR(chain_c(4), 1.0 / 972.0, 1e-18);
  EXPECT_NEAR(chain_c(3), 1.0 / 243.0, 1e-18);
  EXPECT_EQ(chain_n(4), 2u);
  EXPECT_EQ(chain_n(7), 3u);
  EXPECT_THROW(chain_c(2), InvalidArgument);
  for (std::size_t n = 3; n < 100; ++n) EXPECT_LT(chain_c(n), 0.5);
}

TEST(Toeplitz, InverseEntriesMatchNumericInverse) {
  for (std::size_t n = 1; n <= 8; ++n)
    for (double c : {0.01, 0.1, 0.3, 0.45}) {
      Eigen::MatrixXd b = Eigen::MatrixXd::Identity(n, n);
      for (std::size_t i = 0; i + 1 < n; ++i) {
        b(i, i + 1) = -c;
        b(i + 1, i) = -(1.0 - c);
      }
      const Eigen::MatrixXd inv = b.inverse();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          EXPECT_NEAR(toeplitz_inverse_entry(n, c, i, j), inv(i, j), 1e-8 * std::max(1.0, std::fabs(inv(i, j))))
              << n << " " << c << " " << i << " " << j;
    }
}

TEST(ShermanMorrison, InverseOfAbsorptionSystem) {
  for (std::size_t n = 1; n <= 8; ++n)
    for (double c : {0.05, 0.2, 0.4}) {
      const auto inv = absorption_matrix_inverse(n, c);
      const MatL a = dense_system(n, c);
      MatL x(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) x(i, j) = inv[i * n + j];
      // Backward error, entrywise against |A||X|.
      const MatL r = a * x - MatL::Identity(n, n);
      const MatL scale = a.cwiseAbs() * x.cwiseAbs();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) EXPECT_LE(std::fabs(r(i, j)), 1e-13L * scale(i, j));
      // Row sums are expected absorption times.
      const auto e = ladder_times(n, c);
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(x.row(i).sum() / e[i], 1.0L, 1e-12L);
      // Well-conditioned cases against a direct dense inverse.
      if (n <= 4) {
        const MatL dense = a.inverse();
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(x(i, j) / dense(i, j), 1.0L, 1e-10L);
      }
    }
}

TEST(Absorption, HandExamples) {
  for (double c : {0.01, 0.25, 0.4}) EXPECT_NEAR(absorption_closed_form(1, c).value, 1.0 / c, 1e-12 / c);
  EXPECT_NEAR(absorption_closed_form(2, 1.0 / 3.0).value, 12.0, 1e-9);
  const auto s = absorption_solve(2, 1.0 / 3.0);
  ASSERT_EQ(s.expected.size(), 2u);
  EXPECT_NEAR(s.expected[0], 12.0, 1e-12);
  EXPECT_NEAR(s.expected[1], 9.0, 1e-12);
  EXPECT_NEAR(absorption_solve(1, 0.25).expected[0], 4.0, 1e-14);
  EXPECT_THROW(absorption_closed_form(3, 0.5), UnsupportedRegime);
  EXPECT_THROW(absorption_closed_form(3, 0.7), UnsupportedRegime);
}

TEST(Absorption, SolverMatchesLadderOracle) {
  for (std::size_t n = 1; n <= 12; ++n)
    for (double c : {0.01, 0.1, 0.3, 0.45, 0.5, 0.8}) {
      const auto s = absorption_solve(n, c);
      const auto e = ladder_times(n, c);
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(s.expected[i] / e[i], 1.0L, 1e-12L) << n << " " << c;
      for (std::size_t i = 1; i < n; ++i) EXPECT_GE(s.expected[i - 1], s.expected[i]);
    }
}

TEST(Absorption, ClosedFormMatchesSolver) {
  for (std::size_t n = 1; n <= 12; ++n)
    for (double c : {0.01, 0.1, 0.3, 0.45}) {
      const double closed = absorption_closed_form(n, c).value;
      const double solved = absorption_solve(n, c).expected[0];
      EXPECT_LE(std::fabs(closed - solved) / solved, 1e-9) << n << " " << c;
    }
  EXPECT_LE(std::fabs(absorption_closed_form(5, 0.1).value - absorption_solve(5, 0.1).expected[0]) /
                absorption_solve(5, 0.1).expected[0],
            1e-9);
}

TEST(Absorption, Asymptotic) {
  EXPECT_NEAR(absorption_asymptotic(1, 0.25).value, 3.0, 1e-12);
  const auto big = absorption_asymptotic(20, 0.01);
  EXPECT_NEAR(big.log10, 20 * std::log10(99.0), 1e-10);
  EXPECT_NEAR(big.log10, 39.9, 0.05);
  for (std::size_t n = 10; n <= 30; ++n)
    for (double c : {0.001, 0.01, 0.05, 0.1}) {
      const double ratio = absorption_closed_form(n, c).value / absorption_asymptotic(n, c).value;
      EXPECT_GT(ratio, 1.0);
      EXPECT_LT(ratio, 1.0 + 10.0 * c / (1.0 - 2.0 * c));
    }
}

TEST(Absorption, LargeChainsStayFinite) {
  const auto v = absorption_closed_form(chain_n(20), chain_c(20));
  EXPECT_FALSE(v.overflow);
  const double c20 = chain_c(20);
  const double gap = v.log10 - absorption_asymptotic(chain_n(20), c20).log10;
  EXPECT_GT(gap, 0.0);
  EXPECT_LT(gap, std::log10(1.0 + 10.0 * c20 / (1.0 - 2.0 * c20)));
  const auto huge = absorption_closed_form(chain_n(400), chain_c(400));
  EXPECT_TRUE(huge.overflow);
  EXPECT_GT(huge.log10, 300.0);
}
