#include "pcl/markov.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "pcl/errors.hpp"

namespace pcl {

namespace {

void require_chain(std::size_t n, double c, double c_max) {
  if (n < 1) throw InvalidArgument("chain length n must be >= 1");
  if (!(c > 0.0 && c < c_max)) throw InvalidArgument("chain probability c out of range");
}

LargeValue from_natural_log(double ln_value) {
  LargeValue out;
  out.log10 = ln_value / std::numbers::ln10;
  if (ln_value > 700.0) {
    out.value = std::numeric_limits<double>::infinity();
    out.overflow = true;
  } else {
    out.value = std::exp(ln_value);
  }
  return out;
}

}  // namespace

double chebyshev_U(std::size_t i, double x) {
  const double k = static_cast<double>(i) + 1.0;
  if (x == 1.0) return k;
  if (x == -1.0) return (i % 2 == 0) ? k : -k;
  if (std::fabs(x) < 1.0) {
    const double t = std::acos(x);
    return std::sin(k * t) / std::sin(t);
  }
  const double t = std::acosh(std::fabs(x));
  const double u = std::sinh(k * t) / std::sinh(t);
  return (x < 0.0 && i % 2 == 1) ? -u : u;
}

double chain_c(std::size_t n_agents) {
  if (n_agents < 3) throw InvalidArgument("chain parameter c requires N >= 3");
  const double nn = static_cast<double>(n_agents);
  return 4.0 / (27.0 * nn * nn * (nn - 1.0) * (nn - 1.0));
}

std::size_t chain_n(std::size_t n_agents) {
  if (n_agents < 3) throw InvalidArgument("chain length requires N >= 3");
  return n_agents / 2;
}

double toeplitz_inverse_entry(std::size_t n, double c, std::size_t i, std::size_t j) {
  require_chain(n, c, 0.5);
  if (i >= n || j >= n) throw InvalidArgument("Toeplitz inverse index out of range");
  const double s = std::sqrt(c * (1.0 - c));
  const double d = 1.0 / (2.0 * s);
  // 1-based indices as in the usual statement of the formula.
  const std::size_t r = i + 1;
  const std::size_t q = j + 1;
  const double un = chebyshev_U(n, d);
  if (r <= q) {
    const double m = static_cast<double>(q - r);
    return std::pow(c, m) / std::pow(s, m + 1.0) * chebyshev_U(r - 1, d) * chebyshev_U(n - q, d) / un;
  }
  const double m = static_cast<double>(r - q);
  return std::pow(1.0 - c, m) / std::pow(s, m + 1.0) * chebyshev_U(q - 1, d) * chebyshev_U(n - r, d) / un;
}

std::vector<double> absorption_matrix_inverse(std::size_t n, double c) {
  require_chain(n, c, 0.5);
  std::vector<double> binv(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) binv[i * n + j] = toeplitz_inverse_entry(n, c, i, j);
  // I - W' = B + u e1^T with u = (c - 1) e1.
  // 1 + u B^-1_00 cancels badly; it equals det(I - W') / det(B) = c^n / (s^n U_n(d)).
  const double u = c - 1.0;
  const double s = std::sqrt(c * (1.0 - c));
  const double nn = static_cast<double>(n);
  const double denom = std::exp(nn * (std::log(c) - std::log(s))) / chebyshev_U(n, 1.0 / (2.0 * s));
  std::vector<double> out(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = binv[i * n + j] - u * binv[i * n] * binv[j] / denom;
  return out;
}

LargeValue absorption_closed_form(std::size_t n, double c) {
  if (c >= 0.5) throw UnsupportedRegime("closed form derived only for c < 1/2");
  require_chain(n, c, 0.5);
  const double nn = static_cast<double>(n);
  const double lq = std::log(c) - std::log1p(-c);  // ln q, q = c/(1-c) < 1
  const double q = std::exp(lq);
  const double qn1 = std::exp((nn + 1.0) * lq);
  const double one_minus_qn = -std::expm1(nn * lq);
  const double one_minus_qn1 = -std::expm1((nn + 1.0) * lq);

  // First bracket: 1 + q^-n (1 - q^n)/(1 - q) = (q^-n - q)/(1 - q).
  const double ln_first = -nn * lq + std::log1p(-qn1) - std::log1p(-q);
  // Second bracket stays O(1) for every n.
  const double second = (one_minus_qn / (1.0 - 2.0 * c) - nn / c * qn1) / one_minus_qn1;
  return from_natural_log(ln_first + std::log(second));
}

AbsorptionResult absorption_solve(std::size_t n, double c) {
  require_chain(n, c, 1.0);
  AbsorptionResult res;
  res.expected.assign(n, 0.0);
  if (n == 1) {
    res.expected[0] = 1.0 / c;
    return res;
  }
  // Eliminate from the absorbing end: E_i = alpha_i + beta_i E_{i-1}.
  // gamma_i = 1 - beta_i is carried directly; forming 1 - beta_1 at the end
  // would cancel catastrophically when E_0 is huge.
  std::vector<double> alpha(n), beta(n);
  alpha[n - 1] = 1.0;
  beta[n - 1] = 1.0 - c;
  double gamma = c;
  for (std::size_t i = n - 2; i >= 1; --i) {
    const double denom = (1.0 - c) + c * gamma;
    alpha[i] = (1.0 + c * alpha[i + 1]) / denom;
    beta[i] = (1.0 - c) / denom;
    gamma = c * gamma / denom;
  }
  res.expected[0] = (1.0 + c * alpha[1]) / (c * gamma);
  for (std::size_t i = 1; i < n; ++i) res.expected[i] = alpha[i] + beta[i] * res.expected[i - 1];
  return res;
}

LargeValue absorption_asymptotic(std::size_t n, double c) {
  require_chain(n, c, 1.0);
  return from_natural_log(static_cast<double>(n) * (std::log1p(-c) - std::log(c)));
}

}  // namespace pcl
