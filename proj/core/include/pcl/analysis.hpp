#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcl/experiments.hpp"

namespace pcl {

enum class FitModel { t_vs_lneps, en_vs_nlnn, thd_vs_nlnn };

const char* fit_model_name(FitModel m) noexcept;

struct RegressionFit {
  FitModel model = FitModel::t_vs_lneps;
  std::vector<std::string> names;
  std::vector<double> coefficients;
  std::vector<double> residuals;
  double r_squared = 0.0;
  double residual_std_error = 0.0;  // sqrt(RSS / (n - p)); 0 when n == p
  std::string fingerprint;           // hash of the (x, y) input grid
};

// Plain OLS; rows are regressor vectors. Throws RankDeficient.
std::vector<double> ols(const std::vector<std::vector<double>>& rows, std::span<const double> y);
double residual_sum_squares(const std::vector<std::vector<double>>& rows, std::span<const double> y,
                            std::span<const double> coef);

struct EpsFit {
  std::size_t n = 0;
  double g = 0.0;
  double e = 0.0;
  double c = 0.0;  // g / N
  RegressionFit fit;
};

// T = -3 g ln(eps) + e. Needs >= 3 distinct eps.
EpsFit fit_eps_dependence(std::size_t n, std::span<const double> eps, std::span<const double> t_hat);

struct OffsetFit {
  double a = 0.0;
  double b = 0.0;
  double f = 0.0;
  RegressionFit fit;
};

// e = a N ln N + b N + f. Needs >= 4 distinct N.
OffsetFit fit_NlnN_offset(std::span<const double> n, std::span<const double> e);

struct ThdFit {
  double a_hd = 0.0;
  double f_hd = 0.0;
  RegressionFit fit;
};

// T_HD = a N ln N + f. Needs >= 3 distinct N.
ThdFit fit_thd(std::span<const double> n, std::span<const double> thd);

// Number of runs of equal sign (zeros skipped). Two or fewer runs is a
// monotone pattern.
std::size_t sign_runs(std::span<const double> residuals);

struct ComparisonRow {
  Model model = Model::scalar;
  std::size_t n = 0;
  std::size_t dim = 1;
  double eps = 0.0;
  double t_hat = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // bound - t_hat
  double ratio = 0.0;  // bound / t_hat
  bool violated = false;
};

struct CellBound {
  Model model = Model::scalar;
  std::size_t n = 0;
  std::size_t dim = 1;
  double eps = 0.0;
  double bound = 0.0;
};

// Against the bound stored in each aggregate row (exact form unless
// `simplified`).
std::vector<ComparisonRow> compare_bounds(std::span<const AggregateRow> rows, bool simplified = false);
// Against externally supplied bounds; every row needs a matching cell or
// InvalidArgument is thrown.
std::vector<ComparisonRow> compare_bounds(std::span<const AggregateRow> rows, std::span<const CellBound> bounds);

std::string comparison_csv(std::span<const ComparisonRow> rows, std::uint64_t master_seed);

struct GridFits {
  std::vector<EpsFit> per_n;
  std::optional<OffsetFit> offset;
  std::optional<ThdFit> thd;
};

// Per-N eps fits where a cell series has >= 3 eps, the e_N offset fit when
// >= 4 N are available, and the T_HD fit from circle rows carrying thd_hat.
GridFits fit_grid(std::span<const AggregateRow> rows);

std::string fit_report_json(const RegressionFit& fit);
std::string grid_fits_json(const GridFits& fits);

}  // namespace pcl
