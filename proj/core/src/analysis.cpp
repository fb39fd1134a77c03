#include "pcl/analysis.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#include "json.hpp"
#include "pcl/errors.hpp"
#include "pcl/persist.hpp"

namespace pcl {

using nlohmann::json;

const char* fit_model_name(FitModel m) noexcept {
  switch (m) {
    case FitModel::t_vs_lneps: return "T_vs_lneps";
    case FitModel::en_vs_nlnn: return "eN_vs_NlnN";
    case FitModel::thd_vs_nlnn: return "THD_vs_NlnN";
  }
  return "?";
}

std::vector<double> ols(const std::vector<std::vector<double>>& rows, std::span<const double> y) {
  if (rows.empty() || rows.size() != y.size()) throw InvalidArgument("ols: row count must match y");
  const auto p = static_cast<Eigen::Index>(rows.front().size());
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n < p) throw RankDeficient("ols: fewer observations than coefficients");
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != p) throw InvalidArgument("ols: ragged design matrix");
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rows[i][j];
    v(i) = y[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < p) throw RankDeficient("ols: design matrix is rank deficient");
  const Eigen::VectorXd beta = qr.solve(v);
  return {beta.data(), beta.data() + beta.size()};
}

double residual_sum_squares(const std::vector<std::vector<double>>& rows, std::span<const double> y,
                            std::span<const double> coef) {
  double rss = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double fit = 0.0;
    for (std::size_t j = 0; j < coef.size(); ++j) fit += rows[i][j] * coef[j];
    rss += (y[i] - fit) * (y[i] - fit);
  }
  return rss;
}

namespace {

std::string fingerprint(const std::vector<std::vector<double>>& rows, std::span<const double> y) {
  // FNV-1a over the printed inputs.
  std::uint64_t h = 1469598103934665603ull;
  auto eat = [&](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ull;
    }
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (double v : rows[i]) eat(format_double(v) + ",");
    eat(format_double(y[i]) + "\n");
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RegressionFit run_fit(FitModel model, std::vector<std::string> names, const std::vector<std::vector<double>>& rows,
                      std::span<const double> y) {
  RegressionFit f;
  f.model = model;
  f.names = std::move(names);
  f.coefficients = ols(rows, y);
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double tss = 0.0;
  double rss = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double fit = 0.0;
    for (std::size_t j = 0; j < f.coefficients.size(); ++j) fit += rows[i][j] * f.coefficients[j];
    f.residuals.push_back(y[i] - fit);
    rss += (y[i] - fit) * (y[i] - fit);
    tss += (y[i] - mean) * (y[i] - mean);
  }
  f.r_squared = tss > 0.0 ? 1.0 - rss / tss : 1.0;
  const std::size_t dof = rows.size() - f.coefficients.size();
  f.residual_std_error = dof > 0 ? std::sqrt(rss / static_cast<double>(dof)) : 0.0;
  f.fingerprint = fingerprint(rows, y);
  return f;
}

void require_distinct(std::span<const double> x, std::size_t need, const char* what) {
  const std::set<double> s(x.begin(), x.end());
  if (s.size() < need)
    throw RankDeficient(std::string(what) + ": need at least " + std::to_string(need) + " distinct values");
}

}  // namespace

EpsFit fit_eps_dependence(std::size_t n, std::span<const double> eps, std::span<const double> t_hat) {
  if (eps.size() != t_hat.size()) throw InvalidArgument("fit_eps_dependence: size mismatch");
  if (n == 0) throw InvalidArgument("fit_eps_dependence: N must be positive");
  for (double e : eps)
    if (!(e > 0.0)) throw InvalidArgument("fit_eps_dependence: eps must be positive");
  require_distinct(eps, 3, "fit_eps_dependence");
  std::vector<std::vector<double>> rows;
  for (double e : eps) rows.push_back({-3.0 * std::log(e), 1.0});
  EpsFit out;
  out.n = n;
  out.fit = run_fit(FitModel::t_vs_lneps, {"g", "e"}, rows, t_hat);
  out.g = out.fit.coefficients[0];
  out.e = out.fit.coefficients[1];
  out.c = out.g / static_cast<double>(n);
  return out;
}

OffsetFit fit_NlnN_offset(std::span<const double> n, std::span<const double> e) {
  if (n.size() != e.size()) throw InvalidArgument("fit_NlnN_offset: size mismatch");
  require_distinct(n, 4, "fit_NlnN_offset");
  std::vector<std::vector<double>> rows;
  for (double v : n) rows.push_back({v * std::log(v), v, 1.0});
  OffsetFit out;
  out.fit = run_fit(FitModel::en_vs_nlnn, {"a", "b", "f"}, rows, e);
  out.a = out.fit.coefficients[0];
  out.b = out.fit.coefficients[1];
  out.f = out.fit.coefficients[2];
  return out;
}

ThdFit fit_thd(std::span<const double> n, std::span<const double> thd) {
  if (n.size() != thd.size()) throw InvalidArgument("fit_thd: size mismatch");
  require_distinct(n, 3, "fit_thd");
  std::vector<std::vector<double>> rows;
  for (double v : n) rows.push_back({v * std::log(v), 1.0});
  ThdFit out;
  out.fit = run_fit(FitModel::thd_vs_nlnn, {"a_HD", "f_HD"}, rows, thd);
  out.a_hd = out.fit.coefficients[0];
  out.f_hd = out.fit.coefficients[1];
  return out;
}

std::size_t sign_runs(std::span<const double> residuals) {
  std::size_t runs = 0;
  int last = 0;
  for (double r : residuals) {
    const int s = r > 0.0 ? 1 : (r < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (s != last) ++runs;
    last = s;
  }
  return runs;
}

namespace {

ComparisonRow compare_one(const AggregateRow& a, double bound) {
  ComparisonRow c;
  c.model = a.model;
  c.n = a.n;
  c.dim = a.dim;
  c.eps = a.eps;
  c.t_hat = a.t_hat.mean;
  c.bound = bound;
  c.slack = bound - c.t_hat;
  c.ratio = c.t_hat > 0.0 ? bound / c.t_hat : std::numeric_limits<double>::infinity();
  c.violated = c.t_hat > bound;
  return c;
}

}  // namespace

std::vector<ComparisonRow> compare_bounds(std::span<const AggregateRow> rows, bool simplified) {
  std::vector<ComparisonRow> out;
  for (const auto& a : rows) out.push_back(compare_one(a, simplified ? a.bound_simplified : a.bound_exact));
  return out;
}

std::vector<ComparisonRow> compare_bounds(std::span<const AggregateRow> rows, std::span<const CellBound> bounds) {
  std::vector<ComparisonRow> out;
  for (const auto& a : rows) {
    const CellBound* hit = nullptr;
    for (const auto& b : bounds)
      if (b.model == a.model && b.n == a.n && b.dim == a.dim && b.eps == a.eps) hit = &b;
    if (!hit)
      throw InvalidArgument("compare_bounds: no bound for cell N=" + std::to_string(a.n) +
                            " eps=" + format_double(a.eps));
    out.push_back(compare_one(a, hit->bound));
  }
  return out;
}

std::string comparison_csv(std::span<const ComparisonRow> rows, std::uint64_t master_seed) {
  std::string s = header_comment(master_seed) + "\nmodel,N,D,epsilon,t_hat,bound,slack,ratio,violated\n";
  for (const auto& r : rows) {
    s += std::string(model_name(r.model)) + ',' + std::to_string(r.n) + ',' + std::to_string(r.dim) + ',' +
         format_double(r.eps) + ',' + format_double(r.t_hat) + ',' + format_double(r.bound) + ',' +
         format_double(r.slack) + ',' + format_double(r.ratio) + ',' + (r.violated ? "1" : "0") + '\n';
  }
  return s;
}

GridFits fit_grid(std::span<const AggregateRow> rows) {
  GridFits out;
  if (rows.empty()) return out;
  for (const auto& r : rows)
    if (r.model != rows.front().model || r.dim != rows.front().dim)
      throw InvalidArgument("fit_grid: rows must share one model and dimension");

  std::map<std::size_t, std::vector<const AggregateRow*>> by_n;
  for (const auto& r : rows) by_n[r.n].push_back(&r);

  std::vector<double> ns, es, thd_n, thd_v;
  for (const auto& [n, cells] : by_n) {
    std::vector<double> eps, t;
    double thd_sum = 0.0;
    std::uint64_t thd_count = 0;
    for (const auto* c : cells) {
      if (c->t_hat.count > 0) {
        eps.push_back(c->eps);
        t.push_back(c->t_hat.mean);
      }
      if (c->thd_hat && c->thd_hat->count > 0) {
        thd_sum += c->thd_hat->mean * static_cast<double>(c->thd_hat->count);
        thd_count += c->thd_hat->count;
      }
    }
    if (std::set<double>(eps.begin(), eps.end()).size() >= 3) {
      out.per_n.push_back(fit_eps_dependence(n, eps, t));
      ns.push_back(static_cast<double>(n));
      es.push_back(out.per_n.back().e);
    }
    if (thd_count > 0) {
      thd_n.push_back(static_cast<double>(n));
      thd_v.push_back(thd_sum / static_cast<double>(thd_count));
    }
  }
  if (ns.size() >= 4) out.offset = fit_NlnN_offset(ns, es);
  if (thd_n.size() >= 3) out.thd = fit_thd(thd_n, thd_v);
  return out;
}

namespace {

json fit_json(const RegressionFit& f) {
  json coef = json::object();
  for (std::size_t i = 0; i < f.names.size(); ++i) coef[f.names[i]] = f.coefficients[i];
  return {{"model", fit_model_name(f.model)},
          {"coefficients", coef},
          {"r_squared", f.r_squared},
          {"residual_std_error", f.residual_std_error},
          {"residuals", f.residuals},
          {"grid_fingerprint", f.fingerprint}};
}

}  // namespace

std::string fit_report_json(const RegressionFit& fit) { return fit_json(fit).dump(2) + "\n"; }

std::string grid_fits_json(const GridFits& fits) {
  json j;
  j["$comment"] = std::string("pcl ") + tool_version();
  j["per_n"] = json::array();
  for (const auto& e : fits.per_n) {
    json r = fit_json(e.fit);
    r["N"] = e.n;
    r["c_N"] = e.c;
    j["per_n"].push_back(r);
  }
  j["offset"] = fits.offset ? fit_json(fits.offset->fit) : json(nullptr);
  j["thd"] = fits.thd ? fit_json(fits.thd->fit) : json(nullptr);
  return j.dump(2) + "\n";
}

}  // namespace pcl
