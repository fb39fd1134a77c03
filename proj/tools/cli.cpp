#include "cli.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "pcl/analysis.hpp"
#include "pcl/bounds.hpp"
#include "pcl/config.hpp"
#include "pcl/errors.hpp"
#include "pcl/experiments.hpp"
#include "pcl/markov.hpp"
#include "pcl/persist.hpp"
#include "pcl/properties.hpp"

namespace pcl::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : Error {
  using Error::Error;
};

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("PCL_SEED");
  if (!v || !*v) return std::nullopt;
  const std::string s(v);
  if (s.find_first_not_of("0123456789") != std::string::npos) throw UsageError("PCL_SEED must be an unsigned integer");
  errno = 0;
  const auto seed = std::strtoull(s.c_str(), nullptr, 10);
  if (errno == ERANGE) throw UsageError("PCL_SEED is out of range");
  return seed;
}

// --seed > config file > PCL_SEED > built-in default.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, bool config_has_seed, std::uint64_t config_seed) {
  if (flag) return *flag;
  if (config_has_seed) return config_seed;
  if (auto e = env_seed()) return *e;
  return config_seed;
}

void log_config(std::ostream& err, const ExperimentConfig& cfg) {
  err << "resolved config:\n" << config_to_json(cfg) << "\n";
}

void write_run(const ExperimentConfig& cfg, const ResultTable& t, const std::string& dir, std::ostream& out) {
  for (const auto& p : persist(t, dir, cfg.format)) out << "wrote " << p << "\n";
  const std::string cfg_path = (fs::path(dir) / "resolved_config.json").string();
  write_atomic(cfg_path, config_to_json(cfg) + "\n");
  out << "wrote " << cfg_path << "\n";
}

void warn_caps(const ResultTable& t, std::ostream& err) {
  for (const auto& a : t.aggregates)
    if (a.cap_exhausted > 0)
      err << "warning: " << a.cap_exhausted << " trial(s) hit the step cap at N=" << a.n
          << " eps=" << format_double(a.eps) << "\n";
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<std::size_t> workers;
  std::optional<std::string> output;
  std::optional<std::string> format;
};

int do_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg = load_config(a.config);
  cfg.master_seed = resolve_seed(a.seed, cfg.master_seed_given, cfg.master_seed);
  if (a.trials) cfg.trials = *a.trials;
  if (a.workers) cfg.workers = *a.workers;
  if (a.output) cfg.output_path = *a.output;
  if (a.format) cfg.format = *a.format;
  validate(cfg);
  log_config(err, cfg);
  const auto table = run_experiment(cfg, cfg.workers);
  warn_caps(table, err);
  write_run(cfg, table, cfg.output_path, out);
  return ok;
}

// ---- bounds ---------------------------------------------------------------

struct BoundsArgs {
  std::string formula;
  std::optional<std::size_t> n, dim;
  std::optional<std::uint64_t> k;
  std::optional<double> eps, a, b, l0, alpha, delta;
};

template <class T>
T need(const std::optional<T>& v, const char* flag, const std::string& formula) {
  if (!v) throw UsageError(std::string("--") + flag + " is required for --formula " + formula);
  return *v;
}

std::string fmt_large(const LargeValue& v) {
  if (v.exact_integer) return std::to_string(*v.exact_integer);
  return format_double(v.value);
}

int do_bounds(const BoundsArgs& a, std::ostream& out) {
  const std::string& f = a.formula;
  std::ostringstream in;
  auto add = [&](const char* name, auto v) {
    if (in.tellp() > 0) in << ';';
    in << name << '=';
    if constexpr (std::is_floating_point_v<decltype(v)>) in << format_double(v);
    else in << v;
  };
  struct Row {
    std::string id, exact, simplified, note;
  };
  std::vector<Row> rows;
  auto bound_row = [&](const std::string& id, const BoundValue& v) {
    rows.push_back({id, format_double(v.exact), format_double(v.simplified), v.clamped ? "clamped" : ""});
  };
  auto single = [&](const std::string& id, double v) { rows.push_back({id, format_double(v), "", ""}); };

  if (f == "contraction") {
    const auto n = need(a.n, "n", f);
    add("n", n);
    single(f, contraction_factor(n));
  } else if (f == "deficit") {
    const auto n = need(a.n, "n", f);
    add("n", n);
    single(f, contraction_deficit(n));
  } else if (f == "expected-lyapunov") {
    const auto n = need(a.n, "n", f);
    const auto k = need(a.k, "k", f);
    const auto l0 = need(a.l0, "l0", f);
    add("n", n), add("k", k), add("l0", l0);
    single(f, expected_lyapunov(k, l0, n));
  } else if (f == "expected-l0-uniform") {
    const auto n = need(a.n, "n", f);
    add("n", n), add("a", a.a.value_or(0.0)), add("b", a.b.value_or(1.0));
    single(f, expected_initial_lyapunov_uniform(n, a.a.value_or(0.0), a.b.value_or(1.0)));
  } else if (f == "t-eps-scalar") {
    const auto n = need(a.n, "n", f);
    const auto eps = need(a.eps, "eps", f);
    const auto l0 = need(a.l0, "l0", f);
    add("n", n), add("eps", eps), add("l0", l0);
    bound_row(f, t_eps_bound_scalar(n, eps, l0));
  } else if (f == "t-eps-interval" || f == "t-eps-uniform" || f == "gossip") {
    const auto n = need(a.n, "n", f);
    const auto eps = need(a.eps, "eps", f);
    const double lo = a.a.value_or(0.0), hi = a.b.value_or(1.0);
    add("n", n), add("eps", eps), add("a", lo), add("b", hi);
    if (f == "t-eps-interval") bound_row(f, t_eps_bound_interval(n, eps, lo, hi));
    else if (f == "t-eps-uniform") bound_row(f, t_eps_bound_uniform_init(n, eps, lo, hi));
    else bound_row(f, gossip_time_bound(n, eps, lo, hi));
  } else if (f == "t-eps-vector" || f == "t-eps-vector-uniform") {
    const auto n = need(a.n, "n", f);
    const auto dim = need(a.dim, "dim", f);
    const auto eps = need(a.eps, "eps", f);
    const double lo = a.a.value_or(0.0), hi = a.b.value_or(1.0);
    add("n", n), add("dim", dim), add("eps", eps), add("a", lo), add("b", hi);
    const VectorBoundInput input =
        f == "t-eps-vector" ? VectorBoundInput(WorstCaseCube{lo, hi}) : VectorBoundInput(UniformCube{lo, hi});
    bound_row(f, t_eps_bound_vector(n, dim, eps, input));
  } else if (f == "range-sq" || f == "range-sq-uniform") {
    const auto n = need(a.n, "n", f);
    const auto k = need(a.k, "k", f);
    RangeSqBounds r;
    if (f == "range-sq") {
      const auto l0 = need(a.l0, "l0", f);
      add("n", n), add("k", k), add("l0", l0);
      r = expected_range_sq_bounds(k, l0, n);
    } else {
      const double lo = a.a.value_or(0.0), hi = a.b.value_or(1.0);
      add("n", n), add("k", k), add("a", lo), add("b", hi);
      r = expected_range_sq_bounds_uniform(k, n, lo, hi);
    }
    single(f + "-lower", r.lower);
    single(f + "-upper", r.upper);
  } else if (f == "edsm") {
    const auto alpha = need(a.alpha, "alpha", f);
    const auto eps = need(a.eps, "eps", f);
    add("alpha", alpha), add("eps", eps);
    const auto e = edsm_bounds(alpha, eps);
    single("edsm-cv", e.cv);
    single("edsm-gossip", e.gossip);
  } else if (f == "t-hd") {
    const auto n = need(a.n, "n", f);
    const double delta = a.delta.value_or(kHalfDiskDeltaOpt);
    add("n", n), add("delta", delta);
    const auto v = t_hd_bound(n, delta);
    rows.push_back({f, fmt_large(v), "", "log10=" + format_double(v.log10) + (v.overflow ? ";overflow" : "")});
  } else if (f == "t-eps-circle") {
    const auto n = need(a.n, "n", f);
    const auto eps = need(a.eps, "eps", f);
    add("n", n), add("eps", eps);
    single(f, t_eps_bound_circle(n, eps));
  } else {
    throw UsageError("unknown --formula '" + f + "'");
  }
  out << "formula,inputs,exact,simplified,note\n";
  for (const auto& r : rows) out << r.id << ',' << in.str() << ',' << r.exact << ',' << r.simplified << ',' << r.note << "\n";
  return ok;
}

// ---- markov ---------------------------------------------------------------

struct MarkovArgs {
  std::optional<std::size_t> n;
  std::optional<double> c;
  std::optional<std::size_t> from_agents;
  bool closed_form_only = false;
};

int do_markov(const MarkovArgs& a, std::ostream& out) {
  std::size_t n = 0;
  double c = 0.0;
  if (a.from_agents) {
    if (a.n || a.c) throw UsageError("--from-agents excludes --n and --c");
    n = chain_n(*a.from_agents);
    c = chain_c(*a.from_agents);
  } else {
    if (!a.n || !a.c) throw UsageError("give --n and --c, or --from-agents");
    n = *a.n;
    c = *a.c;
  }
  std::optional<LargeValue> closed;
  if (a.closed_form_only || c < 0.5) closed = absorption_closed_form(n, c);
  out << "n,c,closed_form,closed_form_log10,solve,asymptotic,asymptotic_log10,relative_gap\n";
  out << n << ',' << format_double(c) << ',';
  out << (closed ? fmt_large(*closed) : "") << ',' << (closed ? format_double(closed->log10) : "") << ',';
  if (a.closed_form_only) {
    out << ",,,\n";
    return ok;
  }
  const double solved = absorption_solve(n, c).expected.front();
  const auto asym = absorption_asymptotic(n, c);
  std::string gap;
  if (closed && !closed->overflow) gap = format_double(std::fabs(closed->value - solved) / std::fabs(solved));
  out << format_double(solved) << ',' << fmt_large(asym) << ',' << format_double(asym.log10) << ',' << gap << "\n";
  return ok;
}

// ---- fit ------------------------------------------------------------------

int do_fit(const std::vector<std::string>& inputs, const std::optional<std::string>& output, std::ostream& out) {
  std::vector<AggregateRow> rows;
  for (const auto& p : inputs) {
    auto r = parse_aggregates_csv(read_file(p));
    rows.insert(rows.end(), r.begin(), r.end());
  }
  std::map<std::pair<int, std::size_t>, std::vector<AggregateRow>> groups;
  for (auto& r : rows) groups[{static_cast<int>(r.model), r.dim}].push_back(r);
  std::string report = "[\n";
  bool first = true;
  for (const auto& [key, g] : groups) {
    const auto fits = fit_grid(g);
    if (!first) report += ",\n";
    first = false;
    report += "{\"model\": \"" + std::string(model_name(g.front().model)) + "\", \"D\": " +
              std::to_string(g.front().dim) + ", \"fits\": " + grid_fits_json(fits) + "}";
  }
  report += "\n]\n";
  if (output) {
    write_atomic(*output, report);
    out << "wrote " << *output << "\n";
  } else {
    out << report;
  }
  return ok;
}

// ---- check-identities -----------------------------------------------------

int do_check_identities(const IdentitySuiteOptions& opt, std::ostream& out, std::ostream& err) {
  const auto rep = run_identity_suite(opt);
  out << "configs=" << rep.configs << " degenerate=" << rep.degenerate << " mc_configs=" << rep.mc_configs
      << " worst_identity_ratio=" << format_double(rep.worst_identity_ratio)
      << " worst_z=" << format_double(rep.worst_z) << "\n";
  if (rep.passed()) {
    out << "PASS\n";
    return ok;
  }
  for (const auto& f : rep.failures) {
    err << "FAIL " << f.check << " value=" << format_double(f.value) << " limit=" << format_double(f.limit)
        << " N=" << f.theta.size() << " theta=";
    for (std::size_t i = 0; i < f.theta.size(); ++i) err << (i ? ";" : "") << format_double(f.theta[i]);
    err << "\n";
  }
  out << "FAIL\n";
  return property_failure;
}

// ---- reproduce-paper ------------------------------------------------------

struct ReproduceArgs {
  std::string scale = "desk";
  std::string output = "reproduce";
  std::vector<std::string> models{"scalar", "box", "circle"};
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<std::size_t> workers;
};

int do_reproduce(const ReproduceArgs& a, std::ostream& out, std::ostream& err) {
  PresetScale scale;
  if (a.scale == "desk") scale = PresetScale::desk;
  else if (a.scale == "reduced") scale = PresetScale::reduced;
  else if (a.scale == "full") scale = PresetScale::full;
  else throw UsageError("--scale must be desk, reduced or full");

  std::string summary = "model,D,cells,violations,cap_exhausted\n";
  std::uint64_t summary_seed = 0;
  for (const auto& m : a.models) {
    for (auto cfg : paper_presets(parse_model(m), scale)) {
      // Presets carry a default seed, so PCL_SEED may still override it.
      cfg.master_seed = resolve_seed(a.seed, false, cfg.master_seed);
      summary_seed = cfg.master_seed;
      if (a.trials) cfg.trials = *a.trials;
      if (a.workers) cfg.workers = *a.workers;
      const std::string sub = cfg.model == Model::box ? m + "-D" + std::to_string(cfg.dim) : m;
      cfg.output_path = (fs::path(a.output) / sub).string();
      validate(cfg);
      log_config(err, cfg);
      const auto table = run_experiment(cfg, cfg.workers);
      warn_caps(table, err);
      write_run(cfg, table, cfg.output_path, out);

      const auto cmp = compare_bounds(table.aggregates);
      const std::string cmp_path = (fs::path(cfg.output_path) / "comparison.csv").string();
      write_atomic(cmp_path, comparison_csv(cmp, cfg.master_seed));
      out << "wrote " << cmp_path << "\n";
      const std::string fit_path = (fs::path(cfg.output_path) / "fits.json").string();
      write_atomic(fit_path, grid_fits_json(fit_grid(table.aggregates)));
      out << "wrote " << fit_path << "\n";

      const auto violations = std::count_if(cmp.begin(), cmp.end(), [](const auto& r) { return r.violated; });
      summary += m + ',' + std::to_string(cfg.dim) + ',' + std::to_string(cmp.size()) + ',' +
                 std::to_string(violations) + ',' + std::to_string(table.cap_exhausted_total()) + '\n';
    }
  }
  const std::string summary_path = (fs::path(a.output) / "summary.csv").string();
  write_atomic(summary_path, header_comment(summary_seed) + "\n" + summary);
  out << "wrote " << summary_path << "\n";
  return ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pairwise consensus simulation and bounds toolkit", "pcl"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Run a Monte Carlo experiment from a JSON config");
  s->add_option("--config,-c", sim.config, "Config file")->required();
  s->add_option("--seed", sim.seed, "Master seed");
  s->add_option("--trials", sim.trials, "Trials per cell");
  s->add_option("--workers", sim.workers, "Worker threads (0: all cores)");
  s->add_option("--output,-o", sim.output, "Output directory");
  s->add_option("--format", sim.format, "csv or json");

  BoundsArgs bnd;
  auto* b = app.add_subcommand("bounds", "Evaluate a closed-form bound");
  b->add_option("--formula,-f", bnd.formula, "Formula id")->required();
  b->add_option("--n", bnd.n);
  b->add_option("--dim", bnd.dim);
  b->add_option("--k", bnd.k);
  b->add_option("--eps", bnd.eps);
  b->add_option("--a", bnd.a);
  b->add_option("--b", bnd.b);
  b->add_option("--l0", bnd.l0);
  b->add_option("--alpha", bnd.alpha);
  b->add_option("--delta", bnd.delta);

  MarkovArgs mk;
  auto* m = app.add_subcommand("markov", "Absorption time of the worst-case chain");
  m->add_option("--n", mk.n, "Chain length");
  m->add_option("--c", mk.c, "Increase probability");
  m->add_option("--from-agents", mk.from_agents, "Derive n and c from the agent count");
  m->add_flag("--closed-form-only", mk.closed_form_only);

  std::vector<std::string> fit_inputs;
  std::optional<std::string> fit_output;
  auto* f = app.add_subcommand("fit", "Regression fits from aggregate CSV files");
  f->add_option("--input,-i", fit_inputs, "Aggregate CSV")->required();
  f->add_option("--output,-o", fit_output, "Report path (stdout if absent)");

  IdentitySuiteOptions ids;
  auto* ci = app.add_subcommand("check-identities", "Circle identity and drift property suite");
  ci->add_option("--seed", ids.seed);
  ci->add_option("--configs", ids.configs);
  ci->add_option("--mc-samples", ids.mc_samples);
  ci->add_option("--mc-per-n", ids.mc_configs_per_n);

  ReproduceArgs rep;
  auto* r = app.add_subcommand("reproduce-paper", "Run the built-in experiment grids");
  r->add_option("--scale", rep.scale, "desk, reduced or full");
  r->add_option("--output,-o", rep.output, "Output directory");
  r->add_option("--models", rep.models, "Subset of scalar, box, circle");
  r->add_option("--seed", rep.seed);
  r->add_option("--trials", rep.trials);
  r->add_option("--workers", rep.workers);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage_error;
  }

  try {
    if (*s) return do_simulate(sim, out, err);
    if (*b) return do_bounds(bnd, out);
    if (*m) return do_markov(mk, out);
    if (*f) return do_fit(fit_inputs, fit_output, out);
    if (*ci) return do_check_identities(ids, out, err);
    if (*r) return do_reproduce(rep, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return io_error;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return usage_error;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return usage_error;
  }
  return usage_error;
}

}  // namespace pcl::cli
