#include "pcl/persist.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <limits>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pcl/config.hpp"
#include "pcl/errors.hpp"

namespace pcl {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string header_comment(std::uint64_t master_seed) {
  return std::string("# pcl ") + tool_version() + " master_seed=" + std::to_string(master_seed);
}

namespace {

std::string opt(const std::optional<std::uint64_t>& v) { return v ? std::to_string(*v) : std::string(); }
std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += format_double(v[i]);
  }
  return s;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

struct CsvCursor {
  std::size_t line = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("csv", "line " + std::to_string(line) + ": " + what);
  }

  double real(const std::string& s) const {
    if (s.empty()) fail("missing number");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) fail("bad number '" + s + "'");
    return v;
  }
  std::optional<double> opt_real(const std::string& s) const {
    if (s.empty()) return std::nullopt;
    return real(s);
  }
  std::uint64_t count(const std::string& s) const {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) fail("bad integer '" + s + "'");
    errno = 0;
    const auto v = std::strtoull(s.c_str(), nullptr, 10);
    if (errno == ERANGE) fail("integer out of range '" + s + "'");
    return v;
  }
  std::optional<std::uint64_t> opt_count(const std::string& s) const {
    if (s.empty()) return std::nullopt;
    return count(s);
  }
  std::vector<double> reals(const std::string& s) const {
    std::vector<double> out;
    if (s.empty()) return out;
    for (const auto& part : split(s, ';')) out.push_back(real(part));
    return out;
  }
  Model model(const std::string& s) const {
    try {
      return parse_model(s);
    } catch (const ConfigError&) {
      fail("unknown model '" + s + "'");
    }
  }
};

// Calls `row` for each data line after checking the header.
template <class F>
void scan_csv(const std::string& text, const char* header, std::size_t columns, F row) {
  std::istringstream in(text);
  std::string line;
  CsvCursor cur;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++cur.line;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      if (line != header) cur.fail("header does not match the expected schema");
      seen_header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != columns) cur.fail("expected " + std::to_string(columns) + " fields");
    row(cur, f);
  }
  if (!seen_header) throw ConfigError("csv", "missing header line");
}

json opt_json(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? json(*v) : json(nullptr);
}
json opt_json(const std::optional<std::uint64_t>& v) { return v ? json(*v) : json(nullptr); }
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json stats_json(const AggregateStats& s) {
  return {{"count", s.count}, {"mean", finite_or_null(s.mean)}, {"std", opt_json(s.std_dev)},
          {"stderr", opt_json(s.std_error)}};
}

AggregateStats stats_from(const json& j) {
  AggregateStats s;
  s.count = j.at("count").get<std::uint64_t>();
  s.mean = j.at("mean").is_null() ? 0.0 : j.at("mean").get<double>();
  if (!j.at("std").is_null()) s.std_dev = j.at("std").get<double>();
  if (!j.at("stderr").is_null()) s.std_error = j.at("stderr").get<double>();
  return s;
}

std::optional<std::uint64_t> opt_u64(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::uint64_t>();
}
std::optional<double> opt_f64(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

std::string trials_csv(const ResultTable& t) {
  std::string s = header_comment(t.master_seed) + "\n" + kTrialsCsvHeader + "\n";
  for (const auto& r : t.trials) {
    s += std::string(model_name(r.model)) + ',' + std::to_string(r.n) + ',' + std::to_string(r.dim) + ',' +
         format_double(r.eps) + ',' + std::to_string(r.trial) + ',' + std::to_string(r.seed) + ',' + opt(r.t_eps) +
         ',' + opt(r.t_eps_prime) + ',' + opt(r.t_hd) + ',' + (r.cap_hit ? "1" : "0") + ',' +
         format_double(r.final_range) + ',' + opt(r.final_lyapunov) + ',' + join(r.final_mean) + '\n';
  }
  return s;
}

std::string aggregates_csv(const ResultTable& t) {
  std::string s = header_comment(t.master_seed) + "\n" + kAggregateCsvHeader + "\n";
  for (const auto& a : t.aggregates) {
    const bool has_thd = a.thd_hat && a.thd_hat->count > 0;
    const std::string thd_mean = has_thd ? format_double(a.thd_hat->mean) : std::string();
    const std::string thd_std = has_thd ? opt(a.thd_hat->std_dev) : std::string();
    const std::string t_mean = a.t_hat.count > 0 ? format_double(a.t_hat.mean) : std::string();
    s += std::string(model_name(a.model)) + ',' + std::to_string(a.n) + ',' + std::to_string(a.dim) + ',' +
         format_double(a.eps) + ',' + std::to_string(a.trials) + ',' + t_mean + ',' + opt(a.t_hat.std_dev) +
         ',' + opt(a.t_hat.std_error) + ',' + thd_mean + ',' + thd_std + ',' +
         format_double(a.bound_exact) + ',' + format_double(a.bound_simplified) + '\n';
  }
  return s;
}

std::string traces_csv(const ResultTable& t) {
  std::string s = header_comment(t.master_seed) + "\n" + kTraceCsvHeader + "\n";
  for (const auto& r : t.traces) {
    s += std::string(model_name(r.model)) + ',' + std::to_string(r.n) + ',' + std::to_string(r.dim) + ',' +
         format_double(r.eps) + ',' + std::to_string(r.trial) + ',' + std::to_string(r.step) + ',' +
         opt(r.lyapunov) + ',' + format_double(r.range) + ',' + join(r.mean) + ',' + opt(r.sum_x) + ',' +
         opt(r.sum_y) + ',' + opt(r.gamma_max) + '\n';
  }
  return s;
}

std::vector<TrialRow> parse_trials_csv(const std::string& text) {
  std::vector<TrialRow> rows;
  scan_csv(text, kTrialsCsvHeader, 13, [&](const CsvCursor& c, const std::vector<std::string>& f) {
    TrialRow r;
    r.model = c.model(f[0]);
    r.n = c.count(f[1]);
    r.dim = c.count(f[2]);
    r.eps = c.real(f[3]);
    r.trial = c.count(f[4]);
    r.seed = c.count(f[5]);
    r.t_eps = c.opt_count(f[6]);
    r.t_eps_prime = c.opt_count(f[7]);
    r.t_hd = c.opt_count(f[8]);
    if (f[9] != "0" && f[9] != "1") c.fail("steps_cap_hit must be 0 or 1");
    r.cap_hit = f[9] == "1";
    r.final_range = c.real(f[10]);
    r.final_lyapunov = c.opt_real(f[11]);
    r.final_mean = c.reals(f[12]);
    rows.push_back(std::move(r));
  });
  return rows;
}

std::vector<AggregateRow> parse_aggregates_csv(const std::string& text) {
  std::vector<AggregateRow> rows;
  scan_csv(text, kAggregateCsvHeader, 12, [&](const CsvCursor& c, const std::vector<std::string>& f) {
    AggregateRow a;
    a.model = c.model(f[0]);
    a.n = c.count(f[1]);
    a.dim = c.count(f[2]);
    a.eps = c.real(f[3]);
    a.trials = c.count(f[4]);
    if (const auto m = c.opt_real(f[5])) {
      a.t_hat.mean = *m;
      a.t_hat.count = a.trials;
    }
    a.t_hat.std_dev = c.opt_real(f[6]);
    a.t_hat.std_error = c.opt_real(f[7]);
    if (const auto m = c.opt_real(f[8])) {
      AggregateStats s;
      s.mean = *m;
      s.count = a.trials;
      s.std_dev = c.opt_real(f[9]);
      a.thd_hat = s;
    }
    a.bound_exact = c.real(f[10]);
    a.bound_simplified = c.real(f[11]);
    rows.push_back(std::move(a));
  });
  return rows;
}

std::string table_json(const ResultTable& t) {
  json j;
  j["$comment"] = header_comment(t.master_seed).substr(2);
  j["master_seed"] = t.master_seed;
  j["trials"] = json::array();
  for (const auto& r : t.trials) {
    j["trials"].push_back({{"model", model_name(r.model)},
                           {"N", r.n},
                           {"D", r.dim},
                           {"epsilon", r.eps},
                           {"trial", r.trial},
                           {"seed", r.seed},
                           {"t_eps", opt_json(r.t_eps)},
                           {"t_eps_prime", opt_json(r.t_eps_prime)},
                           {"t_hd", opt_json(r.t_hd)},
                           {"steps_cap_hit", r.cap_hit},
                           {"final_range", r.final_range},
                           {"final_lyapunov", opt_json(r.final_lyapunov)},
                           {"final_mean", r.final_mean}});
  }
  j["aggregates"] = json::array();
  for (const auto& a : t.aggregates) {
    j["aggregates"].push_back({{"model", model_name(a.model)},
                               {"N", a.n},
                               {"D", a.dim},
                               {"epsilon", a.eps},
                               {"trials", a.trials},
                               {"t_hat", stats_json(a.t_hat)},
                               {"thd_hat", a.thd_hat ? stats_json(*a.thd_hat) : json(nullptr)},
                               {"bound_exact", finite_or_null(a.bound_exact)},
                               {"bound_simplified", finite_or_null(a.bound_simplified)},
                               {"cap_exhausted", a.cap_exhausted}});
  }
  j["traces"] = json::array();
  for (const auto& r : t.traces) {
    j["traces"].push_back({{"model", model_name(r.model)},
                           {"N", r.n},
                           {"D", r.dim},
                           {"epsilon", r.eps},
                           {"trial", r.trial},
                           {"step", r.step},
                           {"lyapunov", opt_json(r.lyapunov)},
                           {"range", r.range},
                           {"mean", r.mean},
                           {"vector_sum_x", opt_json(r.sum_x)},
                           {"vector_sum_y", opt_json(r.sum_y)},
                           {"gamma_max", opt_json(r.gamma_max)}});
  }
  return j.dump(1) + "\n";
}

ResultTable parse_table_json(const std::string& text) {
  ResultTable t;
  try {
    const json j = json::parse(text);
    t.master_seed = j.at("master_seed").get<std::uint64_t>();
    for (const auto& r : j.at("trials")) {
      TrialRow row;
      row.model = parse_model(r.at("model").get<std::string>());
      row.n = r.at("N").get<std::size_t>();
      row.dim = r.at("D").get<std::size_t>();
      row.eps = r.at("epsilon").get<double>();
      row.trial = r.at("trial").get<std::uint64_t>();
      row.seed = r.at("seed").get<std::uint64_t>();
      row.t_eps = opt_u64(r.at("t_eps"));
      row.t_eps_prime = opt_u64(r.at("t_eps_prime"));
      row.t_hd = opt_u64(r.at("t_hd"));
      row.cap_hit = r.at("steps_cap_hit").get<bool>();
      row.final_range = r.at("final_range").get<double>();
      row.final_lyapunov = opt_f64(r.at("final_lyapunov"));
      row.final_mean = r.at("final_mean").get<std::vector<double>>();
      t.trials.push_back(std::move(row));
    }
    for (const auto& a : j.at("aggregates")) {
      AggregateRow row;
      row.model = parse_model(a.at("model").get<std::string>());
      row.n = a.at("N").get<std::size_t>();
      row.dim = a.at("D").get<std::size_t>();
      row.eps = a.at("epsilon").get<double>();
      row.trials = a.at("trials").get<std::uint64_t>();
      row.t_hat = stats_from(a.at("t_hat"));
      if (!a.at("thd_hat").is_null()) row.thd_hat = stats_from(a.at("thd_hat"));
      const double inf = std::numeric_limits<double>::infinity();
      row.bound_exact = a.at("bound_exact").is_null() ? inf : a.at("bound_exact").get<double>();
      row.bound_simplified = a.at("bound_simplified").is_null() ? inf : a.at("bound_simplified").get<double>();
      row.cap_exhausted = a.at("cap_exhausted").get<std::uint64_t>();
      t.aggregates.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    throw ConfigError("json", e.what());
  }
  return t;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw IoError(target.parent_path().string(), "cannot create directory: " + ec.message());
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(tmp, "cannot open for writing");
    out << content;
    out.flush();
    if (!out) throw IoError(tmp, "write failed");
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError(path, "cannot rename temp file into place");
  }
}

std::vector<std::string> persist(const ResultTable& t, const std::string& dir, const std::string& format) {
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& content) {
    const std::string p = (fs::path(dir) / name).string();
    write_atomic(p, content);
    written.push_back(p);
  };
  if (format == "json") {
    put("results.json", table_json(t));
  } else if (format == "csv") {
    put("trials.csv", trials_csv(t));
    put("aggregate.csv", aggregates_csv(t));
    if (!t.traces.empty()) put("traces.csv", traces_csv(t));
  } else {
    throw ConfigError("format", "must be csv or json");
  }
  return written;
}

}  // namespace pcl
