#include "pcl/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pcl/errors.hpp"
#include "pcl/persist.hpp"

namespace pcl {

using nlohmann::json;

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{"model",    "N",          "epsilon", "D",           "domain",
                                          "trials",   "master_seed", "stopping", "max_steps",  "initial",
                                          "observables", "output",   "workers",  "$comment"};
  return keys;
}

template <class T>
T get_as(const json& j, const char* field) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(field, "has the wrong type");
  }
}

std::uint64_t get_count(const json& j, const char* field) {
  // The parser stores every non-negative integer literal as unsigned.
  if (!j.is_number_unsigned()) throw ConfigError(field, "must be a non-negative integer");
  return j.get<std::uint64_t>();
}

}  // namespace

Model parse_model(const std::string& name) {
  if (name == "scalar") return Model::scalar;
  if (name == "box") return Model::box;
  if (name == "circle") return Model::circle;
  throw ConfigError("model", "unknown model '" + name + "' (scalar, box, circle)");
}

StopRule parse_stop_rule(const std::string& name) {
  if (name == "paper") return StopRule::paper;
  if (name == "exact-range") return StopRule::exact_range;
  if (name == "lyapunov-theoretical") return StopRule::lyapunov_theoretical;
  throw ConfigError("stopping", "unknown rule '" + name + "' (paper, exact-range, lyapunov-theoretical)");
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known_keys().count(key)) throw ConfigError(key, "unknown field");

  ExperimentConfig c;
  if (!j.contains("model")) throw ConfigError("model", "required field is missing");
  c.model = parse_model(get_as<std::string>(j["model"], "model"));

  if (!j.contains("N")) throw ConfigError("N", "required field is missing");
  if (j["N"].is_array()) {
    for (const auto& v : j["N"]) c.n_grid.push_back(get_count(v, "N"));
  } else {
    c.n_grid.push_back(get_count(j["N"], "N"));
  }

  if (!j.contains("epsilon")) throw ConfigError("epsilon", "required field is missing");
  if (j["epsilon"].is_array()) {
    for (const auto& v : j["epsilon"]) c.eps_grid.push_back(get_as<double>(v, "epsilon"));
  } else {
    c.eps_grid.push_back(get_as<double>(j["epsilon"], "epsilon"));
  }

  if (j.contains("D")) c.dim = get_count(j["D"], "D");
  else if (c.model == Model::box) throw ConfigError("D", "required for the box model");

  if (j.contains("domain")) {
    const auto& d = j["domain"];
    if (!d.is_array() || d.size() != 2) throw ConfigError("domain", "must be [a, b]");
    c.a = get_as<double>(d[0], "domain");
    c.b = get_as<double>(d[1], "domain");
  }
  if (j.contains("trials")) c.trials = get_count(j["trials"], "trials");
  if (j.contains("master_seed")) {
    c.master_seed = get_count(j["master_seed"], "master_seed");
    c.master_seed_given = true;
  }
  if (j.contains("stopping")) c.stopping = parse_stop_rule(get_as<std::string>(j["stopping"], "stopping"));
  if (j.contains("max_steps") && !j["max_steps"].is_null()) c.max_steps = get_count(j["max_steps"], "max_steps");
  if (j.contains("initial") && !j["initial"].is_null()) {
    std::vector<double> init;
    const auto& v = j["initial"];
    if (!v.is_array()) throw ConfigError("initial", "must be an array");
    for (const auto& e : v) {
      if (e.is_array()) {
        for (const auto& x : e) init.push_back(get_as<double>(x, "initial"));
      } else {
        init.push_back(get_as<double>(e, "initial"));
      }
    }
    c.initial = std::move(init);
  }
  if (j.contains("observables")) {
    const auto& o = j["observables"];
    if (!o.is_object()) throw ConfigError("observables", "must be an object");
    for (const auto& [key, value] : o.items())
      if (key != "cadence" && key != "trials") throw ConfigError("observables." + key, "unknown field");
    if (o.contains("cadence")) c.trace_every = get_count(o["cadence"], "observables.cadence");
    if (o.contains("trials")) c.trace_trials = get_count(o["trials"], "observables.trials");
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    if (!o.is_object()) throw ConfigError("output", "must be an object");
    for (const auto& [key, value] : o.items())
      if (key != "path" && key != "format") throw ConfigError("output." + key, "unknown field");
    if (o.contains("path")) c.output_path = get_as<std::string>(o["path"], "output.path");
    if (o.contains("format")) c.format = get_as<std::string>(o["format"], "output.format");
  }
  if (j.contains("workers")) c.workers = get_count(j["workers"], "workers");

  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["$comment"] = header_comment(c.master_seed).substr(2);
  j["model"] = model_name(c.model);
  j["N"] = c.n_grid;
  j["epsilon"] = c.eps_grid;
  j["D"] = c.dim;
  j["domain"] = {c.a, c.b};
  j["trials"] = c.trials;
  j["master_seed"] = c.master_seed;
  j["stopping"] = stop_rule_name(c.stopping);
  j["max_steps"] = c.max_steps ? json(*c.max_steps) : json(nullptr);
  j["initial"] = c.initial ? json(*c.initial) : json(nullptr);
  j["observables"] = {{"cadence", c.trace_every}, {"trials", c.trace_trials}};
  j["output"] = {{"path", c.output_path}, {"format", c.format}};
  j["workers"] = c.workers;
  return j.dump(2);
}

}  // namespace pcl
