#pragma once

#include <string>

#include "pcl/experiments.hpp"

namespace pcl {

// JSON config text -> validated ExperimentConfig. Errors are ConfigError
// with the offending field name.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Canonical JSON of a fully resolved config (every default filled in).
std::string config_to_json(const ExperimentConfig& cfg);

Model parse_model(const std::string& name);
StopRule parse_stop_rule(const std::string& name);

}  // namespace pcl
