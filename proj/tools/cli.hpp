#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pcl::cli {

enum ExitCode : int { ok = 0, property_failure = 1, usage_error = 2, io_error = 3 };

// Runs one invocation. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pcl::cli
