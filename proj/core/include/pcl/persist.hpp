#pragma once

#include <string>
#include <vector>

#include "pcl/experiments.hpp"

namespace pcl {

inline constexpr const char* kTrialsCsvHeader =
    "model,N,D,epsilon,trial,seed,t_eps,t_eps_prime,t_hd,steps_cap_hit,final_range,final_lyapunov,final_mean";
inline constexpr const char* kAggregateCsvHeader =
    "model,N,D,epsilon,trials,t_hat_mean,t_hat_std,t_hat_stderr,thd_hat_mean,thd_hat_std,bound_exact,"
    "bound_simplified";
inline constexpr const char* kTraceCsvHeader =
    "model,N,D,epsilon,trial,step,lyapunov,range,mean,vector_sum_x,vector_sum_y,gamma_max";

// 17 significant digits; enough to round-trip any double.
std::string format_double(double v);

// "# pcl <version> master_seed=<seed>"
std::string header_comment(std::uint64_t master_seed);

std::string trials_csv(const ResultTable& t);
std::string aggregates_csv(const ResultTable& t);
std::string traces_csv(const ResultTable& t);
std::string table_json(const ResultTable& t);

// Parsers accept the files produced above; comment lines start with '#'.
// Malformed input throws ConfigError.
std::vector<TrialRow> parse_trials_csv(const std::string& text);
std::vector<AggregateRow> parse_aggregates_csv(const std::string& text);
ResultTable parse_table_json(const std::string& text);

std::string read_file(const std::string& path);
// Writes to a sibling temp file and renames over the target.
void write_atomic(const std::string& path, const std::string& content);

// Writes the result files for `format` ("csv" or "json") into `dir`.
// Returns the paths written.
std::vector<std::string> persist(const ResultTable& t, const std::string& dir, const std::string& format);

}  // namespace pcl
