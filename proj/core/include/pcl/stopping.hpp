#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pcl/observables.hpp"
#include "pcl/state.hpp"

namespace pcl {

struct RangeThreshold {
  double eps;
};
struct LyapunovThreshold {
  double tau;
};
// per_dimension: every L_d <= tau. Otherwise L_T <= tau.
struct VectorLyapunovThreshold {
  double tau;
  bool per_dimension = true;
};
struct HalfDisk {};
struct CircleArc {
  double eps;
};
struct MaxSteps {
  std::uint64_t cap;
};

using StoppingPolicy =
    std::variant<RangeThreshold, LyapunovThreshold, VectorLyapunovThreshold, HalfDisk, CircleArc, MaxSteps>;

std::string describe(const StoppingPolicy& p);

// Throws InvalidArgument on bad parameters and ConfigError when the policy
// does not apply to the model.
void validate(const StoppingPolicy& p, Model model);

// Throws ConfigError when the frame lacks what the policy reads.
bool check(const StoppingPolicy& p, const ObservableFrame& frame);

struct StoppingRecord {
  std::vector<std::optional<std::uint64_t>> first_hit;  // one slot per policy
  bool cap_exhausted = false;

  bool all_fired() const;
};

}  // namespace pcl
