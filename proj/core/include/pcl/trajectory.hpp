#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pcl/rng.hpp"
#include "pcl/state.hpp"
#include "pcl/stopping.hpp"

namespace pcl {

inline constexpr std::uint64_t kDefaultStepCap = 100'000'000;

template <class State>
using Observer = std::function<void(std::uint64_t step, const State& state)>;

template <class State>
struct TrajectoryOptions {
  std::vector<StoppingPolicy> policies;
  // Hard cap on steps; MaxSteps policies tighten it further.
  std::optional<std::uint64_t> max_steps;
  // Observers run at step 0, every `observe_every` steps and at the last step.
  // 0 disables them.
  std::uint64_t observe_every = 0;
  std::vector<Observer<State>> observers;
};

struct TrialRecord {
  StoppingRecord stopping;
  std::uint64_t steps = 0;
};

// The run ends when every policy has fired or the cap is hit; the state is
// left at its final value.
TrialRecord run_scalar_trajectory(RngStream& rng, ScalarState& x, const TrajectoryOptions<ScalarState>& opts);
TrialRecord run_vector_trajectory(RngStream& rng, VectorState& x, const TrajectoryOptions<VectorState>& opts);
TrialRecord run_circle_trajectory(RngStream& rng, AngularState& theta, const TrajectoryOptions<AngularState>& opts);

}  // namespace pcl
