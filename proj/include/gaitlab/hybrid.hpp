#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gaitlab/error.hpp"
#include "gaitlab/events.hpp"

namespace gaitlab {

/// Flow, guard and reset of a single-domain hybrid system.
struct HybridModel {
  Propagator propagate;
  GuardFunction guard;
  std::function<State(const State& pre_impact)> reset;
};

struct ImpactRecord {
  double time = 0.0;  // absolute time of the crossing
  State pre_impact;
  State post_impact;
};

struct TraceFailure {
  ErrorCode code;
  std::string message;
  int step = 0;  // 1-based index of the step that failed
};

struct HybridTrace {
  /// One sample list per continuous phase, absolute times.
  std::vector<Trajectory> phases;
  std::vector<ImpactRecord> events;
  std::optional<TraceFailure> failure;

  bool ok() const { return !failure.has_value(); }
};

/// Alternates guard location and reset `n_steps` times. The first error stops
/// the run and is recorded in the trace instead of being thrown.
HybridTrace run_hybrid(const HybridModel& model, const State& initial_state, int n_steps,
                       const IntegratorConfig& config);

}  // namespace gaitlab
