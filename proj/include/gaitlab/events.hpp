#pragma once

#include <functional>

#include "gaitlab/integrator.hpp"

namespace gaitlab {

using GuardFunction = std::function<double(const State& x)>;

struct GuardEvent {
  double time_of_crossing = 0.0;
  State state_at_crossing;
  double guard_value_residual = 0.0;
};

/// Finds the first armed negative-to-positive crossing of `guard` along the
/// flow generated by `propagate`, starting at local time 0.
///
/// The guard is armed once a sample has g < -arming_threshold; states that
/// start on the switching surface therefore do not re-trigger. The bracketing
/// step is refined by bisection on the partial-step length until
/// |g| <= event_tolerance. When `samples` is non-null, the fixed-step samples
/// up to (and including) the crossing are appended to it.
///
/// Throws NotArmed, NoCrossing, NonFiniteState, NoConvergence.
GuardEvent locate_guard_crossing(const Propagator& propagate, const GuardFunction& guard,
                                 const State& x0, const IntegratorConfig& config,
                                 Trajectory* samples = nullptr);

/// Convenience overload integrating `f` with RK4.
GuardEvent locate_guard_crossing(const VectorField& f, const GuardFunction& guard, const State& x0,
                                 const IntegratorConfig& config, Trajectory* samples = nullptr);

}  // namespace gaitlab
