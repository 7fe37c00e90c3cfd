#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

namespace gaitlab {

using State = Eigen::VectorXd;

/// Right-hand side x' = f(t, x). `t` is the time since the start of the
/// current continuous phase, which is what phase-based controllers need.
using VectorField = std::function<State(double t, const State& x)>;

/// Advances a state by `dt` from local time `t`. Used for models whose flow is
/// known in closed form; RK4 on a VectorField is the default propagator.
using Propagator = std::function<State(double t, const State& x, double dt)>;

struct IntegratorConfig {
  double step_size = 1e-3;
  double event_tolerance = 1e-10;
  double arming_threshold = 1e-6;
  double max_step_duration = 5.0;

  /// Throws InvalidArgument unless all fields are positive and
  /// event_tolerance < arming_threshold.
  void validate() const;
};

struct Sample {
  double t = 0.0;
  State x;
};

using Trajectory = std::vector<Sample>;

/// One classical fourth-order Runge-Kutta step.
State rk4_step(const VectorField& f, double t, const State& x, double h);

Propagator rk4_propagator(VectorField f);

/// Fixed-step RK4 from t = 0 to `duration`; the last step is shortened so the
/// final sample lands exactly on `duration`. Throws NonFiniteState.
Trajectory integrate_fixed_step(const VectorField& f, const State& x0, double duration,
                                const IntegratorConfig& config);

void require_finite(const State& x, double t);

}  // namespace gaitlab
