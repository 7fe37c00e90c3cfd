#include "gaitlab/integrator.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "gaitlab/error.hpp"

namespace gaitlab {

void IntegratorConfig::validate() const {
  if (!(step_size > 0.0) || !(event_tolerance > 0.0) || !(arming_threshold > 0.0) ||
      !(max_step_duration > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "integrator settings must be strictly positive");
  }
  if (!(event_tolerance < arming_threshold)) {
    throw Error(ErrorCode::kInvalidArgument, "event_tolerance must be below arming_threshold");
  }
}

void require_finite(const State& x, double t) {
  if (!x.allFinite()) {
    std::ostringstream os;
    os << "state became non-finite at t = " << t;
    throw Error(ErrorCode::kNonFiniteState, os.str());
  }
}

State rk4_step(const VectorField& f, double t, const State& x, double h) {
  const State k1 = f(t, x);
  const State k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
  const State k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
  const State k4 = f(t + h, x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Propagator rk4_propagator(VectorField f) {
  return [f = std::move(f)](double t, const State& x, double dt) { return rk4_step(f, t, x, dt); };
}

Trajectory integrate_fixed_step(const VectorField& f, const State& x0, double duration,
                                const IntegratorConfig& config) {
  config.validate();
  if (!(duration >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "duration must be non-negative");
  }
  require_finite(x0, 0.0);
  Trajectory out;
  out.push_back({0.0, x0});
  const double h = config.step_size;
  const auto full_steps = static_cast<long>(std::floor(duration / h));
  State x = x0;
  for (long k = 0; k < full_steps; ++k) {
    const double t = static_cast<double>(k) * h;
    x = rk4_step(f, t, x, h);
    require_finite(x, t + h);
    out.push_back({static_cast<double>(k + 1) * h, x});
  }
  const double t_last = static_cast<double>(full_steps) * h;
  const double rest = duration - t_last;
  // Skip remainders at roundoff level; the final time is still pinned below.
  if (rest > 1e-12 * h) {
    x = rk4_step(f, t_last, x, rest);
    require_finite(x, duration);
    out.push_back({duration, x});
  } else {
    out.back().t = duration;
  }
  return out;
}

}  // namespace gaitlab
