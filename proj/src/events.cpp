#include "gaitlab/events.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <sstream>

#include "gaitlab/error.hpp"

namespace gaitlab {
namespace {

constexpr int kMaxBisections = 200;

GuardEvent bisect(const Propagator& propagate, const GuardFunction& guard, double t_lo,
                  const State& x_lo, double h, const IntegratorConfig& config) {
  // Invariant: g(flow(x_lo, a)) < 0 <= g(flow(x_lo, b)). The bracket is shrunk
  // to roundoff rather than stopped at event_tolerance, so the located state is
  // a smooth function of the initial condition (finite-difference Jacobians of
  // return maps depend on it).
  double a = 0.0;
  double b = h;
  State x_b = propagate(t_lo, x_lo, b);
  double g_b = guard(x_b);
  for (int it = 0; it < kMaxBisections && g_b != 0.0; ++it) {
    const double mid = 0.5 * (a + b);
    if (!(mid > a && mid < b)) break;
    State x_mid = propagate(t_lo, x_lo, mid);
    require_finite(x_mid, t_lo + mid);
    const double g_mid = guard(x_mid);
    if (g_mid < 0.0) {
      a = mid;
    } else {
      b = mid;
      x_b = std::move(x_mid);
      g_b = g_mid;
    }
  }
  if (std::abs(g_b) > config.event_tolerance) {
    std::ostringstream os;
    os << "bisection stalled with |g| = " << std::abs(g_b);
    throw Error(ErrorCode::kNoConvergence, os.str());
  }
  return {t_lo + b, std::move(x_b), g_b};
}

}  // namespace

GuardEvent locate_guard_crossing(const Propagator& propagate, const GuardFunction& guard,
                                 const State& x0, const IntegratorConfig& config,
                                 Trajectory* samples) {
  config.validate();
  require_finite(x0, 0.0);
  const double h = config.step_size;
  double t = 0.0;
  State x = x0;
  double g = guard(x);
  bool armed = g < -config.arming_threshold;
  if (samples) samples->push_back({t, x});
  while (t < config.max_step_duration) {
    const double dt = std::min(h, config.max_step_duration - t);
    State next = propagate(t, x, dt);
    require_finite(next, t + dt);
    const double g_next = guard(next);
    if (armed && g < 0.0 && g_next >= 0.0) {
      GuardEvent ev = bisect(propagate, guard, t, x, dt, config);
      if (samples) samples->push_back({ev.time_of_crossing, ev.state_at_crossing});
      return ev;
    }
    t += dt;
    x = std::move(next);
    g = g_next;
    if (g < -config.arming_threshold) armed = true;
    if (samples) samples->push_back({t, x});
  }
  std::ostringstream os;
  os << "no crossing within " << config.max_step_duration << " s";
  throw Error(armed ? ErrorCode::kNoCrossing : ErrorCode::kNotArmed, os.str());
}

GuardEvent locate_guard_crossing(const VectorField& f, const GuardFunction& guard, const State& x0,
                                 const IntegratorConfig& config, Trajectory* samples) {
  return locate_guard_crossing(rk4_propagator(f), guard, x0, config, samples);
}

}  // namespace gaitlab
