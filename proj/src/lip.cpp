#include "gaitlab/lip.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gaitlab/error.hpp"

namespace gaitlab::lip {

double LipParams::omega() const { return std::sqrt(g / z0); }

double LipParams::r0() const { return std::sqrt(r0_squared()); }

void LipParams::validate() const {
  const bool ok = std::isfinite(g) && std::isfinite(z0) && std::isfinite(x0) && std::isfinite(y0) &&
                  g > 0.0 && z0 > 0.0 && x0 > 0.0 && y0 > 0.0;
  if (!ok) throw Error(ErrorCode::kInvalidArgument, "LIP parameters must be positive and finite");
}

LipParams with_omega(double omega, double x0, double y0) {
  return LipParams{omega * omega, 1.0, x0, y0};
}

LipState LipState::from_vector(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return {v(0), v(1), v(2), v(3)};
}

LipState flow(const LipState& s, const LipParams& p, double t) {
  const double w = p.omega();
  const double c = std::cosh(w * t);
  const double sh = std::sinh(w * t);
  return {s.x * c + s.xdot / w * sh, s.y * c + s.ydot / w * sh, s.x * w * sh + s.xdot * c,
          s.y * w * sh + s.ydot * c};
}

OrbitalEnergies orbital_energies(const LipState& s, const LipParams& p) {
  const double w2 = p.omega_squared();
  return {s.xdot * s.xdot - w2 * s.x * s.x, s.ydot * s.ydot - w2 * s.y * s.y};
}

double cross_invariant(const LipState& s, const LipParams& p) {
  return s.xdot * s.ydot - p.omega_squared() * s.x * s.y;
}

double sync_measure(const LipState& step_start, const LipParams& p) {
  return step_start.xdot * step_start.ydot + p.omega_squared() * p.x0 * p.y0;
}

double kinetic_energy(const LipState& s) { return 0.5 * (s.xdot * s.xdot + s.ydot * s.ydot); }

double guard(const LipState& s, const LipParams& p) {
  return s.x * s.x + s.y * s.y - p.r0_squared();
}

LipState reset(const LipState& pre_impact, const LipParams& p, double tolerance) {
  const double g = guard(pre_impact, p);
  if (!(std::abs(g) <= tolerance)) {
    std::ostringstream os;
    os << "pre-impact state is off the switching circle by " << g;
    throw Error(ErrorCode::kNotOnGuard, os.str());
  }
  return {-p.x0, p.y0, pre_impact.xdot, -pre_impact.ydot};
}

LipStepResult step(const LipState& start, const LipParams& p, const IntegratorConfig& config) {
  p.validate();
  const Propagator prop = [&p](double, const State& x, double dt) -> State {
    return flow(LipState::from_vector(x), p, dt).to_vector();
  };
  const GuardFunction g = [&p](const State& x) { return guard(LipState::from_vector(x), p); };
  const GuardEvent ev = locate_guard_crossing(prop, g, start.to_vector(), config);
  const LipState pre = LipState::from_vector(ev.state_at_crossing);
  if (!(pre.x > 0.0)) {
    std::ostringstream os;
    os << "mass fell back: switching circle reached at x = " << pre.x;
    throw Error(ErrorCode::kNoCrossing, os.str());
  }
  return {ev.time_of_crossing, pre, reset(pre, p, config.event_tolerance)};
}

LipState synchronized_start(const LipParams& p, double k0) {
  p.validate();
  const double c = p.omega_squared() * p.x0 * p.y0;
  if (!(k0 > c)) {
    std::ostringstream os;
    os << "kinetic energy " << k0 << " must exceed w^2 x0 y0 = " << c;
    throw Error(ErrorCode::kInfeasibleEnergy, os.str());
  }
  const double xdot = std::sqrt(k0 + std::sqrt(k0 * k0 - c * c));
  return {-p.x0, p.y0, xdot, -c / xdot};
}

SwitchCoords to_switch_coords(const LipState& s) {
  if (std::abs(s.y) < 1e-9) {
    throw Error(ErrorCode::kDegenerateY, "alpha is undefined for y = 0");
  }
  return {std::atan(s.x / s.y), s.xdot * s.ydot, std::hypot(s.xdot, s.ydot), std::hypot(s.x, s.y)};
}

LipState from_switch_coords(const SwitchCoords& c, ChartBranch branch) {
  const double half_v2 = 0.5 * c.v * c.v;
  if (!(c.v >= 0.0) || !(std::abs(c.gamma) <= half_v2 * (1.0 + 1e-12))) {
    std::ostringstream os;
    os << "|gamma| = " << std::abs(c.gamma) << " exceeds v^2/2 = " << half_v2;
    throw Error(ErrorCode::kInconsistentCoords, os.str());
  }
  // (xdot + ydot)^2 = v^2 + 2 gamma, (xdot - ydot)^2 = v^2 - 2 gamma.
  const double a = std::sqrt(std::max(0.0, c.v * c.v + 2.0 * c.gamma));
  const double b = std::sqrt(std::max(0.0, c.v * c.v - 2.0 * c.gamma));
  double xdot = 0.0;
  double ydot = 0.0;
  if (branch.sagittal_dominant) {
    xdot = 0.5 * (a + b);
    ydot = 0.5 * (a - b);
  } else {
    xdot = 0.5 * std::abs(a - b);
    ydot = (c.gamma < 0.0 ? -0.5 : 0.5) * (a + b);
  }
  if (!branch.xdot_positive) {
    xdot = -xdot;
    ydot = -ydot;
  }
  return {c.r * std::sin(c.alpha), c.r * std::cos(c.alpha), xdot, ydot};
}

HybridModel make_hybrid_model(const LipParams& p, double reset_tolerance) {
  p.validate();
  HybridModel m;
  m.propagate = [p](double, const State& x, double dt) -> State {
    return flow(LipState::from_vector(x), p, dt).to_vector();
  };
  m.guard = [p](const State& x) { return guard(LipState::from_vector(x), p); };
  m.reset = [p, reset_tolerance](const State& x) -> State {
    const LipState pre = LipState::from_vector(x);
    if (!(pre.x > 0.0)) {
      std::ostringstream os;
      os << "mass fell back: switching circle reached at x = " << pre.x;
      throw Error(ErrorCode::kNoCrossing, os.str());
    }
    return reset(pre, p, reset_tolerance).to_vector();
  };
  return m;
}

}  // namespace gaitlab::lip
