#include "gaitlab/biped_control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gaitlab/error.hpp"
#include "gaitlab/linalg.hpp"
#include "gaitlab/lip.hpp"

namespace gaitlab::biped {
namespace {

using Matrix6x9 = Eigen::Matrix<double, 6, 9>;

// Quintic smoothstep on [0, 1] and its first two derivatives.
void smoothstep(double u, double& s, double& ds, double& dds) {
  if (u <= 0.0) {
    s = ds = dds = 0.0;
    return;
  }
  if (u >= 1.0) {
    s = 1.0;
    ds = dds = 0.0;
    return;
  }
  const double u2 = u * u;
  s = u2 * u * (10.0 - 15.0 * u + 6.0 * u2);
  ds = 30.0 * u2 * (1.0 - u) * (1.0 - u);
  dds = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
}

struct OutputMaps {
  Vector6 value;
  Matrix6x9 jacobian;
  Vector6 jdot_qdot;
};

OutputMaps raw_outputs(const BipedState& s, const BipedParams& p) {
  const PlacementKinematics pk = placement_kinematics(s.q, s.qdot, p);
  OutputMaps o;
  o.value << s.q(idx::kRoll), s.q(idx::kPitch), s.q(idx::kStanceKnee), pk.position(0),
      pk.position(1), s.q(idx::kSwingKnee);
  o.jacobian.setZero();
  o.jacobian(0, idx::kRoll) = 1.0;
  o.jacobian(1, idx::kPitch) = 1.0;
  o.jacobian(2, idx::kStanceKnee) = 1.0;
  o.jacobian.row(3) = pk.jacobian.row(0);
  o.jacobian.row(4) = pk.jacobian.row(1);
  o.jacobian(5, idx::kSwingKnee) = 1.0;
  o.jdot_qdot.setZero();
  o.jdot_qdot(3) = pk.jdot_qdot(0);
  o.jdot_qdot(4) = pk.jdot_qdot(1);
  return o;
}

struct Targets {
  Vector6 value;
  Vector6 rate;
  Vector6 accel;
};

Targets targets(const ControlConfig& c, double phase, double phase_rate) {
  const Reference r = reference(phase, phase_rate, c);
  Targets t;
  t.value << 0.0, c.gait.theta_p_d, c.gait.q_k_d, r.x_fh, c.gait.y0, r.q6;
  t.rate << 0.0, 0.0, 0.0, r.x_fh_rate, 0.0, r.q6_rate;
  t.accel << 0.0, 0.0, 0.0, r.x_fh_accel, 0.0, r.q6_accel;
  return t;
}

double phase_rate(double phase, const ControlConfig& c, const BipedParams& p) {
  return phase < 1.0 ? 1.0 / nominal_step_duration(c, p) : 0.0;
}

struct ClosedLoop {
  Vector6 u;
  Vector9 qddot;
};

ClosedLoop closed_loop(const BipedState& s, const ControlConfig& c, const BipedParams& p,
                       double phase, double rate) {
  const OutputMaps o = raw_outputs(s, p);
  const Targets t = targets(c, phase, rate);
  const Vector6 y = o.value - t.value;
  const Vector6 ydot = o.jacobian * s.qdot - t.rate;

  const DynamicsTerms dt = dynamics_terms(s.q, s.qdot, p);
  Eigen::Matrix<double, 9, 7> rhs = Eigen::Matrix<double, 9, 7>::Zero();
  rhs.block<6, 6>(3, 0).setIdentity();
  rhs.col(6) = dt.h;
  const Eigen::MatrixXd sol = solve_dense_multi(dt.D, rhs);  // [D^-1 B, D^-1 H]
  const Eigen::Matrix<double, 6, 6> a = o.jacobian * sol.leftCols<6>();
  const Vector6 drift = o.jdot_qdot - o.jacobian * sol.col(6);

  const double cond = condition_number_1(a);
  if (!(cond <= c.max_condition_number)) {
    std::ostringstream os;
    os << "decoupling matrix condition number " << cond;
    throw Error(ErrorCode::kSingularDecoupling, os.str());
  }
  const Vector6 command = t.accel - c.kp.cwiseProduct(y) - c.kd.cwiseProduct(ydot) - drift;
  ClosedLoop out;
  out.u = solve_dense(a, command);
  for (int i = 0; i < 6; ++i) out.u(i) = std::clamp(out.u(i), -c.torque_limit, c.torque_limit);
  out.qddot = sol.leftCols<6>() * out.u - sol.col(6);
  return out;
}

}  // namespace

void ControlConfig::validate(const BipedParams& p) const {
  gait.validate(p);
  if (!((kp.array() > 0.0).all() && (kd.array() > 0.0).all())) {
    throw Error(ErrorCode::kInvalidArgument, "controller gains must be positive");
  }
  if (!(phase_split > 0.0 && phase_split < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "phase_split must lie in (0, 1)");
  }
  if (!(torque_limit > 0.0) || !(max_condition_number > 1.0) || !(q6_clearance >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "torque_limit, max_condition_number and q6_clearance are out of range");
  }
  const double w2 = p.g / gait.z0(p);
  if (!(nominal_k0 > w2 * gait.x0 * gait.y0)) {
    std::ostringstream os;
    os << "nominal_k0 must exceed w^2 x0 y0 = " << w2 * gait.x0 * gait.y0;
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
}

double nominal_step_duration(const ControlConfig& c, const BipedParams& p) {
  const lip::LipParams lp{p.g, c.gait.z0(p), c.gait.x0, c.gait.y0};
  const lip::LipState start = lip::synchronized_start(lp, c.nominal_k0);
  return lip::step(start, lp, IntegratorConfig{}).duration;
}

double phase_variable(double elapsed_time, const ControlConfig& c, const BipedParams& p) {
  return std::clamp(elapsed_time / nominal_step_duration(c, p), 0.0, 1.0);
}

Reference reference(double phase, double phase_rate, const ControlConfig& c) {
  Reference r;
  const double split = c.phase_split;
  double s = 0.0;
  double ds = 0.0;
  double dds = 0.0;
  smoothstep(phase / split, s, ds, dds);
  const double span = 2.0 * c.gait.x0;
  const double du = phase_rate / split;
  r.x_fh = -c.gait.x0 + span * s;
  r.x_fh_rate = span * ds * du;
  r.x_fh_accel = span * dds * du * du;

  r.q6 = c.gait.q_k_d;
  const double half = 0.5 * split;
  if (phase < half) {
    r.q6 += c.q6_clearance;
  } else if (phase < split) {
    const double arg = std::numbers::pi * (phase - half) / half;
    const double dv = phase_rate * std::numbers::pi / half;
    r.q6 += 0.5 * c.q6_clearance * (1.0 + std::cos(arg));
    r.q6_rate = -0.5 * c.q6_clearance * std::sin(arg) * dv;
    r.q6_accel = -0.5 * c.q6_clearance * std::cos(arg) * dv * dv;
  }
  return r;
}

Outputs outputs(const BipedState& s, const ControlConfig& c, const BipedParams& p, double phase) {
  const OutputMaps o = raw_outputs(s, p);
  const Targets t = targets(c, phase, phase_rate(phase, c, p));
  return {o.value - t.value, o.jacobian * s.qdot - t.rate};
}

double invariance_residual(const BipedState& s, const ControlConfig& c, const BipedParams& p) {
  const Outputs o = outputs(s, c, p, 1.0);
  return std::max(o.y.cwiseAbs().maxCoeff(), o.ydot.cwiseAbs().maxCoeff());
}

Vector6 control_law(const BipedState& s, const ControlConfig& c, const BipedParams& p,
                    double phase) {
  return control_law_at_rate(s, c, p, phase, phase_rate(phase, c, p));
}

Vector6 control_law_at_rate(const BipedState& s, const ControlConfig& c, const BipedParams& p,
                            double phase, double rate) {
  return closed_loop(s, c, p, phase, rate).u;
}

VectorField closed_loop_field(const ControlConfig& c, const BipedParams& p, StanceLeg stance) {
  const double period = nominal_step_duration(c, p);
  return [c, p, stance, period](double t, const State& x) -> State {
    const BipedState s{x.head<9>(), x.tail<9>(), stance};
    const double knee_st = s.q(idx::kStanceKnee);
    const double knee_sw = s.q(idx::kSwingKnee);
    if (!(knee_st > 0.0 && knee_st < std::numbers::pi && knee_sw > 0.0 &&
          knee_sw < std::numbers::pi)) {
      throw Error(ErrorCode::kStepFailed, "knee angle left (0, pi)");
    }
    if (!(forward_kinematics(s.q, p).hip.z() >= p.min_hip_height)) {
      throw Error(ErrorCode::kStepFailed, "hip dropped below the fall threshold");
    }
    const double phase = std::clamp(t / period, 0.0, 1.0);
    const ClosedLoop cl = closed_loop(s, c, p, phase, phase < 1.0 ? 1.0 / period : 0.0);
    State dx(18);
    dx.head<9>() = s.qdot;
    dx.tail<9>() = cl.qddot;
    return dx;
  };
}

StepResult closed_loop_step(const BipedState& start, const ControlConfig& c, const BipedParams& p,
                            const IntegratorConfig& config, Trajectory* samples) {
  State x0(18);
  x0 << start.q, start.qdot;
  const VectorField f = closed_loop_field(c, p, start.stance_leg);
  const GuardFunction g = [&p](const State& x) { return -swing_foot_height(x.head<9>(), p); };
  GuardEvent ev;
  try {
    ev = locate_guard_crossing(f, g, x0, config, samples);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kStepFailed) throw;
    throw Error(ErrorCode::kStepFailed, e.what());
  }
  StepResult r;
  r.duration = ev.time_of_crossing;
  r.pre_impact = {ev.state_at_crossing.head<9>(), ev.state_at_crossing.tail<9>(), start.stance_leg};
  r.invariance_residual = invariance_residual(r.pre_impact, c, p);
  try {
    r.post_impact = impact_map(r.pre_impact, p, std::max(1e-8, 10.0 * config.event_tolerance));
  } catch (const Error& e) {
    throw Error(ErrorCode::kStepFailed, e.what());
  }
  return r;
}

}  // namespace gaitlab::biped
