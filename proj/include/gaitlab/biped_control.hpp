#pragma once

#include <Eigen/Core>

#include "gaitlab/biped.hpp"
#include "gaitlab/events.hpp"
#include "gaitlab/integrator.hpp"

namespace gaitlab::biped {

/// Posture outputs y1 = (roll, pitch - theta_p_d, q3 - q_k_d) and foot
/// placement outputs y2 = (x_FH - x_d(phase), y_FH - y0, q6 - q6_d(phase)),
/// stacked as one 6-vector.
struct ControlConfig {
  GaitSpec gait;
  Vector6 kp = Vector6::Constant(1e4);
  Vector6 kd = Vector6::Constant(200.0);
  double q6_clearance = 0.3;
  double phase_split = 0.5;
  double torque_limit = 1000.0;
  /// Kinetic energy (per unit mass) of the matched pendulum used to set the
  /// nominal step duration of the phase variable.
  double nominal_k0 = 0.6;
  double max_condition_number = 1e8;

  void validate(const BipedParams& p) const;
};

/// Duration of a synchronized step of the pendulum with w^2 = g / z0, the
/// same (x0, y0) and kinetic energy nominal_k0.
double nominal_step_duration(const ControlConfig& c, const BipedParams& p);

/// clamp(elapsed / T_nominal, 0, 1).
double phase_variable(double elapsed_time, const ControlConfig& c, const BipedParams& p);

/// Phase-dependent set points and their first two time derivatives.
struct Reference {
  double x_fh = 0.0, x_fh_rate = 0.0, x_fh_accel = 0.0;
  double q6 = 0.0, q6_rate = 0.0, q6_accel = 0.0;
};

/// The swing foot is carried from (-x0, y0), where the leg exchange leaves
/// it on the invariant gait, to (x0, y0) by phase_split with a quintic
/// smoothstep. The knee set point holds q_k_d + clearance over the first
/// half of [0, phase_split], then returns to q_k_d along a cosine (C1).
Reference reference(double phase, double phase_rate, const ControlConfig& c);

struct Outputs {
  Vector6 y = Vector6::Zero();
  Vector6 ydot = Vector6::Zero();
};

Outputs outputs(const BipedState& s, const ControlConfig& c, const BipedParams& p, double phase);

/// Residual of the impact conditions of the invariant gait: the largest
/// of |y|, |ydot| evaluated with the terminal (phase = 1) set points.
double invariance_residual(const BipedState& s, const ControlConfig& c, const BipedParams& p);

/// Joint input-output linearization: solves A u = ydd_cmd - b, with
/// ydd_cmd = yref'' - kp y - kd ydot, then clips to torque_limit. Throws
/// SingularDecoupling when the 1-norm condition number of A exceeds
/// max_condition_number.
Vector6 control_law(const BipedState& s, const ControlConfig& c, const BipedParams& p,
                    double phase);

/// Same law with an explicit phase rate, avoiding the recomputation of the
/// nominal step duration inside integration loops.
Vector6 control_law_at_rate(const BipedState& s, const ControlConfig& c, const BipedParams& p,
                            double phase, double phase_rate);

/// Closed-loop vector field on x = (q, qdot); t is the time since the last
/// impact. Throws StepFailed when the hip drops below min_hip_height or a
/// knee leaves (0, pi).
VectorField closed_loop_field(const ControlConfig& c, const BipedParams& p,
                              StanceLeg stance = StanceLeg::kRight);

struct StepResult {
  double duration = 0.0;
  BipedState pre_impact;
  BipedState post_impact;
  double invariance_residual = 0.0;  // at pre_impact
};

/// Integrates one closed-loop step from a post-impact state to the next
/// swing-foot touchdown and applies the impact map. Failures (fall,
/// no touchdown, singular decoupling) are rethrown as StepFailed.
StepResult closed_loop_step(const BipedState& start, const ControlConfig& c, const BipedParams& p,
                            const IntegratorConfig& config, Trajectory* samples = nullptr);

}  // namespace gaitlab::biped
