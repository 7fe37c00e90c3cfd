#include "gaitlab/biped_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gaitlab/error.hpp"
#include "gaitlab/jacobian.hpp"
#include "gaitlab/lip.hpp"

namespace gaitlab::biped {
namespace {

struct LegAngles {
  double roll = 0.0;   // b such that Rx(b) * target has y = side * W/2
  double pitch = 0.0;  // hip pitch
};

// Inverse kinematics of one leg in the torso frame: find the roll b and hip
// pitch so that Rx(b) * target = (0, side W/2, 0) + Ry(pitch) * l(knee).
LegAngles solve_leg(const Eigen::Vector3d& target, double side, double knee, const BipedParams& p) {
  const double rho = std::hypot(target.y(), target.z());
  const double half_w = 0.5 * p.W;
  if (!(rho > half_w)) {
    throw Error(ErrorCode::kLiftInfeasible, "foot target lies inside the hip offset");
  }
  const double beta = std::atan2(target.z(), target.y());
  // cos(b + beta) = side W / (2 rho), with the leg pointing down.
  const double b = -std::acos(side * half_w / rho) - beta;
  const double z_leg = -std::sqrt(rho * rho - half_w * half_w);
  const double lx = -p.L1 * std::sin(knee);
  const double lz = -p.L2 - p.L1 * std::cos(knee);
  return {b, std::atan2(target.x(), z_leg) - std::atan2(lx, lz)};
}

Eigen::Matrix3d rot_y(double a) {
  Eigen::Matrix3d r;
  r << std::cos(a), 0.0, std::sin(a), 0.0, 1.0, 0.0, -std::sin(a), 0.0, std::cos(a);
  return r;
}

double norm_inf(const Reduced& x) { return x.cwiseAbs().maxCoeff(); }

}  // namespace

Reduced reduced_coords(const BipedState& s, const BipedParams& p) {
  const QuasiState qs = to_quasi(s, p);
  return {qs.alpha(), qs.gamma(), qs.yaw_rate(), qs.v()};
}

BipedState lift_to_full_state(const Reduced& xr, const GaitSpec& gait, const BipedParams& p,
                              double yaw) {
  const double alpha = xr(0);
  const double gamma = xr(1);
  const double yaw_rate = xr(2);
  const double v = xr(3);
  if (!xr.allFinite() || !(v > 0.0)) {
    throw Error(ErrorCode::kLiftInfeasible, "the lift needs a positive horizontal speed");
  }
  if (!(std::abs(alpha) < 0.5 * std::numbers::pi)) {
    throw Error(ErrorCode::kLiftInfeasible, "alpha must lie in (-pi/2, pi/2)");
  }
  // Throws InconsistentCoords for |gamma| > v^2/2.
  const lip::LipState planar =
      lip::from_switch_coords({alpha, gamma, v, 1.0}, lip::kPreImpactBranch);

  gait.validate(p);
  const double z0 = gait.z0(p);
  const double r0 = gait.r0();
  const Eigen::Vector3d hip{r0 * std::sin(alpha), r0 * std::cos(alpha), z0};
  const Eigen::Matrix3d tilt_t = rot_y(gait.theta_p_d).transpose();

  BipedState s;
  s.q.setZero();
  s.q(idx::kYaw) = yaw;
  s.q(idx::kPitch) = gait.theta_p_d;
  s.q(idx::kStanceKnee) = gait.q_k_d;
  s.q(idx::kSwingKnee) = gait.q_k_d;

  const LegAngles st = solve_leg(-(tilt_t * hip), -1.0, gait.q_k_d, p);
  s.q(idx::kStanceHipRoll) = st.roll;  // stance chain applies Rx(-q2)
  s.q(idx::kStanceHipPitch) = st.pitch;
  const LegAngles sw = solve_leg(tilt_t * Eigen::Vector3d{gait.x0, gait.y0, -z0}, 1.0, gait.q_k_d, p);
  s.q(idx::kSwingHipRoll) = -sw.roll;  // swing chain applies Rx(+q5)
  s.q(idx::kSwingHipPitch) = sw.pitch;

  const double vx = planar.xdot;
  const double vy = planar.ydot;
  const double vz = -(hip.x() * vx + hip.y() * vy) / z0;
  Vector9 zeta;
  zeta << yaw_rate, 0.0, 0.0, vx, vy, vz, 0.0, 0.0, 0.0;
  try {
    s.qdot = solve_dense(quasi_velocity_matrix(s.q, p), zeta);
  } catch (const Error& e) {
    throw Error(ErrorCode::kLiftInfeasible, e.what());
  }
  return s;
}

MapEvaluation evaluate_restricted_poincare(const Reduced& xr, const ControlConfig& c,
                                           const BipedParams& p, const IntegratorConfig& config,
                                           double yaw) {
  const BipedState pre = lift_to_full_state(xr, c.gait, p, yaw);
  BipedState post;
  try {
    post = impact_map(pre, p, 1e-9);
  } catch (const Error& e) {
    throw Error(ErrorCode::kStepFailed, e.what());
  }
  const StepResult step = closed_loop_step(post, c, p, config);
  MapEvaluation out;
  try {
    out.next = reduced_coords(step.pre_impact, p);
  } catch (const Error& e) {
    throw Error(ErrorCode::kStepFailed, e.what());
  }
  out.invariance_residual = step.invariance_residual;
  out.step_duration = step.duration;
  out.pre_impact = step.pre_impact;
  return out;
}

Reduced restricted_poincare(const Reduced& xr, const ControlConfig& c, const BipedParams& p,
                            const IntegratorConfig& config) {
  return evaluate_restricted_poincare(xr, c, p, config).next;
}

Reduced lip_seed(const ControlConfig& c, const BipedParams& p) {
  const double w2 = p.g / c.gait.z0(p);
  return {std::atan(c.gait.x0 / c.gait.y0), w2 * c.gait.x0 * c.gait.y0, 0.0,
          std::sqrt(2.0 * c.nominal_k0)};
}

FixedPointResult find_fixed_point(const Reduced& initial_guess, const ControlConfig& c,
                                  const BipedParams& p, const IntegratorConfig& config,
                                  const FixedPointOptions& options) {
  const auto map = [&](const Reduced& x) { return restricted_poincare(x, c, p, config); };
  const VectorMap vmap = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return map(Reduced(x));
  };

  FixedPointResult res;
  Reduced x = initial_guess;
  for (int k = 0; k < options.warmup_iterations; ++k) x = map(x);
  Reduced fx = map(x);
  Reduced f = fx - x;
  for (int it = 0; it <= options.max_iterations; ++it) {
    const double r = f.norm();
    res.residual_history.push_back(r);
    res.point = x;
    res.residual = r;
    res.iterations = it;
    if (r <= options.tolerance) return res;
    if (it == options.max_iterations) break;

    bool accepted = false;
    try {
      const Eigen::Matrix4d jac =
          numeric_jacobian(vmap, x, options.fd_step, options.execution) - Eigen::Matrix4d::Identity();
      Reduced dx = solve_dense(jac, -f);
      const double len = norm_inf(dx);
      if (len > options.max_step) dx *= options.max_step / len;
      double t = 1.0;
      for (int k = 0; k < 6 && !accepted; ++k, t *= 0.5) {
        try {
          const Reduced xn = x + t * dx;
          const Reduced fxn = map(xn);
          const Reduced fn = fxn - xn;
          if (fn.norm() < r) {
            x = xn;
            fx = fxn;
            f = fn;
            accepted = true;
          }
        } catch (const Error&) {
          // Trial point outside the domain of the map: shorten the step.
        }
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSingularMatrix && e.code() != ErrorCode::kStepFailed) throw;
    }
    if (!accepted) {
      // Plain iteration from the current point.
      x = fx;
      fx = map(x);
      f = fx - x;
      ++res.fallback_iterations;
    }
  }
  std::ostringstream os;
  os << "fixed-point residual " << res.residual << " after " << options.max_iterations
     << " iterations";
  throw Error(ErrorCode::kNoConvergence, os.str());
}

BipedPoincareReport stability_report(const Reduced& fixed_point, const ControlConfig& c,
                                     const BipedParams& p, const IntegratorConfig& config,
                                     const StabilityOptions& options) {
  BipedPoincareReport rep;
  rep.fixed_point = fixed_point;
  const MapEvaluation at_fp = evaluate_restricted_poincare(fixed_point, c, p, config);
  rep.fixed_point_residual = (at_fp.next - fixed_point).norm();

  const VectorMap vmap = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return restricted_poincare(Reduced(x), c, p, config);
  };
  rep.jacobian = numeric_jacobian(vmap, fixed_point, options.fd_step, options.execution);
  rep.spectrum = eigenvalues(rep.jacobian);
  rep.spectral_radius = spectral_radius(rep.spectrum);
  rep.sync_block_radius = spectral_radius(eigenvalues(rep.jacobian.topLeftCorner<2, 2>()));
  rep.energy_block_radius = spectral_radius(eigenvalues(rep.jacobian.bottomRightCorner<2, 2>()));

  Reduced x = fixed_point;
  for (int i = 0; i < 4; ++i) {
    const double scale = std::abs(fixed_point(i)) < 1e-3 ? 1.0 : std::abs(fixed_point(i));
    x(i) += options.perturbation * options.perturbation_direction(i) * scale;
  }
  rep.max_invariance_residual = at_fp.invariance_residual;
  rep.step_sequence.push_back({0, x, 0.0});
  for (int n = 1; n <= options.sequence_steps; ++n) {
    try {
      const MapEvaluation ev = evaluate_restricted_poincare(x, c, p, config);
      x = ev.next;
      rep.step_sequence.push_back({n, x, ev.invariance_residual});
      rep.max_invariance_residual = std::max(rep.max_invariance_residual, ev.invariance_residual);
    } catch (const Error& e) {
      rep.failure = TraceFailure{e.code(), e.what(), n};
      break;
    }
  }

  // Contraction ratio over the second half of the steps whose distance to
  // the fixed point is still well above the map's noise floor.
  std::vector<double> dist;
  for (const auto& rec : rep.step_sequence) {
    const double d = norm_inf(rec.x - fixed_point);
    if (d < 1e-7) break;
    dist.push_back(d);
  }
  if (dist.size() >= 4) {
    const std::size_t a = dist.size() / 2;
    const std::size_t b = dist.size() - 1;
    rep.observed_ratio = std::pow(dist[b] / dist[a], 1.0 / static_cast<double>(b - a));
  }
  rep.valid = !rep.failure && rep.max_invariance_residual <= options.invariance_tolerance;
  return rep;
}

YawPeriodReport yaw_period_check(const Reduced& fixed_point, const ControlConfig& c,
                                 const BipedParams& p, const IntegratorConfig& config, int n_steps,
                                 double delta, double tolerance) {
  const auto walk = [&](double yaw0) {
    std::vector<BipedState> pre;
    pre.push_back(lift_to_full_state(fixed_point, c.gait, p, yaw0));
    for (int k = 0; k < n_steps; ++k) {
      BipedState post;
      try {
        post = impact_map(pre.back(), p, 1e-8);
      } catch (const Error& e) {
        throw Error(ErrorCode::kStepFailed, e.what());
      }
      pre.push_back(closed_loop_step(post, c, p, config).pre_impact);
    }
    return pre;
  };
  const std::vector<BipedState> base = walk(0.0);
  const std::vector<BipedState> shifted = walk(delta);

  YawPeriodReport rep;
  const double yaw0 = base.front().q(idx::kYaw);
  for (std::size_t k = 0; k < base.size(); ++k) {
    const double yaw = base[k].q(idx::kYaw);
    const double world = handedness(base[k].stance_leg) * yaw;
    rep.yaw_at_impact.push_back(yaw);
    rep.world_yaw_at_impact.push_back(world);
    if (k % 2 == 0) rep.max_two_step_drift = std::max(rep.max_two_step_drift, std::abs(yaw - yaw0));

    const double world_shifted = handedness(shifted[k].stance_leg) * shifted[k].q(idx::kYaw);
    rep.offset_shift_error = std::max(rep.offset_shift_error, std::abs(world_shifted - world - delta));
    const double shape = std::max(
        (shifted[k].q.tail<8>() - base[k].q.tail<8>()).cwiseAbs().maxCoeff(),
        (shifted[k].qdot - base[k].qdot).cwiseAbs().maxCoeff());
    rep.offset_shape_error = std::max(rep.offset_shape_error, shape);
  }
  rep.periodic = rep.max_two_step_drift <= tolerance;
  return rep;
}

}  // namespace gaitlab::biped
