#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "gaitlab/biped.hpp"
#include "gaitlab/biped_control.hpp"
#include "gaitlab/hybrid.hpp"
#include "gaitlab/linalg.hpp"
#include "gaitlab/parallel.hpp"

namespace gaitlab::biped {

/// Reduced impact coordinates (alpha, gamma, yaw rate, v).
using Reduced = Eigen::Vector4d;

Reduced reduced_coords(const BipedState& s, const BipedParams& p);

/// Pre-impact state on the invariant submanifold with the given reduced
/// coordinates and yaw angle `yaw`: posture and swing-leg targets met
/// exactly, all relative rates zero, v_z = -(x v_x + y v_y) / z0.
///
/// Throws LiftInfeasible (v <= 0, target out of reach, singular velocity
/// map) and InconsistentCoords (|gamma| > v^2 / 2).
BipedState lift_to_full_state(const Reduced& xr, const GaitSpec& gait, const BipedParams& p,
                              double yaw = 0.0);

struct MapEvaluation {
  Reduced next;
  double invariance_residual = 0.0;  // at the next pre-impact state
  double step_duration = 0.0;
  BipedState pre_impact;  // next pre-impact state
};

/// One closed-loop step starting from the lifted pre-impact state.
MapEvaluation evaluate_restricted_poincare(const Reduced& xr, const ControlConfig& c,
                                           const BipedParams& p, const IntegratorConfig& config,
                                           double yaw = 0.0);

Reduced restricted_poincare(const Reduced& xr, const ControlConfig& c, const BipedParams& p,
                            const IntegratorConfig& config);

/// LIP prediction used to seed the fixed-point search: alpha = atan(x0/y0),
/// gamma = w^2 x0 y0 with w^2 = g / z0, zero yaw rate, v = sqrt(2 nominal_k0).
Reduced lip_seed(const ControlConfig& c, const BipedParams& p);

struct FixedPointOptions {
  double tolerance = 1e-8;
  int max_iterations = 50;
  double fd_step = 1e-5;
  /// Plain iterations x <- P(x) before Newton starts. They move the guess
  /// towards attracting fixed points and away from repelling ones.
  int warmup_iterations = 8;
  /// Cap on the infinity norm of a Newton step.
  double max_step = 0.1;
  Execution execution = Execution::kSerial;
};

struct FixedPointResult {
  Reduced point = Reduced::Zero();
  double residual = 0.0;  // |P(x) - x|
  int iterations = 0;
  int fallback_iterations = 0;  // plain iterations used when Newton stalled
  std::vector<double> residual_history;
};

/// Damped Newton on F(x) = P(x) - x with a central-difference Jacobian,
/// after `warmup_iterations` plain iterations. When a Newton step fails to
/// decrease |F| after halving, one plain iteration x <- P(x) is taken
/// instead. Throws NoConvergence after max_iterations Newton iterations.
FixedPointResult find_fixed_point(const Reduced& initial_guess, const ControlConfig& c,
                                  const BipedParams& p, const IntegratorConfig& config,
                                  const FixedPointOptions& options = {});

struct StepRecord {
  int n = 0;
  Reduced x = Reduced::Zero();
  double invariance_residual = 0.0;
};

struct BipedPoincareReport {
  Reduced fixed_point = Reduced::Zero();
  double fixed_point_residual = 0.0;
  Eigen::Matrix4d jacobian = Eigen::Matrix4d::Zero();
  Spectrum spectrum;
  double spectral_radius = 0.0;
  /// Largest |eigenvalue| of the (alpha, gamma) and (yaw rate, v) diagonal
  /// blocks of the Jacobian.
  double sync_block_radius = 0.0;
  double energy_block_radius = 0.0;
  std::vector<StepRecord> step_sequence;
  /// Geometric-mean contraction of |x_n - x*| over the tail of the sequence.
  double observed_ratio = 0.0;
  double max_invariance_residual = 0.0;
  bool valid = false;  // every step met the 1e-3 impact tolerance
  std::optional<TraceFailure> failure;
};

struct StabilityOptions {
  double fd_step = 1e-5;
  int sequence_steps = 40;
  /// Initial offset from the fixed point, relative to each |x*_i| (absolute
  /// for components below 1e-3, such as the yaw rate).
  double perturbation = 0.02;
  /// Per-coordinate sign (or weight) applied to the initial offset.
  Reduced perturbation_direction = Reduced::Ones();
  double invariance_tolerance = 1e-3;
  Execution execution = Execution::kSerial;
};

BipedPoincareReport stability_report(const Reduced& fixed_point, const ControlConfig& c,
                                     const BipedParams& p, const IntegratorConfig& config,
                                     const StabilityOptions& options = {});

struct YawPeriodReport {
  std::vector<double> yaw_at_impact;  // pre-impact yaw, model frame, steps 0..n
  std::vector<double> world_yaw_at_impact;
  double max_two_step_drift = 0.0;  // max |yaw(2k) - yaw(0)|
  double offset_shift_error = 0.0;  // max |yaw_shifted - yaw - delta|
  double offset_shape_error = 0.0;  // max difference of (q-hat, qdot) traces
  bool periodic = false;
};

/// Walks the full (unreduced) model from the lifted fixed point for
/// `n_steps` steps, with and without a yaw offset `delta`.
YawPeriodReport yaw_period_check(const Reduced& fixed_point, const ControlConfig& c,
                                 const BipedParams& p, const IntegratorConfig& config,
                                 int n_steps = 6, double delta = 0.3, double tolerance = 1e-4);

}  // namespace gaitlab::biped
