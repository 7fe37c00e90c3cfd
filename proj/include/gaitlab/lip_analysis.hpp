#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "gaitlab/hybrid.hpp"
#include "gaitlab/linalg.hpp"
#include "gaitlab/lip.hpp"
#include "gaitlab/parallel.hpp"

namespace gaitlab::lip {

/// (alpha, gamma, v) as a vector; r is implied (r0) on the section.
Eigen::Vector3d section_vector(const SwitchCoords& c);
SwitchCoords section_coords(const Eigen::Vector3d& v, const LipParams& p);

/// Step-to-step map sampled just before impact: reset, flow, locate the next
/// crossing, and chart the new pre-impact state.
SwitchCoords poincare_map(const SwitchCoords& coords, const LipParams& p,
                          const IntegratorConfig& config = {});

/// Periodic pre-impact point (atan(x0/y0), w^2 x0 y0, sqrt(2 K0)).
SwitchCoords analytic_fixed_point(const LipParams& p, double k0);

/// Limit of L1/L0 is -lambda. Throws InfeasibleEnergy unless K0 > w^2 x0 y0.
double analytic_lambda(const LipParams& p, double k0);

/// P restricted to the level set v = sqrt(2 K0), acting on (alpha, gamma).
Eigen::Vector2d restricted_map_k0(const Eigen::Vector2d& alpha_gamma, const LipParams& p,
                                  double k0, const IntegratorConfig& config = {});

struct ConvergenceRecord {
  int n = 0;
  double sync = 0.0;  // L at the start of the step following this section point
  double alpha = 0.0;
  double gamma = 0.0;
  double v = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergenceRecord> records;
  std::vector<double> ratios;  // L_{n+1} / L_n
  std::optional<TraceFailure> failure;
};

/// Iterates the Poincare map from a pre-impact point. A failing step truncates
/// the record and is reported in `failure`.
ConvergenceResult convergence_experiment(const SwitchCoords& initial, const LipParams& p,
                                         int n_steps, const IntegratorConfig& config = {});

struct LipPoincareOptions {
  double k0 = 1.0;
  double fd_step = 1e-6;
  double relative_perturbation = 1e-3;  // of w^2 x0 y0, applied to gamma
  int convergence_steps = 10;
  Execution execution = Execution::kSerial;
};

struct LipPoincareReport {
  SwitchCoords fixed_point;
  Eigen::Matrix3d jacobian;
  Spectrum eigenvalues;
  double analytic_lambda = 0.0;
  bool lambda_contracting = false;  // |lambda| < 1
  Eigen::Matrix2d restricted_jacobian;
  Spectrum restricted_eigenvalues;
  std::vector<ConvergenceRecord> convergence;
  std::vector<double> ratios;
};

LipPoincareReport poincare_report(const LipParams& p, const IntegratorConfig& config,
                                  const LipPoincareOptions& options = {});

}  // namespace gaitlab::lip
