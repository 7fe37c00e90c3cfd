#pragma once

#include <Eigen/Core>

#include "gaitlab/hybrid.hpp"
#include "gaitlab/integrator.hpp"

/// Three-dimensional linear inverted pendulum walking under an
/// (x0, y0)-invariant step: the point mass (m = 1) moves in the plane z = z0
/// over a massless stance leg, and the swing leg is always placed at
/// (x0, y0) relative to the mass when the mass reaches x^2 + y^2 = x0^2 + y0^2.
namespace gaitlab::lip {

struct LipParams {
  double g = 9.81;
  double z0 = 0.8;
  double x0 = 0.15;
  double y0 = 0.2;

  double omega() const;
  double omega_squared() const { return g / z0; }
  double r0_squared() const { return x0 * x0 + y0 * y0; }
  double r0() const;

  /// Throws InvalidArgument unless g, z0, x0, y0 are all positive and finite.
  void validate() const;
};

/// A pendulum with a prescribed natural frequency (g = omega^2, z0 = 1).
LipParams with_omega(double omega, double x0, double y0);

struct LipState {
  double x = 0.0;
  double y = 0.0;
  double xdot = 0.0;
  double ydot = 0.0;

  Eigen::Vector4d to_vector() const { return {x, y, xdot, ydot}; }
  static LipState from_vector(const Eigen::Ref<const Eigen::VectorXd>& v);
};

/// (alpha, gamma, v) chart on the switching manifold, plus the redundant r.
struct SwitchCoords {
  double alpha = 0.0;  // atan(x / y)
  double gamma = 0.0;  // xdot * ydot
  double v = 0.0;      // |(xdot, ydot)|
  double r = 0.0;      // |(x, y)|
};

/// Selects one of the four velocity pairs sharing (gamma, v).
struct ChartBranch {
  bool xdot_positive = true;
  bool sagittal_dominant = true;  // |xdot| >= |ydot|
};

/// Pre-impact states near the periodic orbit: moving forward, sagittal speed
/// dominating the frontal one.
inline constexpr ChartBranch kPreImpactBranch{true, true};

struct OrbitalEnergies {
  double ex = 0.0;
  double ey = 0.0;
};

struct LipStepResult {
  double duration = 0.0;
  LipState pre_impact;
  LipState post_impact;
};

/// Closed-form solution of x'' = w^2 x, y'' = w^2 y after time t >= 0.
LipState flow(const LipState& s, const LipParams& p, double t);

OrbitalEnergies orbital_energies(const LipState& s, const LipParams& p);

/// xdot*ydot - w^2 x y, constant along the flow.
double cross_invariant(const LipState& s, const LipParams& p);

/// Synchronization measure of a step-start state: xdot*ydot + w^2 x0 y0.
double sync_measure(const LipState& step_start, const LipParams& p);

double kinetic_energy(const LipState& s);

/// x^2 + y^2 - r0^2; positive outside the switching circle.
double guard(const LipState& s, const LipParams& p);

/// Leg exchange: (x0, y0, a, b) -> (-x0, y0, a, -b). Throws NotOnGuard when
/// |guard| exceeds `tolerance`.
LipState reset(const LipState& pre_impact, const LipParams& p, double tolerance = 1e-9);

/// Flows from a step-start state to the first armed crossing of the switching
/// circle and applies the reset. A crossing behind the stance foot (x <= 0)
/// means the mass fell back and is reported as NoCrossing.
LipStepResult step(const LipState& start, const LipParams& p, const IntegratorConfig& config);

/// Step-start state (-x0, y0, xdot0, ydot0) with zero synchronization measure
/// and kinetic energy K0. Throws InfeasibleEnergy unless K0 > w^2 x0 y0.
LipState synchronized_start(const LipParams& p, double k0);

/// Throws DegenerateY when |y| < 1e-9.
SwitchCoords to_switch_coords(const LipState& s);

/// Inverse chart for y > 0. Throws InconsistentCoords when |gamma| > v^2/2.
LipState from_switch_coords(const SwitchCoords& c, ChartBranch branch = kPreImpactBranch);

/// The LIP as a generic hybrid model (closed-form propagator).
HybridModel make_hybrid_model(const LipParams& p, double reset_tolerance = 1e-9);

}  // namespace gaitlab::lip
