#include "gaitlab/lip_analysis.hpp"

#include <cmath>
#include <sstream>

#include "gaitlab/error.hpp"
#include "gaitlab/jacobian.hpp"

namespace gaitlab::lip {

Eigen::Vector3d section_vector(const SwitchCoords& c) { return {c.alpha, c.gamma, c.v}; }

SwitchCoords section_coords(const Eigen::Vector3d& v, const LipParams& p) {
  return {v(0), v(1), v(2), p.r0()};
}

SwitchCoords poincare_map(const SwitchCoords& coords, const LipParams& p,
                          const IntegratorConfig& config) {
  SwitchCoords on_section = coords;
  on_section.r = p.r0();
  const LipState pre = from_switch_coords(on_section, kPreImpactBranch);
  // The chart reproduces r0 only to roundoff; the reset checks the guard.
  const LipState start = reset(pre, p, config.event_tolerance + 1e-12 * p.r0_squared());
  const LipStepResult next = step(start, p, config);
  return to_switch_coords(next.pre_impact);
}

SwitchCoords analytic_fixed_point(const LipParams& p, double k0) {
  return {std::atan(p.x0 / p.y0), p.omega_squared() * p.x0 * p.y0, std::sqrt(2.0 * k0), p.r0()};
}

double analytic_lambda(const LipParams& p, double k0) {
  p.validate();
  const double w2 = p.omega_squared();
  const double c = w2 * p.x0 * p.y0;
  if (!(k0 > c)) {
    std::ostringstream os;
    os << "kinetic energy " << k0 << " must exceed w^2 x0 y0 = " << c;
    throw Error(ErrorCode::kInfeasibleEnergy, os.str());
  }
  const double spread = w2 * (p.y0 * p.y0 - p.x0 * p.x0);
  return 1.0 - 2.0 * spread / (spread + 2.0 * std::sqrt(k0 * k0 - c * c));
}

Eigen::Vector2d restricted_map_k0(const Eigen::Vector2d& alpha_gamma, const LipParams& p,
                                  double k0, const IntegratorConfig& config) {
  const SwitchCoords in{alpha_gamma(0), alpha_gamma(1), std::sqrt(2.0 * k0), p.r0()};
  const SwitchCoords out = poincare_map(in, p, config);
  return {out.alpha, out.gamma};
}

ConvergenceResult convergence_experiment(const SwitchCoords& initial, const LipParams& p,
                                         int n_steps, const IntegratorConfig& config) {
  const double c = p.omega_squared() * p.x0 * p.y0;
  ConvergenceResult out;
  SwitchCoords cur = initial;
  // The reset flips gamma, so the next step starts with L = c - gamma_pre.
  out.records.push_back({0, c - cur.gamma, cur.alpha, cur.gamma, cur.v});
  for (int n = 1; n <= n_steps; ++n) {
    try {
      cur = poincare_map(cur, p, config);
    } catch (const Error& e) {
      out.failure = TraceFailure{e.code(), e.what(), n};
      break;
    }
    out.records.push_back({n, c - cur.gamma, cur.alpha, cur.gamma, cur.v});
  }
  for (std::size_t i = 1; i < out.records.size(); ++i) {
    out.ratios.push_back(out.records[i].sync / out.records[i - 1].sync);
  }
  return out;
}

LipPoincareReport poincare_report(const LipParams& p, const IntegratorConfig& config,
                                  const LipPoincareOptions& options) {
  LipPoincareReport rep;
  rep.fixed_point = analytic_fixed_point(p, options.k0);
  rep.analytic_lambda = analytic_lambda(p, options.k0);
  rep.lambda_contracting = std::abs(rep.analytic_lambda) < 1.0;

  const VectorMap full = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return section_vector(poincare_map(section_coords(x, p), p, config));
  };
  rep.jacobian = numeric_jacobian(full, section_vector(rep.fixed_point), options.fd_step,
                                  options.execution);
  rep.eigenvalues = eigenvalues(rep.jacobian);

  const VectorMap restricted = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return restricted_map_k0(x, p, options.k0, config);
  };
  const Eigen::Vector2d ag{rep.fixed_point.alpha, rep.fixed_point.gamma};
  rep.restricted_jacobian = numeric_jacobian(restricted, ag, options.fd_step, options.execution);
  rep.restricted_eigenvalues = eigenvalues(rep.restricted_jacobian);

  SwitchCoords start = rep.fixed_point;
  start.gamma -= options.relative_perturbation * rep.fixed_point.gamma;
  const ConvergenceResult conv = convergence_experiment(start, p, options.convergence_steps, config);
  rep.convergence = conv.records;
  rep.ratios = conv.ratios;
  return rep;
}

}  // namespace gaitlab::lip
