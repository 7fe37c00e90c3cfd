#pragma once

// Independent re-derivation of the biped geometry and energies used as a
// test oracle. Built from Eigen::AngleAxis rotations and finite differences,
// sharing no code with the library's differentiated chain.

#include <Eigen/Geometry>

#include "gaitlab/biped.hpp"

namespace gaitlab::testing {

struct OraclePoints {
  Eigen::Matrix3d torso;
  Eigen::Vector3d hip, torso_com, stance_thigh, stance_shin, swing_thigh, swing_shin, swing_foot;
};

inline Eigen::Matrix3d axis_rot(double a, const Eigen::Vector3d& axis) {
  return Eigen::AngleAxisd(a, axis).toRotationMatrix();
}

// Leg points relative to the hip center, in the torso frame. `side` is -1
// for the stance leg, whose roll joint turns the opposite way.
struct OracleLeg {
  Eigen::Vector3d thigh_mid, shin_mid, foot;
};

inline OracleLeg oracle_leg(double roll, double pitch, double knee, double side,
                            const biped::BipedParams& p) {
  const Eigen::Matrix3d r_roll = axis_rot(roll, Eigen::Vector3d::UnitX());
  const Eigen::Matrix3d r_pitch = axis_rot(pitch, Eigen::Vector3d::UnitY());
  const Eigen::Matrix3d r_knee = axis_rot(knee, Eigen::Vector3d::UnitY());
  const Eigen::Vector3d hip_joint(0.0, side * p.W / 2.0, 0.0);
  const Eigen::Vector3d down = -Eigen::Vector3d::UnitZ();
  OracleLeg leg;
  leg.thigh_mid = r_roll * (hip_joint + r_pitch * (0.5 * p.L2 * down));
  leg.shin_mid = r_roll * (hip_joint + r_pitch * (p.L2 * down + r_knee * (0.5 * p.L1 * down)));
  leg.foot = r_roll * (hip_joint + r_pitch * (p.L2 * down + r_knee * (p.L1 * down)));
  return leg;
}

inline OraclePoints oracle_points(const biped::Vector9& q, const biped::BipedParams& p) {
  OraclePoints o;
  o.torso = axis_rot(q(0), Eigen::Vector3d::UnitZ()) * axis_rot(q(1), Eigen::Vector3d::UnitX()) *
            axis_rot(q(2), Eigen::Vector3d::UnitY());
  const OracleLeg st = oracle_leg(-q(4), q(3), q(5), -1.0, p);
  const OracleLeg sw = oracle_leg(q(7), q(6), q(8), 1.0, p);
  // The stance foot is pinned at the origin.
  o.hip = -(o.torso * st.foot);
  const auto world = [&](const Eigen::Vector3d& v) -> Eigen::Vector3d { return o.hip + o.torso * v; };
  o.torso_com = world(Eigen::Vector3d(0.0, 0.0, p.mass.torso_com_fraction * p.L3));
  o.stance_thigh = world(st.thigh_mid);
  o.stance_shin = world(st.shin_mid);
  o.swing_thigh = world(sw.thigh_mid);
  o.swing_shin = world(sw.shin_mid);
  o.swing_foot = world(sw.foot);
  return o;
}

inline double oracle_potential(const biped::Vector9& q, const biped::BipedParams& p) {
  const OraclePoints o = oracle_points(q, p);
  const auto& m = p.mass;
  return p.g * (m.torso_mass * o.torso_com.z() +
                m.thigh_mass * (o.stance_thigh.z() + o.swing_thigh.z()) +
                m.shin_mass * (o.stance_shin.z() + o.swing_shin.z()));
}

// Kinetic energy from central differences of the point positions along qdot.
inline double oracle_kinetic(const biped::Vector9& q, const biped::Vector9& qdot,
                             const biped::BipedParams& p, double h = 1e-6) {
  const OraclePoints a = oracle_points(q + h * qdot, p);
  const OraclePoints b = oracle_points(q - h * qdot, p);
  const OraclePoints c = oracle_points(q, p);
  const auto vel = [&](const Eigen::Vector3d& pa, const Eigen::Vector3d& pb) {
    return ((pa - pb) / (2.0 * h)).squaredNorm();
  };
  const auto& m = p.mass;
  double k = 0.5 * m.torso_mass * vel(a.torso_com, b.torso_com);
  k += 0.5 * m.thigh_mass * (vel(a.stance_thigh, b.stance_thigh) + vel(a.swing_thigh, b.swing_thigh));
  k += 0.5 * m.shin_mass * (vel(a.stance_shin, b.stance_shin) + vel(a.swing_shin, b.swing_shin));
  const Eigen::Matrix3d rdot = (a.torso - b.torso) / (2.0 * h);
  const Eigen::Matrix3d w_hat = c.torso.transpose() * rdot;
  const Eigen::Vector3d w(w_hat(2, 1), w_hat(0, 2), w_hat(1, 0));
  k += 0.5 * w.dot(m.torso_inertia.asDiagonal() * w);
  return k;
}

// Mass matrix by polarization of the kinetic energy quadratic form.
inline biped::Matrix9 oracle_mass_matrix(const biped::Vector9& q, const biped::BipedParams& p) {
  biped::Matrix9 d;
  const auto e = [](int i) { return biped::Vector9::Unit(i); };
  for (int i = 0; i < 9; ++i) d(i, i) = 2.0 * oracle_kinetic(q, e(i), p);
  for (int i = 0; i < 9; ++i) {
    for (int j = i + 1; j < 9; ++j) {
      d(i, j) = d(j, i) = oracle_kinetic(q, e(i) + e(j), p) - 0.5 * (d(i, i) + d(j, j));
    }
  }
  return d;
}

inline biped::Vector9 random_configuration(double (*uniform)(double, double)) {
  biped::Vector9 q;
  q << uniform(-3.0, 3.0), uniform(-0.4, 0.4), uniform(-0.4, 0.4), uniform(-0.8, 0.8),
      uniform(-0.3, 0.3), uniform(0.05, 2.0), uniform(-0.8, 0.8), uniform(-0.3, 0.3),
      uniform(0.05, 2.0);
  return q;
}

}  // namespace gaitlab::testing
