#include "gaitlab/biped.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Geometry>

#include "ad.hpp"
#include "biped_kinematics.hpp"
#include "gaitlab/error.hpp"
#include "gaitlab/linalg.hpp"

namespace gaitlab::biped {
namespace {

using D9 = ad::Dual<9>;
using detail::Chain;
using detail::M3;
using detail::V3;

template <class T>
Eigen::Vector3d value(const V3<T>& v) {
  return {ad::value_of(v.x), ad::value_of(v.y), ad::value_of(v.z)};
}

template <class T>
Eigen::Matrix3d value(const M3<T>& m) {
  Eigen::Matrix3d r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) r(i, j) = ad::value_of(m.m[i][j]);
  }
  return r;
}

Matrix3x9 jacobian(const V3<D9>& v) {
  Matrix3x9 j;
  for (int k = 0; k < 9; ++k) {
    j(0, k) = v.x.d[k];
    j(1, k) = v.y.d[k];
    j(2, k) = v.z.d[k];
  }
  return j;
}

Eigen::Vector3d second_coeff(const V3<ad::Jet2>& v) { return {v.x.d2, v.y.d2, v.z.d2}; }

Eigen::Vector3d vee(const Eigen::Matrix3d& s) {
  return {0.5 * (s(2, 1) - s(1, 2)), 0.5 * (s(0, 2) - s(2, 0)), 0.5 * (s(1, 0) - s(0, 1))};
}

Chain<D9> first_order(const Vector9& q, const BipedParams& p) {
  std::array<D9, 9> qd;
  for (int i = 0; i < 9; ++i) qd[static_cast<std::size_t>(i)] = D9::variable(q(i), i);
  return detail::evaluate_chain(qd, p);
}

Chain<ad::Jet2> along_velocity(const Vector9& q, const Vector9& qdot, const BipedParams& p) {
  std::array<ad::Jet2, 9> qj;
  for (int i = 0; i < 9; ++i) qj[static_cast<std::size_t>(i)] = ad::Jet2(q(i), qdot(i), 0.0);
  return detail::evaluate_chain(qj, p);
}

Chain<double> plain(const Vector9& q, const BipedParams& p) {
  std::array<double, 9> qa;
  for (int i = 0; i < 9; ++i) qa[static_cast<std::size_t>(i)] = q(i);
  return detail::evaluate_chain(qa, p);
}

// Body angular velocity Jacobian: column k is vee(R^T dR/dq_k).
Matrix3x9 angular_jacobian(const Chain<D9>& c) {
  const Eigen::Matrix3d r = value(c.torso);
  Matrix3x9 jw;
  for (int k = 0; k < 9; ++k) {
    Eigen::Matrix3d dr;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) dr(i, j) = c.torso.m[i][j].d[k];
    }
    jw.col(k) = vee(r.transpose() * dr);
  }
  return jw;
}

template <class T>
struct PointMass {
  const V3<T>* position;
  double mass;
};

template <class T>
std::array<PointMass<T>, 5> point_masses(const Chain<T>& c, const BipedParams& p) {
  return {{{&c.torso_com, p.mass.torso_mass},
           {&c.stance_thigh, p.mass.thigh_mass},
           {&c.stance_shin, p.mass.shin_mass},
           {&c.swing_thigh, p.mass.thigh_mass},
           {&c.swing_shin, p.mass.shin_mass}}};
}

}  // namespace

double BipedParams::total_mass() const {
  return mass.torso_mass + 2.0 * (mass.thigh_mass + mass.shin_mass);
}

void BipedParams::validate() const {
  const bool ok = L1 > 0.0 && L2 > 0.0 && L3 > 0.0 && W > 0.0 && g > 0.0 &&
                  mass.torso_mass > 0.0 && mass.thigh_mass > 0.0 && mass.shin_mass > 0.0 &&
                  (mass.torso_inertia.array() > 0.0).all() && std::isfinite(min_hip_height) &&
                  std::isfinite(mass.torso_com_fraction);
  if (!ok) throw Error(ErrorCode::kInvalidArgument, "biped lengths, masses and inertias must be positive");
}

double leg_length_squared(double knee, const BipedParams& p) {
  return p.L1 * p.L1 + p.L2 * p.L2 + 0.25 * p.W * p.W + 2.0 * p.L1 * p.L2 * std::cos(knee);
}

double GaitSpec::r0() const { return std::hypot(x0, y0); }

double GaitSpec::r1(const BipedParams& p) const { return std::sqrt(leg_length_squared(q_k_d, p)); }

double GaitSpec::z0(const BipedParams& p) const {
  return std::sqrt(leg_length_squared(q_k_d, p) - x0 * x0 - y0 * y0);
}

void GaitSpec::validate(const BipedParams& p) const {
  if (!(x0 > 0.0 && y0 > 0.0 && theta_p_d > 0.0 && q_k_d > 0.0 && q_k_d < std::numbers::pi)) {
    throw Error(ErrorCode::kInvalidArgument,
                "gait targets need x0, y0, theta_p_d > 0 and q_k_d in (0, pi)");
  }
  const double z2 = leg_length_squared(q_k_d, p) - x0 * x0 - y0 * y0;
  if (!(z2 > 0.0)) {
    std::ostringstream os;
    os << "step target (" << x0 << ", " << y0 << ") is out of reach for knee angle " << q_k_d;
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
}

Kinematics forward_kinematics(const Vector9& q, const BipedParams& p) {
  const Chain<double> c = plain(q, p);
  Kinematics k;
  k.torso_rotation = value(c.torso);
  k.hip = value(c.hip);
  k.swing_foot = value(c.swing_foot);
  k.foot_from_hip = k.swing_foot - k.hip;
  const double cy = std::cos(q(idx::kYaw));
  const double sy = std::sin(q(idx::kYaw));
  Eigen::Matrix3d rz;
  rz << cy, -sy, 0.0, sy, cy, 0.0, 0.0, 0.0, 1.0;
  k.hip_yaw = rz.transpose() * k.hip;
  k.foot_from_hip_yaw = value(c.foot_from_hip_yaw);
  k.torso_com = value(c.torso_com);
  return k;
}

double swing_foot_height(const Vector9& q, const BipedParams& p) {
  return plain(q, p).swing_foot.z;
}

double guard(const BipedState& s, const BipedParams& p) { return -swing_foot_height(s.q, p); }

double potential_energy(const Vector9& q, const BipedParams& p) {
  const Chain<double> c = plain(q, p);
  double v = 0.0;
  for (const auto& pm : point_masses(c, p)) v += pm.mass * p.g * pm.position->z;
  return v;
}

double kinetic_energy(const Vector9& q, const Vector9& qdot, const BipedParams& p) {
  return 0.5 * qdot.dot(mass_matrix(q, p) * qdot);
}

DynamicsTerms dynamics_terms(const Vector9& q, const Vector9& qdot, const BipedParams& p) {
  const Chain<D9> c1 = first_order(q, p);
  const Chain<ad::Jet2> c2 = along_velocity(q, qdot, p);
  const auto m1 = point_masses(c1, p);
  const auto m2 = point_masses(c2, p);

  DynamicsTerms t;
  t.D.setZero();
  t.h.setZero();
  for (std::size_t i = 0; i < m1.size(); ++i) {
    const Matrix3x9 j = jacobian(*m1[i].position);
    const double m = m1[i].mass;
    t.D.noalias() += m * j.transpose() * j;
    // Acceleration at qddot = 0 is 2 * (second Taylor coefficient).
    const Eigen::Vector3d acc = 2.0 * second_coeff(*m2[i].position);
    t.h.noalias() += m * j.transpose() * acc;
    t.h.noalias() += m * p.g * j.row(2).transpose();
  }

  const Matrix3x9 jw = angular_jacobian(c1);
  const Eigen::Matrix3d inertia = p.mass.torso_inertia.asDiagonal();
  t.D.noalias() += jw.transpose() * inertia * jw;

  Eigen::Matrix3d r0;
  Eigen::Matrix3d r1;
  Eigen::Matrix3d r2;
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) {
      r0(i, k) = c2.torso.m[i][k].v;
      r1(i, k) = c2.torso.m[i][k].d1;
      r2(i, k) = c2.torso.m[i][k].d2;
    }
  }
  const Eigen::Vector3d omega = vee(r0.transpose() * r1);
  const Eigen::Vector3d omega_dot = vee(2.0 * r0.transpose() * r2 + r1.transpose() * r1);
  const Eigen::Vector3d iw = inertia * omega;
  t.h.noalias() += jw.transpose() * (inertia * omega_dot + omega.cross(iw));

  // Exact symmetry; the accumulation above is symmetric up to roundoff only.
  t.D = 0.5 * (t.D + t.D.transpose()).eval();
  return t;
}

Matrix9 mass_matrix(const Vector9& q, const BipedParams& p) {
  const Chain<D9> c = first_order(q, p);
  Matrix9 d = Matrix9::Zero();
  for (const auto& pm : point_masses(c, p)) {
    const Matrix3x9 j = jacobian(*pm.position);
    d.noalias() += pm.mass * j.transpose() * j;
  }
  const Matrix3x9 jw = angular_jacobian(c);
  d.noalias() += jw.transpose() * p.mass.torso_inertia.asDiagonal() * jw;
  return 0.5 * (d + d.transpose());
}

Vector9 bias(const Vector9& q, const Vector9& qdot, const BipedParams& p) {
  return dynamics_terms(q, qdot, p).h;
}

Vector9 gravity_vector(const Vector9& q, const BipedParams& p) {
  const Chain<D9> c = first_order(q, p);
  Vector9 g = Vector9::Zero();
  for (const auto& pm : point_masses(c, p)) {
    for (int k = 0; k < 9; ++k) g(k) += pm.mass * p.g * pm.position->z.d[k];
  }
  return g;
}

Vector9 dynamics(const BipedState& s, const Vector6& u, const BipedParams& p) {
  if (!u.allFinite()) throw Error(ErrorCode::kNonFiniteState, "non-finite joint torques");
  const DynamicsTerms t = dynamics_terms(s.q, s.qdot, p);
  Vector9 rhs = -t.h;
  rhs.tail<6>() += u;
  return solve_dense(t.D, rhs);
}

Matrix3x9 swing_foot_jacobian(const Vector9& q, const BipedParams& p) {
  return jacobian(first_order(q, p).swing_foot);
}

Vector9 impact_velocity(const Vector9& q, const Vector9& qdot_minus, const BipedParams& p) {
  const Matrix9 d = mass_matrix(q, p);
  const Matrix3x9 j = swing_foot_jacobian(q, p);
  const Eigen::MatrixXd dinv_jt = solve_dense_multi(d, j.transpose());
  const Eigen::Matrix3d lambda = j * dinv_jt;
  const Eigen::Vector3d impulse = solve_dense(lambda, j * qdot_minus);
  return qdot_minus - dinv_jt * impulse;
}

Matrix9 relabel_matrix() {
  Matrix9 r = Matrix9::Zero();
  r(0, 0) = -1.0;
  r(1, 1) = -1.0;
  r(2, 2) = 1.0;
  for (int i = 0; i < 3; ++i) {
    r(3 + i, 6 + i) = 1.0;
    r(6 + i, 3 + i) = 1.0;
  }
  return r;
}

BipedState relabel(const BipedState& s) {
  const Matrix9 r = relabel_matrix();
  return {r * s.q, r * s.qdot, other(s.stance_leg)};
}

BipedState impact_map(const BipedState& pre, const BipedParams& p, double tolerance) {
  const double zf = swing_foot_height(pre.q, p);
  if (!(std::abs(zf) <= tolerance)) {
    std::ostringstream os;
    os << "swing foot is " << zf << " m off the ground at impact";
    throw Error(ErrorCode::kNotOnGuard, os.str());
  }
  BipedState contact = pre;
  contact.qdot = impact_velocity(pre.q, pre.qdot, p);
  return relabel(contact);
}

Matrix9 quasi_velocity_matrix(const Vector9& q, const BipedParams& p) {
  const Chain<D9> c = first_order(q, p);
  const double cy = std::cos(q(idx::kYaw));
  const double sy = std::sin(q(idx::kYaw));
  Eigen::Matrix3d rz;
  rz << cy, -sy, 0.0, sy, cy, 0.0, 0.0, 0.0, 1.0;
  Matrix9 m = Matrix9::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  m(2, 2) = 1.0;
  m.block<3, 9>(3, 0) = rz.transpose() * jacobian(c.hip);
  m.block<3, 9>(6, 0) = jacobian(c.foot_from_hip_yaw);
  m.row(8) *= -1.0;  // z_FH is measured downward from the hip
  return m;
}

QuasiState to_quasi(const BipedState& s, const BipedParams& p) {
  const Kinematics k = forward_kinematics(s.q, p);
  const double x = k.hip_yaw.x();
  const double y = k.hip_yaw.y();
  const double z = k.hip_yaw.z();
  if (std::abs(y) < 1e-9) throw Error(ErrorCode::kDegenerateY, "alpha is undefined for y = 0");

  const Vector9 rates = quasi_velocity_matrix(s.q, p) * s.qdot;
  QuasiState out;
  out.hip_yaw = k.hip_yaw;
  out.hip_velocity_yaw = rates.segment<3>(3);
  const double cy = std::cos(s.q(idx::kYaw));
  const double sy = std::sin(s.q(idx::kYaw));
  Eigen::Matrix3d rz;
  rz << cy, -sy, 0.0, sy, cy, 0.0, 0.0, 0.0, 1.0;
  out.hip_velocity_inertial = rz * out.hip_velocity_yaw;

  const double vx = rates(3);
  const double vy = rates(4);
  out.xi << s.q(0), s.q(1), s.q(2), std::hypot(x, y), std::atan(x / y), z,
      k.foot_from_hip_yaw.x(), k.foot_from_hip_yaw.y(), -k.foot_from_hip_yaw.z();
  out.zeta << s.qdot(0), s.qdot(1), s.qdot(2), std::hypot(vx, vy), vx * vy, rates(5), rates(6),
      rates(7), rates(8);
  return out;
}

PlacementKinematics placement_kinematics(const Vector9& q, const Vector9& qdot,
                                         const BipedParams& p) {
  const Chain<D9> c1 = first_order(q, p);
  const Chain<ad::Jet2> c2 = along_velocity(q, qdot, p);
  PlacementKinematics out;
  out.position = value(c1.foot_from_hip_yaw);
  out.jacobian = jacobian(c1.foot_from_hip_yaw);
  out.jdot_qdot = 2.0 * second_coeff(c2.foot_from_hip_yaw);
  return out;
}

}  // namespace gaitlab::biped
