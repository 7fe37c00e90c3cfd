#pragma once

#include <Eigen/Core>

/// Nine-degree-of-freedom 3D biped with point feet: a rigid torso and two
/// legs, each with hip pitch, hip roll and knee joints.
///
/// Coordinates q = (yaw, roll, pitch, q1, q2, q3, q4, q5, q6): the torso Euler
/// angles (intrinsic Z, X, Y), stance hip pitch/roll and knee, then swing hip
/// pitch/roll and knee. The model is always written with the stance leg on
/// the -y side of the hip; the leg exchange at impact mirrors the y axis, so
/// the frames alternate handedness between left and right stance.
namespace gaitlab::biped {

using Vector6 = Eigen::Matrix<double, 6, 1>;
using Vector9 = Eigen::Matrix<double, 9, 1>;
using Matrix9 = Eigen::Matrix<double, 9, 9>;
using Matrix3x9 = Eigen::Matrix<double, 3, 9>;

namespace idx {
inline constexpr int kYaw = 0;
inline constexpr int kRoll = 1;
inline constexpr int kPitch = 2;
inline constexpr int kStanceHipPitch = 3;
inline constexpr int kStanceHipRoll = 4;
inline constexpr int kStanceKnee = 5;
inline constexpr int kSwingHipPitch = 6;
inline constexpr int kSwingHipRoll = 7;
inline constexpr int kSwingKnee = 8;
}  // namespace idx

struct MassModel {
  double torso_mass = 20.0;
  double torso_com_fraction = 0.5;  // COM at this fraction of L3 above the hip
  Eigen::Vector3d torso_inertia{1.0, 0.8, 0.5};  // principal, torso frame
  double thigh_mass = 2.0;  // point mass at the thigh midpoint
  double shin_mass = 1.0;   // point mass at the shin midpoint
};

struct BipedParams {
  double L1 = 0.4;  // shin
  double L2 = 0.4;  // thigh
  double L3 = 0.5;  // torso
  double W = 0.2;   // hip width
  double g = 9.81;
  MassModel mass;
  double min_hip_height = 0.3;  // below this the robot counts as fallen

  double total_mass() const;
  void validate() const;
};

enum class StanceLeg { kRight, kLeft };

inline StanceLeg other(StanceLeg leg) {
  return leg == StanceLeg::kRight ? StanceLeg::kLeft : StanceLeg::kRight;
}

/// +1 for right stance, -1 for left: multiplies model-frame y coordinates and
/// the yaw angle to obtain world-frame values.
inline double handedness(StanceLeg leg) { return leg == StanceLeg::kRight ? 1.0 : -1.0; }

struct BipedState {
  Vector9 q = Vector9::Zero();
  Vector9 qdot = Vector9::Zero();
  StanceLeg stance_leg = StanceLeg::kRight;
};

/// Target quadruple of the discrete invariant step.
struct GaitSpec {
  double theta_p_d = 0.1;
  double x0 = 0.15;
  double y0 = 0.2;
  double q_k_d = 0.3;

  double r0() const;
  /// Hip-to-foot distance with the knee at q_k_d.
  double r1(const BipedParams& p) const;
  /// Hip height at impact, sqrt(r1^2 - x0^2 - y0^2).
  double z0(const BipedParams& p) const;
  /// Throws InvalidArgument unless the targets are positive and reachable.
  void validate(const BipedParams& p) const;
};

/// |r|^2 from a foot to the hip center for knee angle `knee`:
/// L1^2 + L2^2 + W^2/4 + 2 L1 L2 cos(knee).
double leg_length_squared(double knee, const BipedParams& p);

struct Kinematics {
  Eigen::Matrix3d torso_rotation;
  Eigen::Vector3d hip;             // r_H in I
  Eigen::Vector3d swing_foot;      // r_F in I
  Eigen::Vector3d foot_from_hip;   // r_FH = r_F - r_H in I
  Eigen::Vector3d hip_yaw;         // r_H in Y
  Eigen::Vector3d foot_from_hip_yaw;  // r_FH in Y
  Eigen::Vector3d torso_com;
};

Kinematics forward_kinematics(const Vector9& q, const BipedParams& p);

/// Swing-foot height above the ground.
double swing_foot_height(const Vector9& q, const BipedParams& p);

/// Guard with the hybrid-core sign convention: -z_F, so the swing foot
/// descending through the ground is a negative-to-positive crossing.
double guard(const BipedState& s, const BipedParams& p);

Matrix9 mass_matrix(const Vector9& q, const BipedParams& p);

/// H(q, qdot) = C(q, qdot) qdot + G(q).
Vector9 bias(const Vector9& q, const Vector9& qdot, const BipedParams& p);

/// G(q) = dV/dq.
Vector9 gravity_vector(const Vector9& q, const BipedParams& p);

double potential_energy(const Vector9& q, const BipedParams& p);
double kinetic_energy(const Vector9& q, const Vector9& qdot, const BipedParams& p);

struct DynamicsTerms {
  Matrix9 D;
  Vector9 h;
};

DynamicsTerms dynamics_terms(const Vector9& q, const Vector9& qdot, const BipedParams& p);

/// qddot = D^-1 (B u - H) with B = [0; I6].
Vector9 dynamics(const BipedState& s, const Vector6& u, const BipedParams& p);

/// d r_F / d q, 3 x 9.
Matrix3x9 swing_foot_jacobian(const Vector9& q, const BipedParams& p);

/// Rigid plastic contact at the swing foot, before relabeling:
/// qdot+ = qdot- - D^-1 J^T (J D^-1 J^T)^-1 J qdot-.
Vector9 impact_velocity(const Vector9& q, const Vector9& qdot_minus, const BipedParams& p);

/// Relabeling matrix R: swaps legs and mirrors y (yaw and roll change sign).
Matrix9 relabel_matrix();

BipedState relabel(const BipedState& s);

/// Contact solve followed by relabeling; the stance flag flips. Throws
/// NotOnGuard when |z_F| exceeds `tolerance`.
BipedState impact_map(const BipedState& pre, const BipedParams& p, double tolerance = 1e-8);

/// Positions and quasi-velocities in the yaw frame Y.
///
/// xi = (yaw, roll, pitch, r, alpha, z, x_FH, y_FH, z_FH),
/// zeta = (yaw', roll', pitch', v, gamma, v_z, x_FH', y_FH', z_FH').
/// (v_x, v_y, v_z) is the hip velocity expressed in Y, while x_FH' etc. are
/// time derivatives of the Y coordinates of the swing foot relative to the
/// hip. z_FH is reported as the hip height above the swing foot, z - z_F.
struct QuasiState {
  Vector9 xi = Vector9::Zero();
  Vector9 zeta = Vector9::Zero();
  Eigen::Vector3d hip_yaw = Eigen::Vector3d::Zero();           // (x, y, z)
  Eigen::Vector3d hip_velocity_yaw = Eigen::Vector3d::Zero();  // (v_x, v_y, v_z)
  Eigen::Vector3d hip_velocity_inertial = Eigen::Vector3d::Zero();

  double r() const { return xi(3); }
  double alpha() const { return xi(4); }
  double v() const { return zeta(3); }
  double gamma() const { return zeta(4); }
  double yaw_rate() const { return zeta(0); }
};

/// Throws DegenerateY when |y| < 1e-9.
QuasiState to_quasi(const BipedState& s, const BipedParams& p);

/// Linear map qdot -> (yaw', roll', pitch', v_x, v_y, v_z, x_FH', y_FH', z_FH').
Matrix9 quasi_velocity_matrix(const Vector9& q, const BipedParams& p);

/// Swing foot relative to the hip in Y, with Jacobian and dJ/dt * qdot. The
/// foot-placement controller works on these.
struct PlacementKinematics {
  Eigen::Vector3d position;
  Matrix3x9 jacobian;
  Eigen::Vector3d jdot_qdot;
};

PlacementKinematics placement_kinematics(const Vector9& q, const Vector9& qdot,
                                         const BipedParams& p);

}  // namespace gaitlab::biped
