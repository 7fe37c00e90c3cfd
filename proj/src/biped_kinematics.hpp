#pragma once

// Scalar-generic kinematic chain of the biped. Instantiated with double for
// plain evaluation, ad::Dual<9> for Jacobians and ad::Jet2 for the
// velocity-product terms.
//
// Frames: positions are expressed in I (parallel to the world, origin at the
// stance foot). The torso orientation is R = Rz(yaw) Rx(roll) Ry(pitch). In
// the torso frame the stance hip joint sits at (0, -W/2, 0) and the swing hip
// joint at (0, +W/2, 0); each leg is
//
//   Rx(roll_joint) * [ hip offset + Ry(hip pitch) * (thigh + Ry(knee) * shin) ]
//
// with roll_joint = -q2 for the stance leg and +q5 for the swing leg, so the
// mirror image of one leg is the other leg with the same joint angles. The
// roll joint rotates the hip offset together with the leg, which keeps the
// offset orthogonal to the leg plane; |r_H| then depends on the knee alone.

#include <array>

#include "gaitlab/biped.hpp"

namespace gaitlab::biped::detail {

template <class T>
struct V3 {
  T x, y, z;
};

template <class T>
inline V3<T> operator+(const V3<T>& a, const V3<T>& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}
template <class T>
inline V3<T> operator-(const V3<T>& a, const V3<T>& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}
template <class T>
inline V3<T> operator-(const V3<T>& a) {
  return {-a.x, -a.y, -a.z};
}

template <class T>
struct M3 {
  std::array<std::array<T, 3>, 3> m;
};

template <class T>
inline V3<T> operator*(const M3<T>& a, const V3<T>& v) {
  return {a.m[0][0] * v.x + a.m[0][1] * v.y + a.m[0][2] * v.z,
          a.m[1][0] * v.x + a.m[1][1] * v.y + a.m[1][2] * v.z,
          a.m[2][0] * v.x + a.m[2][1] * v.y + a.m[2][2] * v.z};
}

template <class T>
inline M3<T> operator*(const M3<T>& a, const M3<T>& b) {
  M3<T> r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      r.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j] + a.m[i][2] * b.m[2][j];
    }
  }
  return r;
}

template <class T>
inline M3<T> transpose(const M3<T>& a) {
  M3<T> r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[j][i];
  }
  return r;
}

template <class T>
inline M3<T> rot_x(const T& a) {
  using std::cos;
  using std::sin;
  const T c = cos(a);
  const T s = sin(a);
  return {{{{T(1.0), T(0.0), T(0.0)}, {T(0.0), c, -s}, {T(0.0), s, c}}}};
}

template <class T>
inline M3<T> rot_y(const T& a) {
  using std::cos;
  using std::sin;
  const T c = cos(a);
  const T s = sin(a);
  return {{{{c, T(0.0), s}, {T(0.0), T(1.0), T(0.0)}, {-s, T(0.0), c}}}};
}

template <class T>
inline M3<T> rot_z(const T& a) {
  using std::cos;
  using std::sin;
  const T c = cos(a);
  const T s = sin(a);
  return {{{{c, -s, T(0.0)}, {s, c, T(0.0)}, {T(0.0), T(0.0), T(1.0)}}}};
}

template <class T>
struct LegPoints {
  V3<T> thigh_mid;  // relative to the hip center, torso frame
  V3<T> shin_mid;
  V3<T> foot;
};

template <class T>
LegPoints<T> leg_points(const T& roll, const T& pitch, const T& knee, double side,
                        const BipedParams& p) {
  const M3<T> rr = rot_x(roll);
  const M3<T> rp = rot_y(pitch);
  const M3<T> rk = rot_y(knee);
  const V3<T> offset{T(0.0), T(side * 0.5 * p.W), T(0.0)};
  const V3<T> thigh_half{T(0.0), T(0.0), T(-0.5 * p.L2)};
  const V3<T> thigh{T(0.0), T(0.0), T(-p.L2)};
  const V3<T> shin_half{T(0.0), T(0.0), T(-0.5 * p.L1)};
  const V3<T> shin{T(0.0), T(0.0), T(-p.L1)};
  return {rr * (offset + rp * thigh_half), rr * (offset + rp * (thigh + rk * shin_half)),
          rr * (offset + rp * (thigh + rk * shin))};
}

template <class T>
struct Chain {
  M3<T> torso;  // R_T
  V3<T> hip;
  V3<T> torso_com;
  V3<T> stance_thigh;
  V3<T> stance_shin;
  V3<T> swing_thigh;
  V3<T> swing_shin;
  V3<T> swing_foot;
  V3<T> foot_from_hip_yaw;  // r_FH in the yaw frame Y
};

template <class T>
Chain<T> evaluate_chain(const std::array<T, 9>& q, const BipedParams& p) {
  const M3<T> tilt = rot_x(q[1]) * rot_y(q[2]);
  const M3<T> torso = rot_z(q[0]) * tilt;
  const LegPoints<T> st = leg_points(-q[4], q[3], q[5], -1.0, p);
  const LegPoints<T> sw = leg_points(q[7], q[6], q[8], 1.0, p);

  Chain<T> c;
  c.torso = torso;
  c.hip = -(torso * st.foot);
  c.torso_com = c.hip + torso * V3<T>{T(0.0), T(0.0), T(p.mass.torso_com_fraction * p.L3)};
  c.stance_thigh = c.hip + torso * st.thigh_mid;
  c.stance_shin = c.hip + torso * st.shin_mid;
  c.swing_thigh = c.hip + torso * sw.thigh_mid;
  c.swing_shin = c.hip + torso * sw.shin_mid;
  c.swing_foot = c.hip + torso * sw.foot;
  c.foot_from_hip_yaw = tilt * sw.foot;
  return c;
}

}  // namespace gaitlab::biped::detail
