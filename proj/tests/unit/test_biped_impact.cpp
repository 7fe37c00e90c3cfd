#include <cmath>

#include <catch_amalgamated.hpp>

#include "biped_oracle.hpp"
#include "gaitlab/biped.hpp"
#include "gaitlab/biped_analysis.hpp"
#include "gaitlab/error.hpp"
#include "support.hpp"

using namespace gaitlab;
using namespace gaitlab::biped;
using testing::uniform;

namespace {

const BipedParams kParams{};
const GaitSpec kGait{};

Vector9 random_qdot(double scale = 1.0) {
  Vector9 v;
  for (int i = 0; i < 9; ++i) v(i) = uniform(-scale, scale);
  return v;
}

// A state on the switching surface with arbitrary velocities.
BipedState random_pre_impact() {
  const Reduced xr(uniform(0.4, 0.8), uniform(0.1, 0.3), uniform(-0.3, 0.3), uniform(0.9, 1.3));
  BipedState s = lift_to_full_state(xr, kGait, kParams, uniform(-1.0, 1.0));
  s.qdot += random_qdot(0.5);
  return s;
}

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("contact solve: foot velocity, energy and projection") {
  for (int trial = 0; trial < 200; ++trial) {
    const BipedState pre = random_pre_impact();
    const Vector9 plus = impact_velocity(pre.q, pre.qdot, kParams);
    const Matrix3x9 j = swing_foot_jacobian(pre.q, kParams);
    REQUIRE((j * plus).cwiseAbs().maxCoeff() <= 1e-10);
    REQUIRE(kinetic_energy(pre.q, plus, kParams) <= kinetic_energy(pre.q, pre.qdot, kParams) + 1e-12);
    REQUIRE((impact_velocity(pre.q, plus, kParams) - plus).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("contact solve does not depend on yaw") {
  for (int trial = 0; trial < 100; ++trial) {
    const BipedState pre = random_pre_impact();
    Vector9 q2 = pre.q;
    q2(idx::kYaw) += uniform(-2.0, 2.0);
    const Vector9 a = impact_velocity(pre.q, pre.qdot, kParams);
    const Vector9 b = impact_velocity(q2, pre.qdot, kParams);
    REQUIRE((a - b).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("relabeling swaps the legs and mirrors y") {
  const Matrix9 r = relabel_matrix();
  CHECK((r * r - Matrix9::Identity()).norm() == 0.0);
  Vector9 q;
  q << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  Vector9 expected;
  expected << -1, -2, 3, 7, 8, 9, 4, 5, 6;
  CHECK(r * q == expected);
  const BipedState s{q, q, StanceLeg::kRight};
  const BipedState t = relabel(s);
  CHECK(t.stance_leg == StanceLeg::kLeft);
  CHECK(t.q == expected);
  CHECK(t.qdot == expected);
}

TEST_CASE("impact map: the new swing foot starts on the ground at rest") {
  for (int trial = 0; trial < 100; ++trial) {
    const BipedState pre = random_pre_impact();
    const BipedState post = impact_map(pre, kParams);
    REQUIRE(post.stance_leg == other(pre.stance_leg));
    // The old stance foot, now the swing foot, is on the ground and still.
    REQUIRE(std::abs(swing_foot_height(post.q, kParams)) <= 1e-10);
    REQUIRE((swing_foot_jacobian(post.q, kParams) * post.qdot).cwiseAbs().maxCoeff() <= 1e-9);
    // Mirroring is an isometry, so energy is the contact-solve energy.
    const Vector9 plus = impact_velocity(pre.q, pre.qdot, kParams);
    REQUIRE(std::abs(kinetic_energy(post.q, post.qdot, kParams) - kinetic_energy(pre.q, plus, kParams)) <=
            1e-10);
    // The new stance hip sits at (-x0, y0) relative to the new stance foot.
    const Kinematics k = forward_kinematics(post.q, kParams);
    REQUIRE(std::abs(k.hip_yaw.x() + kGait.x0) <= 1e-9);
    REQUIRE(std::abs(k.hip_yaw.y() - kGait.y0) <= 1e-9);
  }
}

TEST_CASE("impact map rejects states off the switching surface") {
  BipedState s;
  s.q(idx::kSwingKnee) = 1.0;  // foot in the air
  CHECK(code_of([&] { impact_map(s, kParams); }) == ErrorCode::kNotOnGuard);
}

TEST_CASE("velocity identity between the yaw frame and the inertial frame") {
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Vector9 q = testing::random_configuration(&testing::uniform);
    const BipedState s{q, random_qdot(), StanceLeg::kRight};
    const QuasiState qs = to_quasi(s, kParams);
    const Kinematics k = forward_kinematics(q, kParams);
    const double lhs = qs.hip_yaw.dot(qs.hip_velocity_yaw);
    const double rhs = k.hip.dot(qs.hip_velocity_inertial);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("quasi-velocities against differentiated oracle positions") {
  for (int trial = 0; trial < 100; ++trial) {
    const Vector9 q = testing::random_configuration(&testing::uniform);
    const Vector9 qd = random_qdot();
    const QuasiState qs = to_quasi({q, qd, StanceLeg::kRight}, kParams);
    const double h = 1e-6;
    const auto in_yaw = [&](const Vector9& qq) {
      const testing::OraclePoints o = testing::oracle_points(qq, kParams);
      const Eigen::Matrix3d rz = testing::axis_rot(q(0), Eigen::Vector3d::UnitZ());
      return std::pair{rz.transpose() * o.hip, rz.transpose() * (o.swing_foot - o.hip)};
    };
    // Yaw-frame velocities use the frame at the current yaw (not differentiated).
    const auto [hp, fp] = in_yaw(q + h * qd);
    const auto [hm, fm] = in_yaw(q - h * qd);
    const Eigen::Vector3d v = (hp - hm) / (2.0 * h);
    REQUIRE((qs.hip_velocity_yaw - v).norm() <= 1e-8);

    // Swing-foot rates are derivatives of the yaw-frame coordinates.
    const auto rel = [&](const Vector9& qq) {
      const testing::OraclePoints o = testing::oracle_points(qq, kParams);
      const Eigen::Matrix3d rz = testing::axis_rot(qq(0), Eigen::Vector3d::UnitZ());
      return Eigen::Vector3d(rz.transpose() * (o.swing_foot - o.hip));
    };
    const Eigen::Vector3d fdot = (rel(q + h * qd) - rel(q - h * qd)) / (2.0 * h);
    REQUIRE(std::abs(qs.zeta(6) - fdot.x()) <= 1e-8);
    REQUIRE(std::abs(qs.zeta(7) - fdot.y()) <= 1e-8);
    REQUIRE(std::abs(qs.zeta(8) + fdot.z()) <= 1e-8);

    // Chart entries reproduce the task-space quantities.
    const testing::OraclePoints o = testing::oracle_points(q, kParams);
    const Eigen::Vector3d hip_y = testing::axis_rot(q(0), Eigen::Vector3d::UnitZ()).transpose() * o.hip;
    REQUIRE(std::abs(qs.r() - std::hypot(hip_y.x(), hip_y.y())) <= 1e-12);
    REQUIRE(std::abs(qs.alpha() - std::atan(hip_y.x() / hip_y.y())) <= 1e-12);
    REQUIRE(std::abs(qs.xi(5) - hip_y.z()) <= 1e-12);
    REQUIRE(std::abs(qs.xi(8) - (o.hip.z() - o.swing_foot.z())) <= 1e-12);
    REQUIRE(std::abs(qs.v() - std::hypot(v.x(), v.y())) <= 1e-8);
    REQUIRE(std::abs(qs.gamma() - v.x() * v.y()) <= 1e-8);
    REQUIRE(std::abs(qs.gamma()) <= 0.5 * qs.v() * qs.v() + 1e-12);
  }
}

TEST_CASE("reduced coordinates ignore the yaw angle") {
  for (int trial = 0; trial < 100; ++trial) {
    const Vector9 q = testing::random_configuration(&testing::uniform);
    const Vector9 qd = random_qdot();
    Vector9 q2 = q;
    q2(idx::kYaw) += uniform(-3.0, 3.0);
    const Reduced a = reduced_coords({q, qd, StanceLeg::kRight}, kParams);
    const Reduced b = reduced_coords({q2, qd, StanceLeg::kRight}, kParams);
    REQUIRE((a - b).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("vertical hip velocity on the invariant impact surface") {
  for (int trial = 0; trial < 100; ++trial) {
    const Reduced xr(uniform(0.4, 0.8), uniform(0.1, 0.3), uniform(-0.3, 0.3), uniform(0.9, 1.3));
    const BipedState s = lift_to_full_state(xr, kGait, kParams, uniform(-1.0, 1.0));
    const QuasiState qs = to_quasi(s, kParams);
    const Eigen::Vector3d& h = qs.hip_yaw;
    const Eigen::Vector3d& v = qs.hip_velocity_yaw;
    REQUIRE(std::abs(s.qdot(idx::kStanceKnee)) <= 1e-12);
    REQUIRE(std::abs(v.z() + (h.x() * v.x() + h.y() * v.y()) / kGait.z0(kParams)) <= 1e-8);
  }
}

TEST_CASE("degenerate hip position is rejected") {
  // Stance roll chosen so that the hip is straight above the foot in y.
  Vector9 q = Vector9::Zero();
  q(idx::kStanceHipRoll) = -std::atan(0.125);
  CHECK(std::abs(forward_kinematics(q, kParams).hip.y()) <= 1e-15);
  CHECK(code_of([&] { to_quasi({q, Vector9::Zero(), StanceLeg::kRight}, kParams); }) ==
        ErrorCode::kDegenerateY);
}
