#include <cmath>

#include <Eigen/Dense>
#include <catch_amalgamated.hpp>

#include "biped_oracle.hpp"
#include "gaitlab/biped.hpp"
#include "gaitlab/integrator.hpp"
#include "support.hpp"

using namespace gaitlab;
using namespace gaitlab::biped;
using testing::uniform;

namespace {

const BipedParams kParams{};

Vector9 random_q() { return testing::random_configuration(&testing::uniform); }

Vector9 random_qdot(double scale = 1.0) {
  Vector9 v;
  for (int i = 0; i < 9; ++i) v(i) = uniform(-scale, scale);
  return v;
}

// H = C(q, qdot) qdot + G(q) with Christoffel symbols of the first kind from
// central differences of D, and G from differences of the oracle potential.
Vector9 christoffel_bias(const Vector9& q, const Vector9& qd) {
  const double h = 1e-6;
  Matrix9 dd[9];
  Vector9 g;
  for (int k = 0; k < 9; ++k) {
    const Vector9 e = Vector9::Unit(k) * h;
    dd[k] = (mass_matrix(q + e, kParams) - mass_matrix(q - e, kParams)) / (2.0 * h);
    g(k) = (testing::oracle_potential(q + e, kParams) - testing::oracle_potential(q - e, kParams)) /
           (2.0 * h);
  }
  Vector9 c = Vector9::Zero();
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) {
      for (int k = 0; k < 9; ++k) {
        c(i) += 0.5 * (dd[k](i, j) + dd[j](i, k) - dd[i](j, k)) * qd(j) * qd(k);
      }
    }
  }
  return c + g;
}

double total_energy(const Vector9& q, const Vector9& qd) {
  return kinetic_energy(q, qd, kParams) + potential_energy(q, kParams);
}

}  // namespace

TEST_CASE("mass matrix is symmetric positive definite") {
  double min_eig = 1e300;
  for (int trial = 0; trial < 1000; ++trial) {
    const Matrix9 d = mass_matrix(random_q(), kParams);
    REQUIRE((d - d.transpose()).norm() <= 1e-10);
    Eigen::SelfAdjointEigenSolver<Matrix9> es(d);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
  }
  CHECK(min_eig > 0.0);
}

TEST_CASE("mass matrix and energies match the finite-difference oracle") {
  for (int trial = 0; trial < 40; ++trial) {
    const Vector9 q = random_q();
    const Vector9 qd = random_qdot();
    const Matrix9 d = mass_matrix(q, kParams);
    const Matrix9 ref = testing::oracle_mass_matrix(q, kParams);
    REQUIRE((d - ref).cwiseAbs().maxCoeff() <= 1e-6 * (1.0 + ref.cwiseAbs().maxCoeff()));
    REQUIRE(kinetic_energy(q, qd, kParams) == Catch::Approx(0.5 * qd.dot(d * qd)).epsilon(1e-12));
    REQUIRE(std::abs(kinetic_energy(q, qd, kParams) - testing::oracle_kinetic(q, qd, kParams)) <=
            1e-7 * (1.0 + kinetic_energy(q, qd, kParams)));
    REQUIRE(std::abs(potential_energy(q, kParams) - testing::oracle_potential(q, kParams)) <= 1e-12);
  }
}

TEST_CASE("bias equals Christoffel terms plus gravity") {
  for (int trial = 0; trial < 40; ++trial) {
    const Vector9 q = random_q();
    const Vector9 qd = random_qdot(2.0);
    const Vector9 h = bias(q, qd, kParams);
    const Vector9 ref = christoffel_bias(q, qd);
    REQUIRE((h - ref).cwiseAbs().maxCoeff() <= 1e-5 * (1.0 + ref.cwiseAbs().maxCoeff()));
    REQUIRE((bias(q, Vector9::Zero(), kParams) - gravity_vector(q, kParams)).norm() <= 1e-12);
    const DynamicsTerms t = dynamics_terms(q, qd, kParams);
    REQUIRE((t.D - mass_matrix(q, kParams)).norm() <= 1e-12);
    REQUIRE((t.h - h).norm() <= 1e-12);
  }
}

TEST_CASE("underactuation: the torso coordinates receive no generalized force") {
  for (int trial = 0; trial < 50; ++trial) {
    const BipedState s{random_q(), random_qdot(), StanceLeg::kRight};
    Vector6 u;
    for (int i = 0; i < 6; ++i) u(i) = uniform(-50.0, 50.0);
    const Vector9 qdd = dynamics(s, u, kParams);
    const Vector9 lhs = mass_matrix(s.q, kParams) * qdd + bias(s.q, s.qdot, kParams);
    REQUIRE(lhs.head<3>().cwiseAbs().maxCoeff() <= 1e-9);
    REQUIRE((lhs.tail<6>() - u).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("gravity-only acceleration and the input map rank") {
  const BipedState s{random_q(), Vector9::Zero(), StanceLeg::kRight};
  const Vector9 qdd = dynamics(s, Vector6::Zero(), kParams);
  const Vector9 ref = -mass_matrix(s.q, kParams).ldlt().solve(gravity_vector(s.q, kParams));
  CHECK((qdd - ref).norm() <= 1e-10 * (1.0 + ref.norm()));

  Eigen::Matrix<double, 9, 6> dqdd_du;
  for (int i = 0; i < 6; ++i) {
    const Vector6 e = Vector6::Unit(i);
    dqdd_du.col(i) = (dynamics(s, e, kParams) - dynamics(s, -e, kParams)) / 2.0;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(dqdd_du);
  lu.setThreshold(1e-9);
  CHECK(lu.rank() == 6);
}

TEST_CASE("energies and dynamics do not depend on the yaw angle") {
  for (int trial = 0; trial < 200; ++trial) {
    const Vector9 q = random_q();
    const Vector9 qd = random_qdot();
    Vector9 q2 = q;
    q2(idx::kYaw) += uniform(-3.0, 3.0);
    REQUIRE(std::abs(kinetic_energy(q, qd, kParams) - kinetic_energy(q2, qd, kParams)) <= 1e-12);
    REQUIRE(std::abs(potential_energy(q, kParams) - potential_energy(q2, kParams)) <= 1e-12);
    Vector6 u;
    for (int i = 0; i < 6; ++i) u(i) = uniform(-20.0, 20.0);
    const Vector9 a = dynamics({q, qd, StanceLeg::kRight}, u, kParams);
    const Vector9 b = dynamics({q2, qd, StanceLeg::kRight}, u, kParams);
    REQUIRE((a - b).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + a.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("passive motion conserves energy") {
  Vector9 q;
  q << 0.2, 0.05, 0.1, 0.3, 0.02, 0.4, -0.2, 0.03, 0.5;
  Vector9 qd;
  qd << 0.3, -0.2, 0.4, 0.5, -0.1, 0.2, -0.6, 0.1, 0.3;
  const VectorField f = [](double, const State& x) -> State {
    const BipedState s{x.head<9>(), x.tail<9>(), StanceLeg::kRight};
    State d(18);
    d << s.qdot, dynamics(s, Vector6::Zero(), kParams);
    return d;
  };
  State x0(18);
  x0 << q, qd;
  IntegratorConfig c;
  c.step_size = 1e-4;
  const Trajectory tr = integrate_fixed_step(f, x0, 0.5, c);
  const double e0 = total_energy(q, qd);
  double worst = 0.0;
  for (const auto& s : tr) {
    worst = std::max(worst, std::abs(total_energy(s.x.head<9>(), s.x.tail<9>()) - e0));
  }
  CHECK(worst / std::abs(e0) <= 1e-6);
  // The motion is not trivial: the configuration moved.
  CHECK((tr.back().x.head<9>() - q).norm() > 0.1);
}
