#include <cmath>
#include <limits>

#include <catch_amalgamated.hpp>

#include "gaitlab/error.hpp"
#include "gaitlab/integrator.hpp"

using namespace gaitlab;

namespace {

State scalar(double v) {
  State x(1);
  x << v;
  return x;
}

const VectorField kGrowth = [](double, const State& x) -> State { return x; };

double growth_error(double h) {
  IntegratorConfig c;
  c.step_size = h;
  const Trajectory tr = integrate_fixed_step(kGrowth, scalar(1.0), 1.0, c);
  return std::abs(tr.back().x(0) - std::exp(1.0));
}

}  // namespace

TEST_CASE("a constant field leaves the state unchanged") {
  const VectorField zero = [](double, const State& x) -> State { return State::Zero(x.size()); };
  State x0(3);
  x0 << 1.0, -2.0, 0.5;
  const Trajectory tr = integrate_fixed_step(zero, x0, 1.0, IntegratorConfig{});
  CHECK((tr.back().x - x0).norm() == 0.0);
}

TEST_CASE("x' = x integrates to e") {
  const Trajectory tr = integrate_fixed_step(kGrowth, scalar(1.0), 1.0, IntegratorConfig{});
  CHECK(std::abs(tr.back().x(0) - std::exp(1.0)) <= 1e-6);
  CHECK(tr.back().t == 1.0);
}

TEST_CASE("pendulum field reproduces cosh and sinh") {
  const VectorField lip = [](double, const State& x) -> State {
    State d(2);
    d << x(1), x(0);
    return d;
  };
  State x0(2);
  x0 << 1.0, 0.0;
  const Trajectory tr = integrate_fixed_step(lip, x0, 1.0, IntegratorConfig{});
  CHECK(std::abs(tr.back().x(0) - std::cosh(1.0)) <= 1e-6);
  CHECK(std::abs(tr.back().x(1) - std::sinh(1.0)) <= 1e-6);
}

TEST_CASE("halving the step reduces the error by the fourth-order factor") {
  for (double h : {0.1, 0.05, 0.025}) {
    const double ratio = growth_error(h) / growth_error(h / 2.0);
    CHECK(ratio >= 14.0);
  }
}

TEST_CASE("the final partial step lands on the requested duration") {
  IntegratorConfig c;
  c.step_size = 0.3;
  const Trajectory tr = integrate_fixed_step(kGrowth, scalar(1.0), 1.0, c);
  REQUIRE(tr.size() == 5);  // 0, 0.3, 0.6, 0.9, 1.0
  CHECK(tr.back().t == 1.0);
  CHECK(tr[3].t == Catch::Approx(0.9));
}

TEST_CASE("zero duration returns only the initial sample") {
  const Trajectory tr = integrate_fixed_step(kGrowth, scalar(2.0), 0.0, IntegratorConfig{});
  REQUIRE(tr.size() == 1);
  CHECK(tr.front().x(0) == 2.0);
}

TEST_CASE("non-finite states are reported") {
  const VectorField blow_up = [](double, const State& x) -> State {
    return scalar(x(0) > 10.0 ? std::numeric_limits<double>::infinity() : 1.0);
  };
  try {
    integrate_fixed_step(blow_up, scalar(0.0), 20.0, IntegratorConfig{});
    FAIL("expected NonFiniteState");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonFiniteState);
  }
}

TEST_CASE("integrator config validation") {
  IntegratorConfig c;
  CHECK_NOTHROW(c.validate());
  c.event_tolerance = 1e-5;  // larger than the arming threshold
  CHECK_THROWS_AS(c.validate(), Error);
  c = IntegratorConfig{};
  c.step_size = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
}
