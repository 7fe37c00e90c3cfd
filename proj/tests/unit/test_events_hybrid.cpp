#include <cmath>

#include <catch_amalgamated.hpp>

#include "gaitlab/error.hpp"
#include "gaitlab/events.hpp"
#include "gaitlab/hybrid.hpp"
#include "gaitlab/lip.hpp"

using namespace gaitlab;

namespace {

State scalar(double v) {
  State x(1);
  x << v;
  return x;
}

const VectorField kUnitSpeed = [](double, const State&) -> State { return scalar(1.0); };

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

TEST_CASE("linear motion crosses x = 1 at t = 2") {
  const GuardFunction g = [](const State& x) { return x(0) - 1.0; };
  const GuardEvent ev = locate_guard_crossing(kUnitSpeed, g, scalar(-1.0), IntegratorConfig{});
  CHECK(std::abs(ev.time_of_crossing - 2.0) <= 1e-9);
  CHECK(std::abs(ev.guard_value_residual) <= 1e-10);
}

TEST_CASE("event location is bit-identical across calls") {
  const GuardFunction g = [](const State& x) { return x(0) * x(0) - 2.0; };
  const VectorField f = [](double t, const State& x) -> State { return scalar(1.0 + 0.1 * t + 0.0 * x(0)); };
  const GuardEvent a = locate_guard_crossing(f, g, scalar(0.0), IntegratorConfig{});
  const GuardEvent b = locate_guard_crossing(f, g, scalar(0.0), IntegratorConfig{});
  CHECK(a.time_of_crossing == b.time_of_crossing);
  CHECK(a.state_at_crossing(0) == b.state_at_crossing(0));
}

TEST_CASE("a start on the surface does not re-trigger") {
  // x starts exactly on the guard, moves away and comes back up through it.
  const VectorField f = [](double t, const State&) -> State { return scalar(-1.0 + t); };
  const GuardFunction g = [](const State& x) { return x(0); };
  const GuardEvent ev = locate_guard_crossing(f, g, scalar(0.0), IntegratorConfig{});
  // x(t) = -t + t^2/2 returns to zero at t = 2.
  CHECK(std::abs(ev.time_of_crossing - 2.0) <= 1e-8);
}

TEST_CASE("guards that never arm or never cross are errors") {
  const GuardFunction positive = [](const State& x) { return x(0) + 5.0; };
  CHECK(code_of([&] { locate_guard_crossing(kUnitSpeed, positive, scalar(0.0), IntegratorConfig{}); }) ==
        ErrorCode::kNotArmed);

  const GuardFunction far = [](const State& x) { return x(0) - 100.0; };
  CHECK(code_of([&] { locate_guard_crossing(kUnitSpeed, far, scalar(0.0), IntegratorConfig{}); }) ==
        ErrorCode::kNoCrossing);
}

TEST_CASE("positive-to-negative transitions do not fire") {
  // x(t) = 2 - 2t + t^2/2; g = x - 1 falls through zero at 2 - sqrt(2) and
  // rises through it at 2 + sqrt(2). Only the rising crossing counts.
  const VectorField f = [](double t, const State&) -> State { return scalar(-2.0 + t); };
  const GuardFunction g = [](const State& x) { return x(0) - 1.0; };
  const GuardEvent ev = locate_guard_crossing(f, g, scalar(2.0), IntegratorConfig{});
  CHECK(std::abs(ev.time_of_crossing - (2.0 + std::sqrt(2.0))) <= 1e-8);
}

TEST_CASE("samples end at the crossing") {
  const GuardFunction g = [](const State& x) { return x(0) - 1.0; };
  Trajectory tr;
  const GuardEvent ev = locate_guard_crossing(kUnitSpeed, g, scalar(-1.0), IntegratorConfig{}, &tr);
  REQUIRE(!tr.empty());
  CHECK(tr.back().t == ev.time_of_crossing);
  for (std::size_t i = 1; i < tr.size(); ++i) CHECK(tr[i].t > tr[i - 1].t);
}

TEST_CASE("LIP synchronized orbit: crossing of the switching circle is tight") {
  const lip::LipParams p;
  const lip::LipState s = lip::synchronized_start(p, 1.0);
  const HybridModel m = lip::make_hybrid_model(p);
  const GuardEvent ev = locate_guard_crossing(m.propagate, m.guard, s.to_vector(), IntegratorConfig{});
  CHECK(std::abs(ev.guard_value_residual) <= 1e-10);
  CHECK(std::abs(m.guard(ev.state_at_crossing)) <= 1e-10);
}

TEST_CASE("run_hybrid: zero steps, periodic orbit, and recorded failure") {
  const lip::LipParams p;
  const HybridModel m = lip::make_hybrid_model(p);
  const lip::LipState s = lip::synchronized_start(p, 1.0);

  const HybridTrace none = run_hybrid(m, s.to_vector(), 0, IntegratorConfig{});
  CHECK(none.ok());
  CHECK(none.events.empty());
  REQUIRE(none.phases.size() == 1);
  CHECK(none.phases.front().size() == 1);

  const HybridTrace five = run_hybrid(m, s.to_vector(), 5, IntegratorConfig{});
  REQUIRE(five.ok());
  REQUIRE(five.events.size() == 5);
  for (std::size_t k = 1; k < five.events.size(); ++k) {
    CHECK((five.events[k].pre_impact - five.events[0].pre_impact).norm() <= 1e-6);
    CHECK(five.events[k].time > five.events[k - 1].time);
  }
  for (const auto& e : five.events) CHECK((m.reset(e.pre_impact) - e.post_impact).norm() == 0.0);

  // Too little forward speed: the mass falls back before reaching the circle.
  lip::LipState slow{-p.x0, p.y0, 0.1, -0.05};
  const HybridTrace fail = run_hybrid(m, slow.to_vector(), 3, IntegratorConfig{});
  REQUIRE(fail.failure.has_value());
  CHECK(fail.failure->code == ErrorCode::kNoCrossing);
  CHECK(fail.failure->step == 1);
  CHECK(fail.events.empty());
}
