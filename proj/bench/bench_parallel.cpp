// Serial reference against the OpenMP path for the batch kernels. Each
// benchmark takes the execution mode as its argument (0 serial, 1 OpenMP).

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "gaitlab/biped_analysis.hpp"
#include "gaitlab/jacobian.hpp"
#include "gaitlab/lip.hpp"
#include "gaitlab/lip_analysis.hpp"
#include "gaitlab/parallel.hpp"

namespace {

using namespace gaitlab;

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::kSerial : Execution::kParallel;
}

void label(benchmark::State& state) {
  state.SetLabel(state.range(0) == 0 ? "serial" : "openmp x" + std::to_string(max_threads()));
}

void BM_LipJacobian(benchmark::State& state) {
  const lip::LipParams p;
  const Eigen::VectorXd x = lip::section_vector(lip::analytic_fixed_point(p, 1.0));
  const VectorMap f = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return lip::section_vector(lip::poincare_map(lip::section_coords(v, p), p));
  };
  for (auto _ : state) benchmark::DoNotOptimize(numeric_jacobian(f, x, 1e-6, mode(state)));
  label(state);
}

// A dense sweep of the LIP step map, the shape of the lambda-sweep command.
void BM_LambdaSweep(benchmark::State& state) {
  constexpr int kSide = 24;
  std::vector<double> out(kSide * kSide);
  for (auto _ : state) {
    for_each_index(out.size(), mode(state), [&](std::size_t i) {
      lip::LipParams p;
      p.x0 = 0.10 + 0.004 * static_cast<double>(i % kSide);
      p.y0 = 0.15 + 0.004 * static_cast<double>(i / kSide);
      const Eigen::VectorXd x = lip::section_vector(lip::analytic_fixed_point(p, 1.0));
      const VectorMap f = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        return lip::section_vector(lip::poincare_map(lip::section_coords(v, p), p));
      };
      out[i] = numeric_jacobian(f, x, 1e-6)(1, 1);
    });
    benchmark::DoNotOptimize(out.data());
  }
  label(state);
}

void BM_BipedJacobian(benchmark::State& state) {
  const biped::BipedParams p;
  const biped::ControlConfig c;
  const IntegratorConfig ic;
  const biped::Reduced x(0.5592034457, 0.2137014846, 0.3078236838, 0.9489835275);
  const VectorMap f = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return biped::restricted_poincare(v, c, p, ic);
  };
  for (auto _ : state) benchmark::DoNotOptimize(numeric_jacobian(f, x, 1e-5, mode(state)));
  label(state);
}

}  // namespace

BENCHMARK(BM_LipJacobian)->Arg(0)->Arg(1);
BENCHMARK(BM_LambdaSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BipedJacobian)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
