#include "gaitlab/hybrid.hpp"

namespace gaitlab {

HybridTrace run_hybrid(const HybridModel& model, const State& initial_state, int n_steps,
                       const IntegratorConfig& config) {
  config.validate();
  if (n_steps < 0) throw Error(ErrorCode::kInvalidArgument, "n_steps must be non-negative");
  require_finite(initial_state, 0.0);

  HybridTrace trace;
  State x = initial_state;
  double t0 = 0.0;
  if (n_steps == 0) {
    trace.phases.push_back({{0.0, x}});
    return trace;
  }
  for (int step = 1; step <= n_steps; ++step) {
    Trajectory phase;
    try {
      const GuardEvent ev = locate_guard_crossing(model.propagate, model.guard, x, config, &phase);
      for (auto& s : phase) s.t += t0;
      trace.phases.push_back(std::move(phase));
      phase.clear();
      State post = model.reset(ev.state_at_crossing);
      require_finite(post, t0 + ev.time_of_crossing);
      t0 += ev.time_of_crossing;
      trace.events.push_back({t0, ev.state_at_crossing, post});
      x = std::move(post);
    } catch (const Error& e) {
      for (auto& s : phase) s.t += t0;
      if (!phase.empty()) trace.phases.push_back(std::move(phase));
      trace.failure = TraceFailure{e.code(), e.what(), step};
      break;
    }
  }
  return trace;
}

}  // namespace gaitlab
