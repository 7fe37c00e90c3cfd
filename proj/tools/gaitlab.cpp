// gaitlab command line runner: simulations and Poincare analyses of the
// pendulum and biped models, written out as CSV and JSON.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gaitlab/biped_analysis.hpp"
#include "gaitlab/error.hpp"
#include "gaitlab/hybrid.hpp"
#include "gaitlab/io.hpp"
#include "gaitlab/jacobian.hpp"
#include "gaitlab/lip_analysis.hpp"
#include "gaitlab/parallel.hpp"

namespace {

using namespace gaitlab;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitGaitFailure = 2;
constexpr int kExitInvalidConfig = 3;

const std::vector<std::string> kStepHeader{"n", "alpha", "gamma", "thetadot_y", "v"};

struct Options {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<int> steps;
  std::optional<std::uint64_t> seed;
};

struct Context {
  io::ExperimentConfig cfg;
  fs::path out;
  bool steps_overridden = false;

  void write(const std::string& name, const std::string& text) const {
    io::write_file((out / name).string(), text);
    std::cout << "wrote " << (out / name).string() << "\n";
  }
};

// Uniform draw in [-1, 1) built from the raw 64-bit engine output so that
// the value does not depend on the standard library's distributions.
double symmetric_unit(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

std::vector<double> step_row(int n, double alpha, double gamma, double yaw_rate, double v) {
  return {static_cast<double>(n), alpha, gamma, yaw_rate, v};
}

int lip_sim(const Context& ctx) {
  const auto& c = ctx.cfg;
  lip::LipState start = lip::synchronized_start(c.lip, c.lip_analysis.k0);
  if (c.lip_sim_perturbation > 0.0) {
    std::mt19937_64 rng(c.seed);
    const double delta =
        symmetric_unit(rng) * c.lip_sim_perturbation * c.lip.omega_squared() * c.lip.x0 * c.lip.y0;
    start.ydot += delta / start.xdot;
  }
  const HybridTrace trace =
      run_hybrid(lip::make_hybrid_model(c.lip), start.to_vector(), c.steps, c.integrator);

  std::vector<std::vector<double>> rows;
  io::Json events = io::Json::array();
  for (std::size_t k = 0; k < trace.events.size(); ++k) {
    const auto& e = trace.events[k];
    const lip::LipState pre = lip::LipState::from_vector(e.pre_impact);
    const lip::LipState post = lip::LipState::from_vector(e.post_impact);
    const lip::SwitchCoords sc = lip::to_switch_coords(pre);
    rows.push_back(step_row(static_cast<int>(k) + 1, sc.alpha, sc.gamma, 0.0, sc.v));
    events.push_back({{"n", k + 1},
                      {"time", e.time},
                      {"pre_impact", {pre.x, pre.y, pre.xdot, pre.ydot}},
                      {"post_impact", {post.x, post.y, post.xdot, post.ydot}},
                      {"kinetic_energy", lip::kinetic_energy(post)},
                      {"sync_measure", lip::sync_measure(post, c.lip)}});
  }
  io::Json summary;
  summary["initial_state"] = {start.x, start.y, start.xdot, start.ydot};
  summary["initial_sync_measure"] = lip::sync_measure(start, c.lip);
  summary["events"] = events;
  summary["failure"] = trace.failure ? io::Json{{"code", std::string(to_string(trace.failure->code))},
                                                {"message", trace.failure->message},
                                                {"step", trace.failure->step}}
                                     : io::Json(nullptr);
  ctx.write("lip_sim_steps.csv", io::csv(kStepHeader, rows));
  ctx.write("lip_sim.json", io::dump(summary));
  if (trace.failure) {
    std::cerr << "gait failure at step " << trace.failure->step << ": " << trace.failure->message
              << "\n";
    return kExitGaitFailure;
  }
  return kExitOk;
}

int lip_poincare(const Context& ctx) {
  const auto& c = ctx.cfg;
  lip::LipPoincareOptions opt = c.lip_analysis;
  if (ctx.steps_overridden) opt.convergence_steps = std::max(1, c.steps);
  const lip::LipPoincareReport rep = lip::poincare_report(c.lip, c.integrator, opt);

  std::vector<std::vector<double>> rows;
  for (const auto& r : rep.convergence) rows.push_back(step_row(r.n, r.alpha, r.gamma, 0.0, r.v));
  std::vector<std::vector<double>> ratios;
  for (std::size_t i = 0; i < rep.ratios.size(); ++i) {
    ratios.push_back({static_cast<double>(i), rep.ratios[i]});
  }
  ctx.write("lip_poincare.json", io::dump(io::to_json(rep)));
  ctx.write("lip_convergence.csv", io::csv(kStepHeader, rows));
  ctx.write("lip_ratios.csv", io::csv({"n", "ratio"}, ratios));
  return kExitOk;
}

int lambda_sweep(const Context& ctx) {
  const auto& c = ctx.cfg;
  struct Point {
    double x0, y0, k0;
  };
  std::vector<Point> grid;
  for (double x0 : c.sweep.x0) {
    for (double y0 : c.sweep.y0) {
      for (double k0 : c.sweep.k0) grid.push_back({x0, y0, k0});
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<double>> rows(grid.size());
  const Execution ex = c.parallel ? Execution::kParallel : Execution::kSerial;
  // Rows are filled by index, so the file order is the grid order whatever
  // the thread schedule.
  for_each_index(grid.size(), ex, [&](std::size_t i) {
    const Point& g = grid[i];
    lip::LipParams p = c.lip;
    p.x0 = g.x0;
    p.y0 = g.y0;
    std::vector<double> row{g.x0, g.y0, g.k0, nan, nan, nan, 0.0};
    if (g.k0 > p.omega_squared() * g.x0 * g.y0) {
      try {
        const double lambda = lip::analytic_lambda(p, g.k0);
        const lip::SwitchCoords fp = lip::analytic_fixed_point(p, g.k0);
        const VectorMap map = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
          return lip::section_vector(
              lip::poincare_map(lip::section_coords(x, p), p, c.integrator));
        };
        const Eigen::MatrixXd jac =
            numeric_jacobian(map, lip::section_vector(fp), c.lip_analysis.fd_step);
        const double numeric = -jac(1, 1);
        row = {g.x0, g.y0, g.k0, lambda, numeric, std::abs(lambda - numeric), 1.0};
      } catch (const Error&) {
        // The point stays flagged as infeasible.
      }
    }
    rows[i] = row;
  });
  ctx.write("lambda_sweep.csv",
            io::csv({"x0", "y0", "K0", "lambda_analytic", "lambda_numeric", "abs_diff", "feasible"},
                    rows));
  return kExitOk;
}

biped::Reduced reduced_of(const biped::BipedState& s, const biped::BipedParams& p) {
  return biped::reduced_coords(s, p);
}

int biped_sim(const Context& ctx) {
  const auto& c = ctx.cfg;
  const biped::Reduced start = biped::lip_seed(c.control, c.biped);
  biped::BipedState pre = biped::lift_to_full_state(start, c.control.gait, c.biped);

  std::vector<std::vector<double>> rows;
  std::vector<std::vector<double>> samples;
  io::Json steps = io::Json::array();
  const biped::Reduced x0 = reduced_of(pre, c.biped);
  rows.push_back(step_row(0, x0(0), x0(1), x0(2), x0(3)));
  double t_offset = 0.0;
  std::optional<std::string> failure;
  int failed_step = 0;
  for (int n = 1; n <= c.steps; ++n) {
    try {
      const biped::BipedState post = biped::impact_map(pre, c.biped, 1e-8);
      Trajectory traj;
      const biped::StepResult r = biped::closed_loop_step(post, c.control, c.biped, c.integrator, &traj);
      for (const auto& smp : traj) {
        std::vector<double> row{static_cast<double>(n), t_offset + smp.t};
        for (long i = 0; i < smp.x.size(); ++i) row.push_back(smp.x(i));
        samples.push_back(std::move(row));
      }
      t_offset += r.duration;
      pre = r.pre_impact;
      const biped::Reduced x = reduced_of(pre, c.biped);
      rows.push_back(step_row(n, x(0), x(1), x(2), x(3)));
      steps.push_back({{"n", n},
                       {"duration", r.duration},
                       {"invariance_residual", r.invariance_residual},
                       {"pre_impact", io::to_json(r.pre_impact)}});
    } catch (const Error& e) {
      failure = e.what();
      failed_step = n;
      break;
    }
  }
  std::vector<std::string> header{"step", "t"};
  for (const char* prefix : {"q", "qdot"}) {
    for (int i = 0; i < 9; ++i) header.push_back(std::string(prefix) + std::to_string(i));
  }
  io::Json summary;
  summary["initial_reduced"] = {start(0), start(1), start(2), start(3)};
  summary["steps"] = steps;
  summary["failure"] =
      failure ? io::Json{{"message", *failure}, {"step", failed_step}} : io::Json(nullptr);
  ctx.write("biped_sim_steps.csv", io::csv(kStepHeader, rows));
  ctx.write("biped_sim_trajectory.csv", io::csv(header, samples));
  ctx.write("biped_sim.json", io::dump(summary));
  if (failure) {
    std::cerr << "gait failure at step " << failed_step << ": " << *failure << "\n";
    return kExitGaitFailure;
  }
  return kExitOk;
}

int biped_poincare(const Context& ctx) {
  const auto& c = ctx.cfg;
  biped::StabilityOptions stab = c.stability;
  if (ctx.steps_overridden) stab.sequence_steps = std::max(1, c.steps);
  std::mt19937_64 rng(c.seed);
  for (int i = 0; i < 4; ++i) stab.perturbation_direction(i) = symmetric_unit(rng) < 0.0 ? -1.0 : 1.0;

  const biped::Reduced seed = biped::lip_seed(c.control, c.biped);
  const biped::FixedPointResult fp =
      biped::find_fixed_point(seed, c.control, c.biped, c.integrator, c.fixed_point);
  const biped::BipedPoincareReport rep =
      biped::stability_report(fp.point, c.control, c.biped, c.integrator, stab);

  io::Json j = io::to_json(rep);
  j["seed_point"] = {seed(0), seed(1), seed(2), seed(3)};
  j["newton_iterations"] = fp.iterations;
  j["fallback_iterations"] = fp.fallback_iterations;
  j["residual_history"] = fp.residual_history;
  j["perturbation_direction"] = {stab.perturbation_direction(0), stab.perturbation_direction(1),
                                 stab.perturbation_direction(2), stab.perturbation_direction(3)};
  if (c.yaw_check && !rep.failure) {
    j["yaw_period"] = io::to_json(biped::yaw_period_check(fp.point, c.control, c.biped, c.integrator));
  }

  std::vector<std::vector<double>> seq;
  for (const auto& s : rep.step_sequence) seq.push_back(step_row(s.n, s.x(0), s.x(1), s.x(2), s.x(3)));
  std::vector<std::vector<double>> spec;
  for (std::size_t i = 0; i < rep.spectrum.size(); ++i) {
    const auto z = rep.spectrum[i];
    spec.push_back({static_cast<double>(i), z.real(), z.imag(), std::abs(z)});
  }
  ctx.write("biped_poincare.json", io::dump(j));
  ctx.write("biped_sequence.csv", io::csv(kStepHeader, seq));
  ctx.write("biped_spectrum.csv", io::csv({"index", "re", "im", "modulus"}, spec));
  if (rep.failure) {
    std::cerr << "gait failure during the step sequence: " << rep.failure->message << "\n";
    return kExitGaitFailure;
  }
  return kExitOk;
}

bool is_config_error(ErrorCode code) {
  return code == ErrorCode::kConfigParse || code == ErrorCode::kInvalidArgument ||
         code == ErrorCode::kInfeasibleEnergy;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gaitlab: discrete-invariant gaits of the 3D LIP and a 9-DOF biped"};
  app.require_subcommand(1, 1);
  Options opt;

  using Command = int (*)(const Context&);
  const std::vector<std::pair<std::string, std::pair<std::string, Command>>> commands{
      {"lip-sim", {"simulate pendulum steps from a synchronized start", lip_sim}},
      {"lip-poincare", {"pendulum Poincare map, Jacobian and convergence", lip_poincare}},
      {"lambda-sweep", {"analytic vs numeric lambda over a parameter grid", lambda_sweep}},
      {"biped-sim", {"closed-loop biped walking from the pendulum seed", biped_sim}},
      {"biped-poincare", {"biped fixed point, spectrum and step sequence", biped_poincare}},
  };
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", opt.config_path, "JSON configuration file");
    sub->add_option("--out", opt.out_dir, "output directory (created if missing)");
    sub->add_option("--steps", opt.steps, "number of steps");
    sub->add_option("--seed", opt.seed, "seed for random perturbations");
    subs.emplace_back(sub, entry.second);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalidConfig;
  }

  Context ctx;
  try {
    if (!opt.config_path.empty()) ctx.cfg = io::load_config(opt.config_path);
    if (opt.steps) {
      if (*opt.steps < 0) throw Error(ErrorCode::kInvalidArgument, "--steps must be non-negative");
      ctx.cfg.steps = *opt.steps;
      ctx.steps_overridden = true;
    }
    if (opt.seed) ctx.cfg.seed = *opt.seed;
    ctx.cfg.validate();
    ctx.out = opt.out_dir;
    fs::create_directories(ctx.out);
  } catch (const Error& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "invalid output directory: " << e.what() << "\n";
    return kExitInvalidConfig;
  }

  for (const auto& [sub, run] : subs) {
    if (!sub->parsed()) continue;
    try {
      return run(ctx);
    } catch (const Error& e) {
      std::cerr << e.what() << "\n";
      return is_config_error(e.code()) ? kExitInvalidConfig : kExitGaitFailure;
    }
  }
  return kExitInvalidConfig;
}
