#include "gaitlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "gaitlab/error.hpp"

namespace gaitlab::io {
namespace {

[[noreturn]] void parse_error(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kConfigParse, where + ": " + what);
}

// Reads typed members out of one JSON object and remembers which keys were
// consumed, so that leftovers (usually typos) can be rejected.
class Section {
 public:
  Section(const Json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) parse_error(name_, "expected an object");
  }

  void number(const char* key, double& out) {
    if (const Json* v = find(key)) {
      if (!v->is_number()) parse_error(path(key), "expected a number");
      out = v->get<double>();
    }
  }

  void integer(const char* key, int& out) {
    if (const Json* v = find(key)) {
      if (!v->is_number_integer()) parse_error(path(key), "expected an integer");
      out = v->get<int>();
    }
  }

  void unsigned64(const char* key, std::uint64_t& out) {
    if (const Json* v = find(key)) {
      if (!v->is_number_unsigned()) parse_error(path(key), "expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }

  void boolean(const char* key, bool& out) {
    if (const Json* v = find(key)) {
      if (!v->is_boolean()) parse_error(path(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void list(const char* key, std::vector<double>& out) {
    if (const Json* v = find(key)) {
      if (!v->is_array() || v->empty()) parse_error(path(key), "expected a non-empty array");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number()) parse_error(path(key), "expected numbers");
        out.push_back(e.get<double>());
      }
    }
  }

  // A fixed-length vector given either as an array or as one scalar that is
  // broadcast to every component.
  template <class Vec>
  void vector(const char* key, Vec& out) {
    const Json* v = find(key);
    if (!v) return;
    if (v->is_number()) {
      out.setConstant(v->get<double>());
      return;
    }
    if (!v->is_array() || static_cast<long>(v->size()) != out.size()) {
      std::ostringstream os;
      os << "expected a number or an array of " << out.size() << " numbers";
      parse_error(path(key), os.str());
    }
    for (long i = 0; i < out.size(); ++i) {
      if (!(*v)[i].is_number()) parse_error(path(key), "expected numbers");
      out(i) = (*v)[i].get<double>();
    }
  }

  // Child object, or nullptr when absent.
  const Json* child(const char* key) { return find(key); }

  std::string path(const char* key) const { return name_.empty() ? key : name_ + "." + key; }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!used_.count(item.key())) parse_error(path(item.key().c_str()), "unknown key");
    }
  }

 private:
  const Json* find(const char* key) {
    used_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const Json& j_;
  std::string name_;
  std::set<std::string> used_;
};

template <class F>
void with_section(Section& parent, const char* key, F&& f) {
  if (const Json* v = parent.child(key)) {
    Section s(*v, parent.path(key));
    f(s);
    s.finish();
  }
}

Json vec_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  Json a = Json::array();
  for (long i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json matrix_json(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  Json a = Json::array();
  for (long i = 0; i < m.rows(); ++i) {
    for (long k = 0; k < m.cols(); ++k) a.push_back(m(i, k));
  }
  return a;
}

}  // namespace

void ExperimentConfig::validate() const {
  lip.validate();
  biped.validate();
  control.validate(biped);
  integrator.validate();
  if (steps < 0) throw Error(ErrorCode::kInvalidArgument, "steps must be non-negative");
  if (!(lip_analysis.k0 > 0.0) || !(lip_analysis.fd_step > 0.0) ||
      lip_analysis.convergence_steps < 1) {
    throw Error(ErrorCode::kInvalidArgument, "lip analysis settings out of range");
  }
  if (!(fixed_point.tolerance > 0.0) || fixed_point.max_iterations < 1 ||
      !(fixed_point.fd_step > 0.0) || fixed_point.warmup_iterations < 0 ||
      !(fixed_point.max_step > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "fixed point settings out of range");
  }
  if (!(stability.fd_step > 0.0) || stability.sequence_steps < 1 ||
      !(stability.invariance_tolerance > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "stability settings out of range");
  }
  if (!(lip_sim_perturbation >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "lip_sim perturbation must be non-negative");
  }
  for (const auto* v : {&sweep.x0, &sweep.y0, &sweep.k0}) {
    for (double x : *v) {
      if (!(x > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sweep values must be positive");
    }
  }
}

ExperimentConfig parse_config(const Json& j) {
  ExperimentConfig c;
  Section root(j, "");
  root.integer("steps", c.steps);
  root.unsigned64("seed", c.seed);
  root.boolean("parallel", c.parallel);

  with_section(root, "lip", [&](Section& s) {
    s.number("g", c.lip.g);
    s.number("z0", c.lip.z0);
    s.number("x0", c.lip.x0);
    s.number("y0", c.lip.y0);
    s.number("k0", c.lip_analysis.k0);
    s.number("fd_step", c.lip_analysis.fd_step);
    s.number("relative_perturbation", c.lip_analysis.relative_perturbation);
    s.integer("convergence_steps", c.lip_analysis.convergence_steps);
    s.number("sim_perturbation", c.lip_sim_perturbation);
  });
  with_section(root, "biped", [&](Section& s) {
    s.number("L1", c.biped.L1);
    s.number("L2", c.biped.L2);
    s.number("L3", c.biped.L3);
    s.number("W", c.biped.W);
    s.number("g", c.biped.g);
    s.number("min_hip_height", c.biped.min_hip_height);
    with_section(s, "mass", [&](Section& m) {
      m.number("torso_mass", c.biped.mass.torso_mass);
      m.number("torso_com_fraction", c.biped.mass.torso_com_fraction);
      m.vector("torso_inertia", c.biped.mass.torso_inertia);
      m.number("thigh_mass", c.biped.mass.thigh_mass);
      m.number("shin_mass", c.biped.mass.shin_mass);
    });
  });
  with_section(root, "gait", [&](Section& s) {
    s.number("theta_p_d", c.control.gait.theta_p_d);
    s.number("x0", c.control.gait.x0);
    s.number("y0", c.control.gait.y0);
    s.number("q_k_d", c.control.gait.q_k_d);
  });
  with_section(root, "control", [&](Section& s) {
    s.vector("kp", c.control.kp);
    s.vector("kd", c.control.kd);
    s.number("q6_clearance", c.control.q6_clearance);
    s.number("phase_split", c.control.phase_split);
    s.number("torque_limit", c.control.torque_limit);
    s.number("nominal_k0", c.control.nominal_k0);
    s.number("max_condition_number", c.control.max_condition_number);
  });
  with_section(root, "integrator", [&](Section& s) {
    s.number("step_size", c.integrator.step_size);
    s.number("event_tolerance", c.integrator.event_tolerance);
    s.number("arming_threshold", c.integrator.arming_threshold);
    s.number("max_step_duration", c.integrator.max_step_duration);
  });
  with_section(root, "fixed_point", [&](Section& s) {
    s.number("tolerance", c.fixed_point.tolerance);
    s.integer("max_iterations", c.fixed_point.max_iterations);
    s.number("fd_step", c.fixed_point.fd_step);
    s.integer("warmup_iterations", c.fixed_point.warmup_iterations);
    s.number("max_step", c.fixed_point.max_step);
  });
  with_section(root, "stability", [&](Section& s) {
    s.number("fd_step", c.stability.fd_step);
    s.integer("sequence_steps", c.stability.sequence_steps);
    s.number("perturbation", c.stability.perturbation);
    s.number("invariance_tolerance", c.stability.invariance_tolerance);
    s.boolean("yaw_check", c.yaw_check);
  });
  with_section(root, "sweep", [&](Section& s) {
    s.list("x0", c.sweep.x0);
    s.list("y0", c.sweep.y0);
    s.list("k0", c.sweep.k0);
  });
  root.finish();

  const Execution ex = c.parallel ? Execution::kParallel : Execution::kSerial;
  c.lip_analysis.execution = ex;
  c.fixed_point.execution = ex;
  c.stability.execution = ex;
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigParse, "cannot open " + path);
  Json j;
  try {
    j = Json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kConfigParse, path + ": " + e.what());
  }
  return parse_config(j);
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["steps"] = c.steps;
  j["seed"] = c.seed;
  j["parallel"] = c.parallel;
  j["lip"] = {{"g", c.lip.g},
              {"z0", c.lip.z0},
              {"x0", c.lip.x0},
              {"y0", c.lip.y0},
              {"k0", c.lip_analysis.k0},
              {"fd_step", c.lip_analysis.fd_step},
              {"relative_perturbation", c.lip_analysis.relative_perturbation},
              {"convergence_steps", c.lip_analysis.convergence_steps},
              {"sim_perturbation", c.lip_sim_perturbation}};
  j["biped"] = {{"L1", c.biped.L1},
                {"L2", c.biped.L2},
                {"L3", c.biped.L3},
                {"W", c.biped.W},
                {"g", c.biped.g},
                {"min_hip_height", c.biped.min_hip_height},
                {"mass",
                 {{"torso_mass", c.biped.mass.torso_mass},
                  {"torso_com_fraction", c.biped.mass.torso_com_fraction},
                  {"torso_inertia", vec_json(c.biped.mass.torso_inertia)},
                  {"thigh_mass", c.biped.mass.thigh_mass},
                  {"shin_mass", c.biped.mass.shin_mass}}}};
  j["gait"] = {{"theta_p_d", c.control.gait.theta_p_d},
               {"x0", c.control.gait.x0},
               {"y0", c.control.gait.y0},
               {"q_k_d", c.control.gait.q_k_d}};
  j["control"] = {{"kp", vec_json(c.control.kp)},
                  {"kd", vec_json(c.control.kd)},
                  {"q6_clearance", c.control.q6_clearance},
                  {"phase_split", c.control.phase_split},
                  {"torque_limit", c.control.torque_limit},
                  {"nominal_k0", c.control.nominal_k0},
                  {"max_condition_number", c.control.max_condition_number}};
  j["integrator"] = {{"step_size", c.integrator.step_size},
                     {"event_tolerance", c.integrator.event_tolerance},
                     {"arming_threshold", c.integrator.arming_threshold},
                     {"max_step_duration", c.integrator.max_step_duration}};
  j["fixed_point"] = {{"tolerance", c.fixed_point.tolerance},
                      {"max_iterations", c.fixed_point.max_iterations},
                      {"fd_step", c.fixed_point.fd_step},
                      {"warmup_iterations", c.fixed_point.warmup_iterations},
                      {"max_step", c.fixed_point.max_step}};
  j["stability"] = {{"fd_step", c.stability.fd_step},
                    {"sequence_steps", c.stability.sequence_steps},
                    {"perturbation", c.stability.perturbation},
                    {"invariance_tolerance", c.stability.invariance_tolerance},
                    {"yaw_check", c.yaw_check}};
  j["sweep"] = {{"x0", c.sweep.x0}, {"y0", c.sweep.y0}, {"k0", c.sweep.k0}};
  return j;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json to_json(const Spectrum& s) {
  Json a = Json::array();
  for (const auto& z : s) a.push_back(Json::array({z.real(), z.imag()}));
  return a;
}

Json to_json(const lip::LipPoincareReport& r) {
  Json j;
  j["fixed_point"] = {{"alpha", r.fixed_point.alpha},
                      {"gamma", r.fixed_point.gamma},
                      {"v", r.fixed_point.v}};
  j["jacobian"] = matrix_json(r.jacobian);
  j["eigenvalues"] = to_json(r.eigenvalues);
  j["analytic_lambda"] = r.analytic_lambda;
  j["lambda_contracting"] = r.lambda_contracting;
  j["restricted_jacobian"] = matrix_json(r.restricted_jacobian);
  j["restricted_eigenvalues"] = to_json(r.restricted_eigenvalues);
  j["ratios"] = r.ratios;
  Json conv = Json::array();
  for (const auto& c : r.convergence) {
    conv.push_back({{"n", c.n}, {"sync", c.sync}, {"alpha", c.alpha}, {"gamma", c.gamma}, {"v", c.v}});
  }
  j["convergence"] = conv;
  return j;
}

Json to_json(const biped::BipedPoincareReport& r) {
  Json j;
  j["fixed_point"] = vec_json(r.fixed_point);
  j["fixed_point_residual"] = r.fixed_point_residual;
  j["jacobian"] = matrix_json(r.jacobian);
  j["eigenvalues"] = to_json(r.spectrum);
  j["spectral_radius"] = r.spectral_radius;
  j["sync_block_radius"] = r.sync_block_radius;
  j["energy_block_radius"] = r.energy_block_radius;
  j["observed_ratio"] = r.observed_ratio;
  j["max_invariance_residual"] = r.max_invariance_residual;
  Json res = Json::array();
  for (const auto& s : r.step_sequence) res.push_back(s.invariance_residual);
  j["m_p_residuals"] = res;
  j["valid"] = r.valid;
  if (r.failure) {
    j["failure"] = {{"code", std::string(to_string(r.failure->code))},
                    {"message", r.failure->message},
                    {"step", r.failure->step}};
  } else {
    j["failure"] = nullptr;
  }
  return j;
}

Json to_json(const biped::YawPeriodReport& r) {
  return {{"yaw_at_impact", r.yaw_at_impact},
          {"world_yaw_at_impact", r.world_yaw_at_impact},
          {"max_two_step_drift", r.max_two_step_drift},
          {"offset_shift_error", r.offset_shift_error},
          {"offset_shape_error", r.offset_shape_error},
          {"periodic", r.periodic}};
}

Json to_json(const biped::BipedState& s) {
  return {{"q", vec_json(s.q)},
          {"qdot", vec_json(s.qdot)},
          {"stance_leg", s.stance_leg == biped::StanceLeg::kRight ? "right" : "left"}};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::kInvalidArgument, "write failed for " + path);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string csv(const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace gaitlab::io
