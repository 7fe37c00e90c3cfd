#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaitlab/biped.hpp"
#include "gaitlab/biped_analysis.hpp"
#include "gaitlab/biped_control.hpp"
#include "gaitlab/integrator.hpp"
#include "gaitlab/lip.hpp"
#include "gaitlab/lip_analysis.hpp"

namespace gaitlab::io {

using Json = nlohmann::ordered_json;

struct SweepGrid {
  std::vector<double> x0{0.12, 0.15, 0.18};
  std::vector<double> y0{0.17, 0.2, 0.23};
  std::vector<double> k0{1.0};
};

/// Everything the command line tool can be configured with. Each section of
/// the JSON file maps onto one member; absent keys keep these defaults.
struct ExperimentConfig {
  lip::LipParams lip;
  lip::LipPoincareOptions lip_analysis;  // k0 lives here
  /// lip-sim: the synchronization measure of the start state is offset by
  /// a uniform draw in [-1, 1] times this fraction of w^2 x0 y0.
  double lip_sim_perturbation = 0.0;

  biped::BipedParams biped;
  biped::ControlConfig control;
  biped::FixedPointOptions fixed_point;
  biped::StabilityOptions stability;
  bool yaw_check = true;

  IntegratorConfig integrator;
  SweepGrid sweep;

  int steps = 10;
  std::uint64_t seed = 42;
  bool parallel = true;

  /// Throws InvalidArgument when any section violates its invariants.
  void validate() const;
};

/// Throws ConfigParse on malformed JSON, unknown keys or wrong value types.
ExperimentConfig parse_config(const Json& j);
ExperimentConfig load_config(const std::string& path);
Json to_json(const ExperimentConfig& c);

/// Shortest text that reads back to the same double: 17 significant digits.
std::string format_double(double x);

Json to_json(const Spectrum& s);  // [[re, im], ...]
Json to_json(const lip::LipPoincareReport& r);
Json to_json(const biped::BipedPoincareReport& r);
Json to_json(const biped::YawPeriodReport& r);
Json to_json(const biped::BipedState& s);

/// Writes `text` to `path`, throwing InvalidArgument if the file cannot be
/// opened.
void write_file(const std::string& path, const std::string& text);

/// JSON dump with doubles printed at full precision.
std::string dump(const Json& j);

/// Header line plus one line per row, all numbers through format_double.
std::string csv(const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& rows);

}  // namespace gaitlab::io
