#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <catch_amalgamated.hpp>
#include <json.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const std::string kCli = GAITLAB_CLI_PATH;
const std::string kDefaultConfig = std::string(GAITLAB_CONFIG_DIR) + "/default.json";

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "gaitlab_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("lip-sim with zero steps writes an empty step table") {
  const fs::path out = scratch("lip_sim_zero");
  REQUIRE(run("lip-sim --steps 0 --out " + out.string()) == 0);
  CHECK(slurp(out / "lip_sim_steps.csv") == "n,alpha,gamma,thetadot_y,v\n");
  const Json j = Json::parse(slurp(out / "lip_sim.json"));
  CHECK(j["events"].empty());
  CHECK(j["failure"].is_null());
}

TEST_CASE("lip-poincare report carries the lambda cross-check") {
  const fs::path out = scratch("lip_poincare");
  REQUIRE(run("lip-poincare --config " + kDefaultConfig + " --out " + out.string()) == 0);
  const Json j = Json::parse(slurp(out / "lip_poincare.json"));
  const double jgg = j["jacobian"][4].get<double>();
  const double lambda = j["analytic_lambda"].get<double>();
  CHECK(std::abs(jgg + lambda) <= 1e-4);
  CHECK(j["eigenvalues"].size() == 3);
  CHECK(j["eigenvalues"][0].size() == 2);
  const auto rows = read_csv(out / "lip_convergence.csv");
  CHECK(rows.front() == std::vector<std::string>{"n", "alpha", "gamma", "thetadot_y", "v"});
}

TEST_CASE("lambda-sweep rows: equal targets, swapped targets and infeasible energy") {
  const fs::path dir = scratch("sweep");
  const fs::path cfg = write_config(
      dir, R"({"sweep": {"x0": [0.15, 0.2], "y0": [0.15, 0.2], "k0": [1.0, 0.2]}})");
  REQUIRE(run("lambda-sweep --config " + cfg.string() + " --out " + dir.string()) == 0);
  const auto rows = read_csv(dir / "lambda_sweep.csv");
  REQUIRE(rows.size() == 9);
  CHECK(rows[0] == std::vector<std::string>{"x0", "y0", "K0", "lambda_analytic", "lambda_numeric",
                                            "abs_diff", "feasible"});
  int infeasible = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double x0 = std::stod(rows[i][0]);
    const double y0 = std::stod(rows[i][1]);
    const double k0 = std::stod(rows[i][2]);
    if (rows[i][6] == "0") {
      ++infeasible;
      CHECK(k0 == 0.2);
      continue;
    }
    const double lambda = std::stod(rows[i][3]);
    CHECK(std::stod(rows[i][5]) <= 1e-4);
    if (x0 == y0) CHECK(lambda == 1.0);
    if (y0 < x0) CHECK(std::abs(lambda) >= 1.0);
    if (y0 > x0) CHECK(std::abs(lambda) < 1.0);
  }
  CHECK(infeasible == 4);
}

TEST_CASE("identical config and seed give byte-identical files") {
  for (const std::string cmd : {"lip-sim", "lip-poincare", "lambda-sweep", "biped-sim", "biped-poincare"}) {
    const fs::path a = scratch(cmd + "_a");
    const fs::path b = scratch(cmd + "_b");
    const std::string common = cmd + " --config " + kDefaultConfig + " --seed 7 --steps 4 --out ";
    REQUIRE(run(common + a.string()) == 0);
    REQUIRE(run(common + b.string()) == 0);
    int files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
      CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
      ++files;
    }
    CHECK(files >= 1);
  }
}

TEST_CASE("biped-poincare spectrum and sequence files match the report") {
  const fs::path out = scratch("biped_poincare");
  REQUIRE(run("biped-poincare --steps 12 --out " + out.string()) == 0);
  const Json j = Json::parse(slurp(out / "biped_poincare.json"));
  CHECK(j["spectral_radius"].get<double>() < 1.0);
  const auto spec = read_csv(out / "biped_spectrum.csv");
  REQUIRE(spec.size() == 5);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::stod(spec[i + 1][1]) == j["eigenvalues"][i][0].get<double>());
    CHECK(std::stod(spec[i + 1][2]) == j["eigenvalues"][i][1].get<double>());
  }
  const auto seq = read_csv(out / "biped_sequence.csv");
  CHECK(seq.front() == std::vector<std::string>{"n", "alpha", "gamma", "thetadot_y", "v"});
  CHECK(seq.size() == 14);  // header, n = 0 .. 12
  CHECK(j["yaw_period"]["periodic"].get<bool>());
}

TEST_CASE("the seed changes the perturbation direction") {
  const fs::path a = scratch("seed_a");
  const fs::path b = scratch("seed_b");
  REQUIRE(run("lip-sim --steps 3 --seed 1 --out " + a.string() + " --config " +
              write_config(a, R"({"lip": {"sim_perturbation": 0.05}})").string()) == 0);
  REQUIRE(run("lip-sim --steps 3 --seed 2 --out " + b.string() + " --config " +
              (a / "config.json").string()) == 0);
  CHECK(slurp(a / "lip_sim_steps.csv") != slurp(b / "lip_sim_steps.csv"));
}

TEST_CASE("exit codes for invalid configurations and gait failures") {
  const fs::path dir = scratch("exit_codes");
  CHECK(run("lip-sim --config /nonexistent.json --out " + dir.string()) == 3);
  CHECK(run("lip-sim --config " + write_config(dir, R"({"lip": {"x0": -1}})").string() + " --out " +
            dir.string()) == 3);
  CHECK(run("lip-sim --config " + write_config(dir, R"({"unknown": 1})").string() + " --out " +
            dir.string()) == 3);
  CHECK(run("lip-sim --config " + write_config(dir, "{ not json").string() + " --out " +
            dir.string()) == 3);
  CHECK(run("lip-sim --steps -2 --out " + dir.string()) == 3);
  CHECK(run("no-such-command") == 3);
  CHECK(run("") == 3);
  CHECK(run("--help") == 0);
  // Pendulum energy too low for a synchronized start.
  CHECK(run("lip-sim --config " + write_config(dir, R"({"lip": {"k0": 0.2}})").string() + " --out " +
            dir.string()) == 3);
  // Weak actuators: the biped falls.
  CHECK(run("biped-sim --steps 3 --config " +
            write_config(dir, R"({"control": {"torque_limit": 0.5}})").string() + " --out " +
            dir.string()) == 2);
  const Json j = Json::parse(slurp(dir / "biped_sim.json"));
  CHECK(!j["failure"].is_null());
}
