#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sbeam/commands.hpp"
#include "sbeam/run_config.hpp"
#include "sbeam/steady_state.hpp"
#include "sbeam/trajectory_io.hpp"

using namespace sbeam;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("sbeam_test_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// data rows of a CSV file without the '#' preamble and the header
std::vector<std::vector<std::string>> rows(const fs::path& p, std::string* header = nullptr) {
  std::ifstream in(p);
  std::string line;
  std::vector<std::vector<std::string>> out;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      seen_header = true;
      if (header) *header = line;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    out.push_back(cells);
  }
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SBEAM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config JSON round trip") {
  RunConfig c;
  c.n_gamma_tau = 33.5;
  c.delta_over_halfkappa = -1.25;
  c.mode = DynamicsMode::Full;
  c.seed = 987654321;
  c.sweep_x = {"kappa_tau", 0.1, 100.0, 7, "log"};
  c.formats = {"binary"};
  c.sliding_average = true;
  const RunConfig back = config_from_json(config_to_json(c));
  CHECK(back == c);
  CHECK(config_from_json(json::object()) == RunConfig{});
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(config_from_json(json{{"n_gamma_taux", 3}}), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(json{{"n_atoms", 2.5}}), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(json{{"mode", "quantum"}}), std::invalid_argument);
  CHECK_THROWS_AS(apply_set(RunConfig{}, "nonsense"), std::invalid_argument);
  RunConfig bad;
  bad.dt = 0.05;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = RunConfig{};
  bad.formats = {"xml"};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = RunConfig{};
  bad.sweep_x = {"temperature", 0.0, 1.0, 3, "linear"};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("--set parsing") {
  RunConfig c = apply_set(RunConfig{}, "n_gamma_tau=42.5");
  CHECK(c.n_gamma_tau == 42.5);
  c = apply_set(c, "mode=full");
  CHECK(c.mode == DynamicsMode::Full);
  c = apply_set(c, "formats=[\"csv\",\"binary\"]");
  CHECK(c.formats == std::vector<std::string>{"csv", "binary"});
  c = apply_set(c, "sliding_average=true");
  CHECK(c.sliding_average);
}

TEST_CASE("config hash") {
  RunConfig a;
  RunConfig b = a;
  CHECK(config_hash(a).size() == 40);
  CHECK(config_hash(a) == config_hash(b));
  b.out_dir = "elsewhere";
  b.threads = 8;
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 2;
  CHECK(config_hash(a) != config_hash(b));
  b = a;
  b.n_gamma_tau = std::nextafter(a.n_gamma_tau, 100.0);
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash64(a) == std::stoull(config_hash(a).substr(0, 16), nullptr, 16));
}

TEST_CASE("sweep values") {
  SweepAxis lin{"n_gamma_tau", 0.0, 30.0, 4, "linear"};
  CHECK(lin.values() == std::vector<double>{0.0, 10.0, 20.0, 30.0});
  SweepAxis lg{"kappa_tau", 0.01, 1000.0, 6, "log"};
  const auto v = lg.values();
  REQUIRE(v.size() == 6);
  CHECK(v.front() == doctest::Approx(0.01));
  CHECK(v[2] == doctest::Approx(1.0));
  CHECK(v.back() == doctest::Approx(1000.0));
  SweepAxis one{"n_gamma_tau", 7.0, 9.0, 1, "linear"};
  CHECK(one.values() == std::vector<double>{7.0});
}

TEST_CASE("stationary command at a single point") {
  RunConfig c;
  c.n_gamma_tau = 20.0;
  c.delta_over_halfkappa = 1.0;
  c.out_dir = scratch("stationary").string();
  const auto res = cmd_stationary(c);
  std::string header;
  const auto r = rows(fs::path(c.out_dir) / "stationary.csv", &header);
  CHECK(header == "n_gamma_tau,delta_over_halfkappa,branch,xi,f,j0_par,omega_tau,P");
  REQUIRE(r.size() == 1);
  const auto s = solve_steady_state(system_params(c));
  CHECK(r[0][2] == "superradiant");
  CHECK(std::stod(r[0][3]) == s.xi);
  CHECK(std::stod(r[0][6]) == *s.omega);
  const std::string text = slurp(fs::path(c.out_dir) / "stationary.csv");
  CHECK(text.rfind("# sbeam 0.1.0\n# config_hash " + config_hash(c) + "\n# seed 1\n", 0) == 0);
  const json summary = json::parse(slurp(fs::path(c.out_dir) / "summary.json"));
  CHECK(summary["config_hash"] == config_hash(c));
  CHECK(config_from_json(summary["config"]) == c);
}

TEST_CASE("pulling command") {
  RunConfig c;
  c.sweep_x = {"n_gamma_tau", 10.0, 30.0, 3, "linear"};
  c.sweep_y = {"kappa_tau", 1.0, 100.0, 3, "log"};
  c.out_dir = scratch("pulling").string();
  cmd_pulling(c);
  const auto r = rows(fs::path(c.out_dir) / "pulling.csv");
  REQUIRE(r.size() == 9);
  for (const auto& row : r) {
    const double g = std::stod(row[0]);
    const double kt = std::stod(row[1]);
    CHECK(std::stod(row[2]) == doctest::Approx(pulling_coefficient(g, kt)).epsilon(1e-15));
  }
  CHECK(rows(fs::path(c.out_dir) / "pulling_limit.csv").size() == 3);

  c.sweep_x = {"n_gamma_tau", 3.0, 3.0, 1, "linear"};
  c.sweep_y = {"kappa_tau", 1.0, 1.0, 1, "linear"};
  cmd_pulling(c);
  const auto below = rows(fs::path(c.out_dir) / "pulling.csv");
  REQUIRE(below.size() == 1);
  CHECK(below[0][2].empty());
}

TEST_CASE("small phase diagram") {
  RunConfig c;
  c.sweep_x = {"n_gamma_tau", 2.0, 50.0, 4, "linear"};
  c.sweep_y = {"delta_over_halfkappa", 0.0, 3.0, 3, "linear"};
  c.out_dir = scratch("phase").string();
  const auto res = cmd_phase_diagram(c);
  const auto st = rows(fs::path(c.out_dir) / "stability.csv");
  CHECK(st.size() == 12);
  CHECK(st.front().back() == "non_superradiant");
  std::string header;
  const auto b = rows(fs::path(c.out_dir) / "boundaries.csv", &header);
  CHECK(header == "curve,n_gamma_tau,delta_over_halfkappa");
  CHECK_FALSE(b.empty());
  CHECK(fs::exists(fs::path(c.out_dir) / "stationary.csv"));
}

TEST_CASE("simulate command output and determinism") {
  RunConfig c;
  c.n_atoms = 1;
  c.total_time = 30.0;
  c.formats = {"csv", "binary", "json"};
  c.out_dir = scratch("sim_a").string();
  const auto start = std::chrono::steady_clock::now();
  const auto res = cmd_simulate(c);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(secs < 1.0);
  const fs::path a = c.out_dir;
  CHECK(fs::exists(a / "trajectory_0.csv"));
  CHECK(fs::exists(a / "trajectory_0.bin"));
  CHECK(fs::exists(a / "spectrum.csv"));

  std::ifstream bin(a / "trajectory_0.bin", std::ios::binary);
  BinaryHeader h;
  const auto rec = read_binary(bin, &h);
  CHECK(h.params_hash == config_hash64(c));
  CHECK(rec.size() == 601);

  const json summary = json::parse(slurp(a / "summary.json"));
  CHECK(summary["command"] == "simulate");
  CHECK(summary["results"].contains("power"));
  CHECK(summary["results"].contains("peaks"));
  CHECK(config_from_json(summary["config"]) == c);

  RunConfig d = c;
  d.out_dir = scratch("sim_b").string();
  d.threads = 2;
  cmd_simulate(d);
  for (const char* f : {"trajectory_0.csv", "trajectory_0.bin", "spectrum.csv"})
    CHECK(slurp(a / f) == slurp(fs::path(d.out_dir) / f));
}

TEST_CASE("cli exit codes") {
  const auto dir = scratch("exit");
  const std::string out = " --out " + dir.string();
  CHECK(run_cli("stationary --set n_gamma_tau=10" + out) == 0);
  CHECK(fs::exists(dir / "stationary.csv"));
  CHECK(run_cli("stationary --set bogus_key=1" + out) == 2);
  CHECK(run_cli("stationary --set dt=1" + out) == 2);
  CHECK(run_cli("simulate --set n_atoms=0" + out) == 2);
  CHECK(run_cli("simulate --config /nonexistent/config.json" + out) == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("simulate --set n_gamma_tau=1e308 --set total_time=1 --set n_atoms=10" + out) ==
        3);
  CHECK(run_cli("--version") == 0);
}

TEST_CASE("presets load") {
  for (const char* name : {"fig3", "fig5", "fig6", "fig7", "fig8", "fig9", "fig6-large"}) {
    CAPTURE(name);
    CHECK_NOTHROW(validate(load_preset(name)));
  }
  CHECK_THROWS_AS(load_preset("no-such-preset"), std::invalid_argument);
}
