#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbeam/dynamics.hpp"
#include "sbeam/observables.hpp"
#include "sbeam/params.hpp"

namespace sbeam {

struct SweepAxis {
  std::string axis;  // empty: no sweep along this direction
  double min = 0.0;
  double max = 0.0;
  int points = 1;
  std::string scale = "linear";

  bool active() const { return !axis.empty(); }
  std::vector<double> values() const;

  bool operator==(const SweepAxis&) const = default;
};

// Flat experiment description. Times are in units of tau, rates in 1/tau.
struct RunConfig {
  double n_gamma_tau = 20.0;
  double delta_over_halfkappa = 0.0;
  double kappa_tau = 100.0;
  int n_atoms = 500;
  double dt = 0.005;
  std::uint64_t seed = 1;
  DynamicsMode mode = DynamicsMode::Adiabatic;
  double total_time = 60.0;
  int n_runs = 1;
  double sample_dt = 0.05;
  double t0 = 10.0;
  double t_cut = 20.0;
  double nu_max = 4.0 * 3.14159265358979323846;
  bool sliding_average = false;
  bool hann_window = false;
  bool poisson_arrivals = false;
  double min_prominence = 0.1;
  SweepAxis sweep_x;
  SweepAxis sweep_y;
  std::string out_dir = "out";
  std::vector<std::string> formats = {"csv", "json"};
  int threads = 1;

  bool operator==(const RunConfig&) const = default;
};

// Throws std::invalid_argument on unknown keys, wrong types or invalid values.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);

RunConfig load_config_file(const std::string& path);
// Merges a JSON object over the current values.
RunConfig merge_config(const RunConfig& base, const nlohmann::json& overrides);
// "key=value"; value is parsed as JSON, falling back to a plain string.
RunConfig apply_set(const RunConfig& base, const std::string& assignment);

void validate(const RunConfig& c);

// git-style SHA-1 of the canonical JSON without out_dir and threads.
std::string config_hash(const RunConfig& c);
std::uint64_t config_hash64(const RunConfig& c);

SystemParams system_params(const RunConfig& c);
SimulationOptions simulation_options(const RunConfig& c);
SpectrumOptions spectrum_options(const RunConfig& c);

bool has_format(const RunConfig& c, const std::string& fmt);

// Copy of c with one sweepable parameter replaced.
RunConfig with_axis_value(const RunConfig& c, const std::string& axis, double value);

// Directory holding the shipped presets; SBEAM_PRESET_DIR in the environment
// takes precedence over the compiled-in location.
std::string preset_directory();
RunConfig load_preset(const std::string& name);

const char* version();

}  // namespace sbeam
