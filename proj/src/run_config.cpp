#include "sbeam/run_config.hpp"

#include <openssl/sha.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

namespace sbeam {

using nlohmann::json;

namespace {

const std::set<std::string> kAxes = {"n_gamma_tau", "delta_over_halfkappa", "kappa_tau",
                                     "n_atoms"};
const std::set<std::string> kFormats = {"csv", "binary", "json"};

template <typename T>
T take(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("config key '") + key + "' has the wrong type");
  }
}

double take_number(const json& j, const char* key, double fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) throw std::invalid_argument(std::string("config key '") + key +
                                                    "' must be a number");
  return it->get<double>();
}

int take_int(const json& j, const char* key, int fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer())
    throw std::invalid_argument(std::string("config key '") + key + "' must be an integer");
  return it->get<int>();
}

SweepAxis take_axis(const json& j, const std::string& prefix, const SweepAxis& fallback) {
  SweepAxis a = fallback;
  a.axis = take<std::string>(j, (prefix + "_axis").c_str(), a.axis);
  a.min = take_number(j, (prefix + "_min").c_str(), a.min);
  a.max = take_number(j, (prefix + "_max").c_str(), a.max);
  a.points = take_int(j, (prefix + "_points").c_str(), a.points);
  a.scale = take<std::string>(j, (prefix + "_scale").c_str(), a.scale);
  return a;
}

void put_axis(json& j, const std::string& prefix, const SweepAxis& a) {
  j[prefix + "_axis"] = a.axis;
  j[prefix + "_min"] = a.min;
  j[prefix + "_max"] = a.max;
  j[prefix + "_points"] = a.points;
  j[prefix + "_scale"] = a.scale;
}

void validate_axis(const SweepAxis& a, const char* name) {
  if (!a.active()) return;
  if (!kAxes.count(a.axis))
    throw std::invalid_argument(std::string(name) + ": unknown sweep axis '" + a.axis + "'");
  if (a.points < 1) throw std::invalid_argument(std::string(name) + ": points must be >= 1");
  if (a.scale != "linear" && a.scale != "log")
    throw std::invalid_argument(std::string(name) + ": scale must be linear or log");
  if (a.scale == "log" && !(a.min > 0.0 && a.max > 0.0))
    throw std::invalid_argument(std::string(name) + ": log sweep needs positive bounds");
  if (!std::isfinite(a.min) || !std::isfinite(a.max))
    throw std::invalid_argument(std::string(name) + ": bounds must be finite");
}

}  // namespace

std::vector<double> SweepAxis::values() const {
  std::vector<double> v;
  if (points == 1) {
    v.push_back(min);
    return v;
  }
  for (int i = 0; i < points; ++i) {
    const double s = static_cast<double>(i) / (points - 1);
    if (scale == "log")
      v.push_back(std::exp(std::log(min) + s * (std::log(max) - std::log(min))));
    else
      v.push_back(min + s * (max - min));
  }
  return v;
}

json config_to_json(const RunConfig& c) {
  json j;
  j["n_gamma_tau"] = c.n_gamma_tau;
  j["delta_over_halfkappa"] = c.delta_over_halfkappa;
  j["kappa_tau"] = c.kappa_tau;
  j["n_atoms"] = c.n_atoms;
  j["dt"] = c.dt;
  j["seed"] = c.seed;
  j["mode"] = to_string(c.mode);
  j["total_time"] = c.total_time;
  j["n_runs"] = c.n_runs;
  j["sample_dt"] = c.sample_dt;
  j["t0"] = c.t0;
  j["t_cut"] = c.t_cut;
  j["nu_max"] = c.nu_max;
  j["sliding_average"] = c.sliding_average;
  j["hann_window"] = c.hann_window;
  j["poisson_arrivals"] = c.poisson_arrivals;
  j["min_prominence"] = c.min_prominence;
  put_axis(j, "sweep_x", c.sweep_x);
  put_axis(j, "sweep_y", c.sweep_y);
  j["out_dir"] = c.out_dir;
  j["formats"] = c.formats;
  j["threads"] = c.threads;
  return j;
}

RunConfig merge_config(const RunConfig& base, const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  const json known = config_to_json(base);
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.contains(it.key()))
      throw std::invalid_argument("unknown config key '" + it.key() + "'");

  RunConfig c = base;
  c.n_gamma_tau = take_number(j, "n_gamma_tau", c.n_gamma_tau);
  c.delta_over_halfkappa = take_number(j, "delta_over_halfkappa", c.delta_over_halfkappa);
  c.kappa_tau = take_number(j, "kappa_tau", c.kappa_tau);
  c.n_atoms = take_int(j, "n_atoms", c.n_atoms);
  c.dt = take_number(j, "dt", c.dt);
  if (j.contains("seed")) {
    const auto& s = j.at("seed");
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() &&
                                   s.get<std::int64_t>() < 0))
      throw std::invalid_argument("config key 'seed' must be a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (j.contains("mode")) c.mode = parse_dynamics_mode(take<std::string>(j, "mode", ""));
  c.total_time = take_number(j, "total_time", c.total_time);
  c.n_runs = take_int(j, "n_runs", c.n_runs);
  c.sample_dt = take_number(j, "sample_dt", c.sample_dt);
  c.t0 = take_number(j, "t0", c.t0);
  c.t_cut = take_number(j, "t_cut", c.t_cut);
  c.nu_max = take_number(j, "nu_max", c.nu_max);
  c.sliding_average = take<bool>(j, "sliding_average", c.sliding_average);
  c.hann_window = take<bool>(j, "hann_window", c.hann_window);
  c.poisson_arrivals = take<bool>(j, "poisson_arrivals", c.poisson_arrivals);
  c.min_prominence = take_number(j, "min_prominence", c.min_prominence);
  c.sweep_x = take_axis(j, "sweep_x", c.sweep_x);
  c.sweep_y = take_axis(j, "sweep_y", c.sweep_y);
  c.out_dir = take<std::string>(j, "out_dir", c.out_dir);
  c.formats = take<std::vector<std::string>>(j, "formats", c.formats);
  c.threads = take_int(j, "threads", c.threads);
  validate(c);
  return c;
}

RunConfig config_from_json(const json& j) { return merge_config(RunConfig{}, j); }

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

RunConfig apply_set(const RunConfig& base, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("--set expects key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  return merge_config(base, json{{key, value}});
}

void validate(const RunConfig& c) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string(name) + " must be positive");
  };
  if (!(c.n_gamma_tau >= 0.0) || !std::isfinite(c.n_gamma_tau))
    throw std::invalid_argument("n_gamma_tau must be >= 0");
  if (!std::isfinite(c.delta_over_halfkappa))
    throw std::invalid_argument("delta_over_halfkappa must be finite");
  positive(c.kappa_tau, "kappa_tau");
  if (c.n_atoms < 1) throw std::invalid_argument("n_atoms must be >= 1");
  positive(c.dt, "dt");
  if (c.dt > 0.01 * (1.0 + 1e-12)) throw std::invalid_argument("dt must not exceed tau/100");
  positive(c.total_time, "total_time");
  if (c.n_runs < 1) throw std::invalid_argument("n_runs must be >= 1");
  positive(c.sample_dt, "sample_dt");
  if (!(c.t0 >= 0.0)) throw std::invalid_argument("t0 must be >= 0");
  positive(c.t_cut, "t_cut");
  positive(c.nu_max, "nu_max");
  if (!(c.min_prominence >= 0.0)) throw std::invalid_argument("min_prominence must be >= 0");
  validate_axis(c.sweep_x, "sweep_x");
  validate_axis(c.sweep_y, "sweep_y");
  for (const auto& f : c.formats)
    if (!kFormats.count(f)) throw std::invalid_argument("unknown output format '" + f + "'");
  if (c.threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (c.out_dir.empty()) throw std::invalid_argument("out_dir must not be empty");
}

std::string config_hash(const RunConfig& c) {
  json j = config_to_json(c);
  j.erase("out_dir");
  j.erase("threads");
  const std::string body = j.dump();
  const std::string blob = "blob " + std::to_string(body.size()) + '\0' + body;
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), digest);
  std::string hex;
  char buf[3];
  for (unsigned char b : digest) {
    std::snprintf(buf, sizeof buf, "%02x", b);
    hex += buf;
  }
  return hex;
}

std::uint64_t config_hash64(const RunConfig& c) {
  return std::stoull(config_hash(c).substr(0, 16), nullptr, 16);
}

SystemParams system_params(const RunConfig& c) {
  return SystemParams::from_groups(c.n_gamma_tau, c.delta_over_halfkappa, c.kappa_tau, c.n_atoms,
                                   1.0, c.dt, c.seed);
}

SimulationOptions simulation_options(const RunConfig& c) {
  SimulationOptions o;
  o.mode = c.mode;
  o.total_time = c.total_time;
  o.n_runs = c.n_runs;
  o.sample_dt = c.sample_dt;
  o.poisson_arrivals = c.poisson_arrivals;
  o.threads = c.threads;
  return o;
}

SpectrumOptions spectrum_options(const RunConfig& c) {
  SpectrumOptions o;
  o.t0 = c.t0;
  o.t_cut = c.t_cut;
  o.nu_max = c.nu_max;
  o.sliding_average = c.sliding_average;
  o.hann_window = c.hann_window;
  return o;
}

bool has_format(const RunConfig& c, const std::string& fmt) {
  for (const auto& f : c.formats)
    if (f == fmt) return true;
  return false;
}

RunConfig with_axis_value(const RunConfig& c, const std::string& axis, double value) {
  RunConfig out = c;
  if (axis == "n_gamma_tau") out.n_gamma_tau = value;
  else if (axis == "delta_over_halfkappa") out.delta_over_halfkappa = value;
  else if (axis == "kappa_tau") out.kappa_tau = value;
  else if (axis == "n_atoms") out.n_atoms = static_cast<int>(std::lround(value));
  else throw std::invalid_argument("unknown sweep axis '" + axis + "'");
  return out;
}

std::string preset_directory() {
  if (const char* env = std::getenv("SBEAM_PRESET_DIR"); env && *env) return env;
#ifdef SBEAM_PRESET_DIR
  return SBEAM_PRESET_DIR;
#else
  return "presets";
#endif
}

RunConfig load_preset(const std::string& name) {
  const auto path = std::filesystem::path(preset_directory()) / (name + ".json");
  if (!std::filesystem::exists(path))
    throw std::invalid_argument("unknown preset '" + name + "' (looked in " +
                                preset_directory() + ")");
  return load_config_file(path.string());
}

const char* version() {
#ifdef SBEAM_VERSION
  return SBEAM_VERSION;
#else
  return "unknown";
#endif
}

}  // namespace sbeam
