#include "sbeam/commands.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "sbeam/errors.hpp"
#include "sbeam/observables.hpp"
#include "sbeam/stability.hpp"
#include "sbeam/steady_state.hpp"
#include "sbeam/trajectory_io.hpp"

namespace sbeam {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string cell(std::optional<double> v) { return v ? format_double(*v) : std::string(); }

struct GridPoint {
  RunConfig cfg;
  double x = 0.0;
  double y = 0.0;
};

// Row-major over (x, y); missing axes collapse to the config's own values.
std::vector<GridPoint> grid(const RunConfig& c) {
  std::vector<GridPoint> pts;
  const auto xs = c.sweep_x.active() ? c.sweep_x.values() : std::vector<double>{0.0};
  const auto ys = c.sweep_y.active() ? c.sweep_y.values() : std::vector<double>{0.0};
  for (double x : xs) {
    for (double y : ys) {
      GridPoint g;
      g.cfg = c;
      if (c.sweep_x.active()) g.cfg = with_axis_value(g.cfg, c.sweep_x.axis, x);
      if (c.sweep_y.active()) g.cfg = with_axis_value(g.cfg, c.sweep_y.axis, y);
      g.x = x;
      g.y = y;
      pts.push_back(g);
    }
  }
  return pts;
}

fs::path output_path(const RunConfig& c, const std::string& name) {
  fs::create_directories(c.out_dir);
  return fs::path(c.out_dir) / name;
}

void write_file(CommandResult& res, const RunConfig& c, const std::string& name,
                const std::string& body) {
  const auto path = output_path(c, name);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
  res.files.push_back(path.string());
}

void write_summary(CommandResult& res, const RunConfig& c, const std::string& command) {
  res.summary["command"] = command;
  res.summary["version"] = version();
  res.summary["config_hash"] = config_hash(c);
  res.summary["seed"] = c.seed;
  res.summary["config"] = config_to_json(c);
  if (has_format(c, "json")) write_file(res, c, "summary.json", res.summary.dump(2) + "\n");
}

void progress(std::atomic<std::size_t>& done, std::size_t total) {
  const std::size_t k = ++done;
  if (total >= 20 && (k % (total / 10) == 0 || k == total))
    std::cerr << "  " << k << "/" << total << " points\n";
}

double analytic_power(const SteadyState& s, const RunConfig& c) {
  if (s.branch != Branch::Superradiant) return 0.0;
  const double cc = s.chi.cos();
  return c.n_gamma_tau * cc * cc * s.j0_par * s.j0_par / 4.0;
}

struct StationaryRow {
  SteadyState s;
  std::optional<double> pulling;
};

StationaryRow stationary_at(const RunConfig& c) {
  StationaryRow r;
  r.s = solve_steady_state(system_params(c));
  if (c.n_gamma_tau > 4.0) r.pulling = pulling_coefficient(c.n_gamma_tau, c.kappa_tau);
  return r;
}

std::string stationary_line(const RunConfig& c, const StationaryRow& r) {
  std::ostringstream os;
  const bool sr = r.s.branch == Branch::Superradiant;
  os << format_double(c.n_gamma_tau) << ',' << format_double(c.delta_over_halfkappa) << ','
     << to_string(r.s.branch) << ',' << (sr ? format_double(r.s.xi) : "") << ','
     << (sr ? format_double(r.s.f) : "") << ',' << format_double(r.s.j0_par) << ','
     << (r.s.omega ? format_double(*r.s.omega) : "") << ',' << cell(r.pulling) << '\n';
  return os.str();
}

constexpr const char* kStationaryHeader =
    "n_gamma_tau,delta_over_halfkappa,branch,xi,f,j0_par,omega_tau,P\n";
constexpr const char* kStabilityHeader =
    "n_gamma_tau,delta_over_halfkappa,re_nu0_tau,im_nu0_tau,re_nu1_tau,im_nu1_tau,phase\n";

std::string stability_line(const RunConfig& c, const PhaseResult& r) {
  std::ostringstream os;
  auto re = [](const std::optional<DispersionRoot>& d) {
    return d ? std::optional<double>(d->nu.real()) : std::nullopt;
  };
  auto im = [](const std::optional<DispersionRoot>& d) {
    return d ? std::optional<double>(d->nu.imag()) : std::nullopt;
  };
  os << format_double(c.n_gamma_tau) << ',' << format_double(c.delta_over_halfkappa) << ','
     << cell(re(r.nu0)) << ',' << cell(im(r.nu0)) << ',' << cell(re(r.nu1)) << ','
     << cell(im(r.nu1)) << ',' << to_string(r.phase) << '\n';
  return os.str();
}

PhaseResult phase_at(const RunConfig& c) {
  try {
    return classify_phase(system_params(c));
  } catch (const Error& e) {
    // recorded per point instead of aborting the sweep
    std::cerr << "  inconclusive at (" << c.n_gamma_tau << ", " << c.delta_over_halfkappa
              << "): " << e.what() << "\n";
    PhaseResult r;
    r.phase = Phase::Inconclusive;
    return r;
  }
}

void require_axes(const RunConfig& c, const std::string& x, const std::string& y,
                  const char* command) {
  if (c.sweep_x.active() && c.sweep_x.axis != x)
    throw std::invalid_argument(std::string(command) + ": sweep_x_axis must be " + x);
  if (c.sweep_y.active() && c.sweep_y.axis != y)
    throw std::invalid_argument(std::string(command) + ": sweep_y_axis must be " + y);
}

// Crossings of Re(nu1) = 0 along the detuning grid at fixed N Gamma_c tau.
std::vector<double> multicomponent_crossings(const RunConfig& c, const std::vector<double>& ds) {
  std::vector<double> out;
  auto rate = [&](double d) -> std::optional<double> {
    try {
      return growth_rate_sr(system_params(with_axis_value(c, "delta_over_halfkappa", d)));
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  std::optional<double> prev = ds.empty() ? std::nullopt : rate(ds.front());
  for (std::size_t i = 1; i < ds.size(); ++i) {
    const auto cur = rate(ds[i]);
    if (prev && cur && ((*prev > 0.0) != (*cur > 0.0))) {
      try {
        out.push_back(bisect(
            [&](double d) {
              const auto r = rate(d);
              if (!r) throw NoRootFound("superradiant solution lost inside bracket");
              return *r;
            },
            ds[i - 1], ds[i], 1e-6));
      } catch (const Error&) {
      }
    }
    prev = cur;
  }
  return out;
}

}  // namespace

std::string csv_preamble(const RunConfig& c) {
  return std::string("# sbeam ") + version() + "\n# config_hash " + config_hash(c) +
         "\n# seed " + std::to_string(c.seed) + "\n";
}

CommandResult cmd_stationary(const RunConfig& c) {
  CommandResult res;
  const auto pts = grid(c);
  std::vector<std::string> lines(pts.size());
  std::atomic<std::size_t> done{0};
  parallel_for(pts.size(), c.threads, [&](std::size_t i) {
    lines[i] = stationary_line(pts[i].cfg, stationary_at(pts[i].cfg));
    progress(done, pts.size());
  });
  std::string body = csv_preamble(c) + kStationaryHeader;
  for (const auto& l : lines) body += l;
  write_file(res, c, "stationary.csv", body);
  res.summary["points"] = pts.size();
  write_summary(res, c, "stationary");
  return res;
}

CommandResult cmd_stability(const RunConfig& c) {
  CommandResult res;
  const auto pts = grid(c);
  std::vector<std::string> lines(pts.size());
  std::atomic<std::size_t> done{0};
  parallel_for(pts.size(), c.threads, [&](std::size_t i) {
    lines[i] = stability_line(pts[i].cfg, phase_at(pts[i].cfg));
    progress(done, pts.size());
  });
  std::string body = csv_preamble(c) + kStabilityHeader;
  for (const auto& l : lines) body += l;
  write_file(res, c, "stability.csv", body);
  res.summary["points"] = pts.size();
  write_summary(res, c, "stability");
  return res;
}

CommandResult cmd_phase_diagram(const RunConfig& c) {
  require_axes(c, "n_gamma_tau", "delta_over_halfkappa", "phase-diagram");
  CommandResult res;
  const auto pts = grid(c);
  std::vector<std::string> st(pts.size());
  std::vector<std::string> sb(pts.size());
  std::atomic<std::size_t> done{0};
  parallel_for(pts.size(), c.threads, [&](std::size_t i) {
    st[i] = stationary_line(pts[i].cfg, stationary_at(pts[i].cfg));
    sb[i] = stability_line(pts[i].cfg, phase_at(pts[i].cfg));
    progress(done, pts.size());
  });
  std::string body = csv_preamble(c) + kStationaryHeader;
  for (const auto& l : st) body += l;
  write_file(res, c, "stationary.csv", body);
  body = csv_preamble(c) + kStabilityHeader;
  for (const auto& l : sb) body += l;
  write_file(res, c, "stability.csv", body);

  // threshold curves per detuning, multicomponent crossings per N Gamma_c tau
  const auto ds = c.sweep_y.active() ? c.sweep_y.values()
                                     : std::vector<double>{c.delta_over_halfkappa};
  const auto gs = c.sweep_x.active() ? c.sweep_x.values() : std::vector<double>{c.n_gamma_tau};
  std::vector<std::string> thr(ds.size());
  parallel_for(ds.size(), c.threads, [&](std::size_t i) {
    std::ostringstream os;
    os << "threshold_steady_state," << format_double(superradiant_threshold(ds[i])) << ','
       << format_double(ds[i]) << '\n';
    try {
      os << "threshold_nonsr," << format_double(nonsr_threshold(ds[i], c.kappa_tau)) << ','
         << format_double(ds[i]) << '\n';
    } catch (const Error&) {
    }
    thr[i] = os.str();
  });
  std::vector<std::string> mc(gs.size());
  if (ds.size() > 1) {
    parallel_for(gs.size(), c.threads, [&](std::size_t i) {
      std::ostringstream os;
      for (double d : multicomponent_crossings(with_axis_value(c, "n_gamma_tau", gs[i]), ds))
        os << "multicomponent," << format_double(gs[i]) << ',' << format_double(d) << '\n';
      mc[i] = os.str();
    });
  }
  body = csv_preamble(c) + "curve,n_gamma_tau,delta_over_halfkappa\n";
  for (const auto& l : thr) body += l;
  for (const auto& l : mc) body += l;
  write_file(res, c, "boundaries.csv", body);
  res.summary["points"] = pts.size();
  write_summary(res, c, "phase-diagram");
  return res;
}

CommandResult cmd_pulling(const RunConfig& c) {
  require_axes(c, "n_gamma_tau", "kappa_tau", "pulling");
  CommandResult res;
  const auto pts = grid(c);
  std::vector<std::string> lines(pts.size());
  parallel_for(pts.size(), c.threads, [&](std::size_t i) {
    const auto& pc = pts[i].cfg;
    std::optional<double> p;
    if (pc.n_gamma_tau > 4.0) p = pulling_coefficient(pc.n_gamma_tau, pc.kappa_tau);
    std::ostringstream os;
    os << format_double(pc.n_gamma_tau) << ',' << format_double(pc.kappa_tau) << ',' << cell(p)
       << ',' << cell(p ? std::optional<double>(*p * pc.kappa_tau) : std::nullopt) << '\n';
    lines[i] = os.str();
  });
  std::string body = csv_preamble(c) + "n_gamma_tau,kappa_tau,P,P_kappa_tau\n";
  for (const auto& l : lines) body += l;
  write_file(res, c, "pulling.csv", body);

  const auto gs = c.sweep_x.active() ? c.sweep_x.values() : std::vector<double>{c.n_gamma_tau};
  body = csv_preamble(c) + "n_gamma_tau,P_kappa_tau_limit\n";
  for (double g : gs)
    body += format_double(g) + ',' +
            cell(g > 4.0 ? std::optional<double>(pulling_kappa_tau_limit(g)) : std::nullopt) +
            '\n';
  write_file(res, c, "pulling_limit.csv", body);
  res.summary["points"] = pts.size();
  write_summary(res, c, "pulling");
  return res;
}

namespace {

struct SimulationOutcome {
  std::vector<TrajectoryRecord> records;
  json results;
  SpectrumResult spec;
};

SimulationOutcome simulate_point(const RunConfig& c, int threads) {
  RunConfig rc = c;
  rc.threads = threads;
  const SystemParams p = system_params(rc);
  SimulationOutcome out;
  out.records = simulate(p, simulation_options(rc));

  json r;
  const SteadyState s = solve_steady_state(p);
  r["branch"] = to_string(s.branch);
  r["power_analytic"] = analytic_power(s, rc);
  if (s.omega) r["omega_tau_analytic"] = *s.omega * p.tau();
  try {
    const auto nu0 = find_root_nonsr(p);
    r["nu0_tau"] = {nu0.nu.real() * p.tau(), nu0.nu.imag() * p.tau()};
  } catch (const Error&) {
  }
  if (s.branch == Branch::Superradiant) {
    try {
      const auto nu1 = find_root_sr(SRLinearization(s, p));
      r["nu1_tau"] = {nu1.nu.real() * p.tau(), nu1.nu.imag() * p.tau()};
    } catch (const Error&) {
    }
  }
  const double span = std::max(0.0, rc.total_time - rc.t0);
  try {
    r["power"] = output_power(out.records, p, rc.t0, std::min(50.0, span));
    if (rc.mode == DynamicsMode::Full)
      r["power_field"] = output_power_field(out.records, p, rc.t0, std::min(50.0, span));
  } catch (const InsufficientData& e) {
    r["power"] = nullptr;
  }
  try {
    r["g2"] = g2_zero(out.records, rc.t0);
  } catch (const Error&) {
    r["g2"] = nullptr;
  }
  try {
    out.spec = spectrum(out.records, spectrum_options(rc));
    json peaks = json::array();
    for (const auto& pk : peak_find(out.spec, rc.min_prominence))
      peaks.push_back({{"nu_tau", pk.nu}, {"magnitude", pk.magnitude},
                       {"prominence", pk.prominence}});
    r["peaks"] = peaks;
    r["spectrum_resolution"] = out.spec.resolution;
    r["spectrum_sliding_average"] = out.spec.sliding_average;
    r["spectrum_hann_window"] = out.spec.hann_window;
  } catch (const InsufficientData&) {
    r["peaks"] = nullptr;
  }
  out.results = r;
  return out;
}

std::string spectrum_csv(const RunConfig& c, const SpectrumResult& s) {
  std::string body = csv_preamble(c);
  body += std::string("# correlation_average ") +
          (s.sliding_average ? "sliding" : "fixed_t0") + "\n";
  body += "nu_tau,magnitude\n";
  for (std::size_t i = 0; i < s.frequencies.size(); ++i)
    body += format_double(s.frequencies[i]) + ',' + format_double(s.magnitude[i]) + '\n';
  return body;
}

}  // namespace

CommandResult cmd_simulate(const RunConfig& c) {
  CommandResult res;
  auto outcome = simulate_point(c, c.threads);
  const std::uint64_t h = config_hash64(c);
  for (std::size_t i = 0; i < outcome.records.size(); ++i) {
    const std::string stem = "trajectory_" + std::to_string(i);
    if (has_format(c, "csv")) {
      std::ostringstream os;
      os << csv_preamble(c);
      write_csv(os, outcome.records[i]);
      write_file(res, c, stem + ".csv", os.str());
    }
    if (has_format(c, "binary")) {
      std::ostringstream os;
      write_binary(os, outcome.records[i], h);
      write_file(res, c, stem + ".bin", os.str());
    }
  }
  if (!outcome.spec.frequencies.empty())
    write_file(res, c, "spectrum.csv", spectrum_csv(c, outcome.spec));
  res.summary["results"] = outcome.results;
  write_summary(res, c, "simulate");
  return res;
}

CommandResult cmd_spectrum(const RunConfig& c) {
  if (c.sweep_y.active()) throw std::invalid_argument("spectrum: only sweep_x is supported");
  CommandResult res;
  const auto pts = grid(c);
  std::vector<std::string> heat(pts.size());
  std::vector<std::string> obs(pts.size());
  std::atomic<std::size_t> done{0};
  parallel_for(pts.size(), c.threads, [&](std::size_t i) {
    const auto o = simulate_point(pts[i].cfg, 1);
    const std::string x = format_double(pts[i].x);
    std::string h;
    for (std::size_t k = 0; k < o.spec.frequencies.size(); ++k)
      h += x + ',' + format_double(o.spec.frequencies[k]) + ',' +
           format_double(o.spec.magnitude[k]) + '\n';
    heat[i] = h;
    auto num = [&](const char* key) {
      return o.results.contains(key) && o.results[key].is_number()
                 ? format_double(o.results[key].get<double>())
                 : std::string();
    };
    auto pair = [&](const char* key, int k) {
      return o.results.contains(key) ? format_double(o.results[key][k].get<double>())
                                     : std::string();
    };
    std::string peaks;
    if (o.results["peaks"].is_array())
      for (const auto& pk : o.results["peaks"]) {
        if (!peaks.empty()) peaks += ';';
        peaks += format_double(pk["nu_tau"].get<double>());
      }
    obs[i] = x + ',' + num("power") + ',' + num("power_analytic") + ',' + num("g2") + ',' +
             num("omega_tau_analytic") + ',' + pair("nu0_tau", 0) + ',' + pair("nu0_tau", 1) +
             ',' + pair("nu1_tau", 0) + ',' + pair("nu1_tau", 1) + ',' + peaks + '\n';
    progress(done, pts.size());
  });
  std::string body = csv_preamble(c) + "sweep_value,nu_tau,magnitude\n";
  for (const auto& l : heat) body += l;
  write_file(res, c, "heatmap.csv", body);
  body = csv_preamble(c) +
         "sweep_value,power,power_analytic,g2,omega_tau_analytic,re_nu0_tau,im_nu0_tau,"
         "re_nu1_tau,im_nu1_tau,peaks_nu_tau\n";
  for (const auto& l : obs) body += l;
  write_file(res, c, "observables.csv", body);
  res.summary["points"] = pts.size();
  write_summary(res, c, "spectrum");
  return res;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"simulate", "phase-diagram", "stationary",
                                                 "stability", "pulling", "spectrum"};
  return names;
}

CommandResult run_command(const std::string& name, const RunConfig& c) {
  if (name == "simulate") return cmd_simulate(c);
  if (name == "phase-diagram") return cmd_phase_diagram(c);
  if (name == "stationary") return cmd_stationary(c);
  if (name == "stability") return cmd_stability(c);
  if (name == "pulling") return cmd_pulling(c);
  if (name == "spectrum") return cmd_spectrum(c);
  throw std::invalid_argument("unknown command '" + name + "'");
}

}  // namespace sbeam
