#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sbeam/commands.hpp"
#include "sbeam/errors.hpp"
#include "sbeam/run_config.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonFlags {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::string preset;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config, "flat JSON config file");
  sub->add_option("--set", f.sets, "override one key, key=value (repeatable)");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--threads", f.threads, "worker threads");
  sub->add_option("--seed", f.seed, "master RNG seed");
  sub->add_option("--preset", f.preset, "shipped preset name, e.g. fig6");
}

sbeam::RunConfig resolve(const CommonFlags& f) {
  sbeam::RunConfig c;
  if (!f.preset.empty()) c = sbeam::load_preset(f.preset);
  if (!f.config.empty()) {
    const auto file = sbeam::load_config_file(f.config);
    c = f.preset.empty() ? file : sbeam::merge_config(c, sbeam::config_to_json(file));
  }
  for (const auto& s : f.sets) c = sbeam::apply_set(c, s);
  if (!f.out.empty()) c.out_dir = f.out;
  if (f.threads) c.threads = *f.threads;
  if (f.seed) c.seed = *f.seed;
  sbeam::validate(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Superradiant beam-cavity simulation and analysis toolkit"};
  app.set_version_flag("--version", std::string(sbeam::version()));
  app.require_subcommand(1);

  CommonFlags flags;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", "stochastic trajectories plus power, g2 and spectrum"},
      {"phase-diagram", "stationary and stability grid with boundary curves"},
      {"stationary", "analytic steady states over a sweep"},
      {"stability", "dispersion roots and phase labels over a sweep"},
      {"pulling", "cavity pulling coefficient over (N Gamma_c tau, kappa tau)"},
      {"spectrum", "simulated spectra along a one-dimensional sweep"}};
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  sbeam::RunConfig cfg;
  try {
    cfg = resolve(flags);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    const auto res = sbeam::run_command(name, cfg);
    for (const auto& f : res.files) std::cout << f << "\n";
  } catch (const sbeam::NonFiniteState& e) {
    std::cerr << "numerical failure: " << e.what() << " (run " << e.run() << ", step "
              << e.step() << ")\n";
    return kExitNumerical;
  } catch (const sbeam::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
