#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <deque>
#include <functional>
#include <vector>

#include "sbeam/params.hpp"
#include "sbeam/rng.hpp"

namespace sbeam {

enum class DynamicsMode { Full, Adiabatic };

const char* to_string(DynamicsMode mode);
DynamicsMode parse_dynamics_mode(const std::string& name);

// Atoms currently inside the mode plus the cavity field. Atoms are ordered by
// entry time, oldest first.
struct Ensemble {
  std::deque<AtomState> atoms;
  CavityField cavity;
  double t = 0.0;

  std::uint64_t next_atom = 0;
  double next_entry_time = 0.0;
  bool poisson_arrivals = false;

  CollectiveDipole collective_dipole(const SystemParams& p) const;
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<std::complex<double>> j;
  std::vector<std::complex<double>> alpha;  // empty in adiabatic mode
  int n_atoms = 0;
  double tau = 1.0;

  std::size_t size() const { return times.size(); }
  bool has_field() const { return !alpha.empty(); }
};

using EntrySpinSource = std::function<std::array<double, 2>(std::uint64_t atom_index)>;

// Advances positions by vx*dt, retires atoms with x >= w and inserts the atoms
// scheduled to enter during the step. Deterministic arrivals enter every tau/N.
void inject_and_retire(Ensemble& ens, const SystemParams& p, double dt, TrajectoryRng& rng);
void inject_and_retire(Ensemble& ens, const SystemParams& p, double dt, TrajectoryRng& rng,
                       const EntrySpinSource& spins);

// Shared noise increments for the eliminated dynamics, each of variance
// Gamma_c cos^2(chi) dt.
struct AtomicNoise {
  double dx = 0.0;
  double dy = 0.0;
};

// Cavity noise increments added to (ax, ay) over one step.
struct FieldNoise {
  double dx = 0.0;
  double dy = 0.0;
};

AtomicNoise draw_atomic_noise(const SystemParams& p, double dt, TrajectoryRng& rng);
FieldNoise draw_field_noise(const SystemParams& p, double dt, TrajectoryRng& rng);

// Angular velocity (gx/2 ax, g/2 ay, 0) that the cavity field exerts on a dipole
// at a point where eta = 1.
std::array<double, 2> field_rotation_vector(const CavityField& field, double g);

// Coupled field + dipole step with exact exponential treatment of the field.
// Dipoles rotate about the midpoint field.
void step_full(Ensemble& ens, const SystemParams& p, double dt, const FieldNoise& noise);
void step_full(Ensemble& ens, const SystemParams& p, double dt, TrajectoryRng& rng);

// Cavity-eliminated step; the update is a midpoint (Stratonovich) rotation so
// each dipole keeps its length.
void step_adiabatic(Ensemble& ens, const SystemParams& p, double dt, const AtomicNoise& noise);
void step_adiabatic(Ensemble& ens, const SystemParams& p, double dt, TrajectoryRng& rng);

struct SimulationOptions {
  DynamicsMode mode = DynamicsMode::Adiabatic;
  double total_time = 60.0;
  int n_runs = 1;
  double sample_dt = 0.05;
  bool noise = true;
  bool poisson_arrivals = false;
  int threads = 1;
  // Offset applied to run indices when deriving RNG streams.
  std::uint64_t first_run = 0;
};

TrajectoryRecord simulate_trajectory(const SystemParams& p, const SimulationOptions& opt,
                                     std::uint64_t run_index);

// Independent runs, deterministic given the master seed in p. Throws
// NonFiniteState tagged with the failing run index.
std::vector<TrajectoryRecord> simulate(const SystemParams& p, const SimulationOptions& opt);

// Runs fn(i) for i in [0, n) on up to `threads` workers. Exceptions are
// rethrown for the lowest failing index.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace sbeam
