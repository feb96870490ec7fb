#include "sbeam/dynamics.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>

#include "sbeam/errors.hpp"
#include "sbeam/rotation.hpp"

namespace sbeam {

namespace {

// Rounding guard for the half-open box: an atom whose exit coincides with a
// step boundary is retired in the same step its successor enters.
constexpr double kEdgeSlack = 1e-9;

struct DipoleSums {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

DipoleSums weighted_sums(const Ensemble& ens, const SystemParams& p) {
  DipoleSums s;
  for (const auto& a : ens.atoms) {
    if (mode_function(a.x, p) == 0.0) continue;
    s.x += a.sx;
    s.y += a.sy;
    s.z += a.sz;
  }
  return s;
}

void rotate_inside(Ensemble& ens, const SystemParams& p, const TransverseRotation& r) {
  for (auto& a : ens.atoms) {
    if (mode_function(a.x, p) == 0.0) continue;
    r.apply(a.sx, a.sy, a.sz);
  }
}

void require_finite(double a, double b, const char* what) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw NonFiniteState(std::string("non-finite ") + what, -1);
}

double steps_for(double duration, double dt, const char* what) {
  const double ratio = duration / dt;
  const double n = std::round(ratio);
  if (n < 0.0 || std::abs(ratio - n) > 1e-6 * std::max(1.0, n))
    throw std::invalid_argument(std::string(what) + " must be an integer multiple of dt");
  return n;
}

bool state_is_finite(const Ensemble& ens) {
  if (!std::isfinite(ens.cavity.ax) || !std::isfinite(ens.cavity.ay)) return false;
  for (const auto& a : ens.atoms)
    if (!std::isfinite(a.sx) || !std::isfinite(a.sy) || !std::isfinite(a.sz)) return false;
  return true;
}

}  // namespace

const char* to_string(DynamicsMode mode) {
  return mode == DynamicsMode::Full ? "full" : "adiabatic";
}

DynamicsMode parse_dynamics_mode(const std::string& name) {
  if (name == "full") return DynamicsMode::Full;
  if (name == "adiabatic") return DynamicsMode::Adiabatic;
  throw std::invalid_argument("unknown dynamics mode '" + name + "'");
}

CollectiveDipole Ensemble::collective_dipole(const SystemParams& p) const {
  CollectiveDipole j;
  for (const auto& a : atoms) {
    const double eta = mode_function(a.x, p);
    j.jx += eta * a.sx;
    j.jy += eta * a.sy;
  }
  return j;
}

void inject_and_retire(Ensemble& ens, const SystemParams& p, double dt, TrajectoryRng& rng) {
  inject_and_retire(ens, p, dt, rng,
                    [&rng](std::uint64_t k) { return rng.entry_spins(k); });
}

void inject_and_retire(Ensemble& ens, const SystemParams& p, double dt, TrajectoryRng& rng,
                       const EntrySpinSource& spins) {
  if (dt < 0.0) throw std::invalid_argument("dt must be >= 0");
  ens.t += dt;
  const double slack = kEdgeSlack * p.dt();
  for (auto& a : ens.atoms) a.x = -p.w() + p.vx() * (ens.t - a.entry_time);
  while (!ens.atoms.empty() && ens.t - ens.atoms.front().entry_time >= p.tau() - slack)
    ens.atoms.pop_front();

  const double spacing = p.tau() / p.n_atoms();
  while (ens.next_entry_time <= ens.t + slack) {
    const auto s = spins(ens.next_atom);
    AtomState a;
    a.entry_time = ens.next_entry_time;
    a.x = std::max(-p.w(), -p.w() + p.vx() * (ens.t - a.entry_time));
    a.sx = s[0];
    a.sy = s[1];
    a.sz = 1.0;
    if (ens.t - a.entry_time < p.tau() - slack) ens.atoms.push_back(a);
    ++ens.next_atom;
    ens.next_entry_time = ens.poisson_arrivals
                              ? ens.next_entry_time + rng.exponential(spacing)
                              : static_cast<double>(ens.next_atom) * spacing;
  }
}

AtomicNoise draw_atomic_noise(const SystemParams& p, double dt, TrajectoryRng& rng) {
  const double sd = std::sqrt(p.gamma_c() * dt) * ChiAngle::bad_cavity(p).cos();
  AtomicNoise n;
  n.dx = sd * rng.gaussian();
  n.dy = sd * rng.gaussian();
  return n;
}

FieldNoise draw_field_noise(const SystemParams& p, double dt, TrajectoryRng& rng) {
  const double sd = std::sqrt(-std::expm1(-p.kappa() * dt));
  FieldNoise n;
  n.dx = sd * rng.gaussian();
  n.dy = sd * rng.gaussian();
  return n;
}

std::array<double, 2> field_rotation_vector(const CavityField& field, double g) {
  return {0.5 * g * field.ax, 0.5 * g * field.ay};
}

void step_adiabatic(Ensemble& ens, const SystemParams& p, double dt, const AtomicNoise& noise) {
  const ChiAngle chi = ChiAngle::bad_cavity(p);
  const double c = chi.cos();
  const double s = chi.sin();
  const double half_gamma = 0.5 * p.gamma_c() * c;

  // ds/dt = (-By, Bx, 0) x s with B = Gamma/2 R(chi) J + noise
  const DipoleSums sum = weighted_sums(ens, p);
  const double bx0 = half_gamma * (c * sum.x - s * sum.y);
  const double by0 = half_gamma * (s * sum.x + c * sum.y);
  const double half_dt = 0.5 * dt;
  const auto predictor = TransverseRotation::from_vector(-(by0 * half_dt + 0.5 * noise.dy),
                                                         bx0 * half_dt + 0.5 * noise.dx);
  double mx = sum.x;
  double my = sum.y;
  double mz = sum.z;
  predictor.apply(mx, my, mz);

  const double bx = half_gamma * (c * mx - s * my);
  const double by = half_gamma * (s * mx + c * my);
  const double wx = -(by * dt + noise.dy);
  const double wy = bx * dt + noise.dx;
  require_finite(wx, wy, "rotation vector in adiabatic step");
  rotate_inside(ens, p, TransverseRotation::from_vector(wx, wy));
}

void step_adiabatic(Ensemble& ens, const SystemParams& p, double dt, TrajectoryRng& rng) {
  step_adiabatic(ens, p, dt, draw_atomic_noise(p, dt, rng));
}

void step_full(Ensemble& ens, const SystemParams& p, double dt, const FieldNoise& noise) {
  using cd = std::complex<double>;
  const double g = p.coupling();
  const cd lambda(0.5 * p.kappa(), p.delta());
  const cd decay = std::exp(-lambda * dt);
  const cd gain = (1.0 - decay) / lambda;
  const cd kick(0.5 * noise.dx, -0.5 * noise.dy);
  const cd drive_coeff(0.0, -0.5 * g);

  const cd j0 = ens.collective_dipole(p).complex();
  const cd a0 = ens.cavity.alpha();
  const cd a_pred = decay * a0 + gain * (drive_coeff * j0) + kick;
  const CavityField mid = CavityField::from_alpha(0.5 * (a0 + a_pred));
  const auto w = field_rotation_vector(mid, g);
  require_finite(w[0], w[1], "cavity field in full step");
  rotate_inside(ens, p, TransverseRotation::from_vector(w[0] * dt, w[1] * dt));

  const cd j1 = ens.collective_dipole(p).complex();
  const cd a1 = decay * a0 + gain * (drive_coeff * (0.5 * (j0 + j1))) + kick;
  ens.cavity = CavityField::from_alpha(a1);
}

void step_full(Ensemble& ens, const SystemParams& p, double dt, TrajectoryRng& rng) {
  step_full(ens, p, dt, draw_field_noise(p, dt, rng));
}

TrajectoryRecord simulate_trajectory(const SystemParams& p, const SimulationOptions& opt,
                                     std::uint64_t run_index) {
  const double dt = p.dt();
  if (opt.mode == DynamicsMode::Adiabatic && dt > p.tau() / 200.0 * (1.0 + 1e-12))
    throw std::invalid_argument("adiabatic mode requires dt <= tau/200");
  if (opt.mode == DynamicsMode::Full && dt > 0.1 / p.kappa() * (1.0 + 1e-12))
    throw std::invalid_argument("full mode requires dt <= 0.1/kappa");
  const auto n_steps = static_cast<long long>(steps_for(opt.total_time, dt, "total_time"));
  const auto per_sample = static_cast<long long>(steps_for(opt.sample_dt, dt, "sample_dt"));
  if (per_sample < 1) throw std::invalid_argument("sample_dt must be >= dt");

  TrajectoryRng rng(p.rng_seed(), opt.first_run + run_index);
  Ensemble ens;
  ens.poisson_arrivals = opt.poisson_arrivals;
  inject_and_retire(ens, p, 0.0, rng);

  TrajectoryRecord rec;
  rec.n_atoms = p.n_atoms();
  rec.tau = p.tau();
  const auto n_samples = static_cast<std::size_t>(n_steps / per_sample) + 1;
  rec.times.reserve(n_samples);
  rec.j.reserve(n_samples);
  const bool full = opt.mode == DynamicsMode::Full;
  if (full) rec.alpha.reserve(n_samples);

  auto record = [&](long long step) {
    rec.times.push_back(static_cast<double>(step) * dt);
    rec.j.push_back(ens.collective_dipole(p).complex());
    if (full) rec.alpha.push_back(ens.cavity.alpha());
  };
  record(0);

  for (long long step = 1; step <= n_steps; ++step) {
    try {
      if (full) {
        step_full(ens, p, dt, opt.noise ? draw_field_noise(p, dt, rng) : FieldNoise{});
      } else {
        step_adiabatic(ens, p, dt, opt.noise ? draw_atomic_noise(p, dt, rng) : AtomicNoise{});
      }
    } catch (const NonFiniteState& e) {
      throw NonFiniteState(e.what(), step, static_cast<int>(run_index));
    }
    inject_and_retire(ens, p, dt, rng);
    if (step % 100 == 0 && !state_is_finite(ens))
      throw NonFiniteState("non-finite dipole or field state", step, static_cast<int>(run_index));
    if (step % per_sample == 0) record(step);
  }
  return rec;
}

std::vector<TrajectoryRecord> simulate(const SystemParams& p, const SimulationOptions& opt) {
  if (opt.n_runs < 1) throw std::invalid_argument("n_runs must be >= 1");
  std::vector<TrajectoryRecord> out(static_cast<std::size_t>(opt.n_runs));
  parallel_for(out.size(), opt.threads,
               [&](std::size_t i) { out[i] = simulate_trajectory(p, opt, i); });
  return out;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const auto count = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  pool.reserve(count);
  for (std::size_t k = 0; k < count; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace sbeam
