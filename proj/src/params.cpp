#include "sbeam/params.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sbeam {

SystemParams::SystemParams(double delta, double kappa, double gamma_c, int n_atoms, double w,
                           double vx, std::uint64_t rng_seed, double dt)
    : delta_(delta),
      kappa_(kappa),
      gamma_c_(gamma_c),
      n_atoms_(n_atoms),
      tau_(2.0 * w / vx),
      w_(w),
      vx_(vx),
      rng_seed_(rng_seed),
      dt_(dt) {
  if (!std::isfinite(delta)) throw std::invalid_argument("delta must be finite");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("kappa must be > 0");
  if (!(gamma_c >= 0.0) || !std::isfinite(gamma_c))
    throw std::invalid_argument("gamma_c must be >= 0");
  if (n_atoms < 1) throw std::invalid_argument("n_atoms must be >= 1");
  if (!(w > 0.0) || !(vx > 0.0) || !std::isfinite(tau_))
    throw std::invalid_argument("w and vx must be > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  // small slack so that dt = tau/100 computed in floating point is accepted
  if (dt > tau_ / 100.0 * (1.0 + 1e-12))
    throw std::invalid_argument("dt must not exceed tau/100 (got dt/tau = " +
                                std::to_string(dt / tau_) + ")");
}

SystemParams SystemParams::from_groups(double n_gamma_tau, double delta_over_halfkappa,
                                       double kappa_tau, int n_atoms, double tau, double dt,
                                       std::uint64_t rng_seed) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
  if (!(kappa_tau > 0.0)) throw std::invalid_argument("kappa_tau must be > 0");
  if (!(n_gamma_tau >= 0.0)) throw std::invalid_argument("n_gamma_tau must be >= 0");
  if (n_atoms < 1) throw std::invalid_argument("n_atoms must be >= 1");
  const double kappa = kappa_tau / tau;
  const double delta = delta_over_halfkappa * 0.5 * kappa;
  const double gamma_c = n_gamma_tau / (n_atoms * tau);
  const double w = 0.5;
  const double vx = 2.0 * w / tau;
  if (dt <= 0.0) dt = tau / 200.0;
  return SystemParams(delta, kappa, gamma_c, n_atoms, w, vx, rng_seed, dt);
}

double SystemParams::coupling() const { return std::sqrt(gamma_c_ * kappa_); }

SystemParams SystemParams::with_dt(double dt) const {
  return SystemParams(delta_, kappa_, gamma_c_, n_atoms_, w_, vx_, rng_seed_, dt);
}

SystemParams SystemParams::with_seed(std::uint64_t seed) const {
  return SystemParams(delta_, kappa_, gamma_c_, n_atoms_, w_, vx_, seed, dt_);
}

ChiAngle::ChiAngle(double chi) : chi_(chi) {
  if (!(std::abs(chi) < 0.5 * std::numbers::pi))
    throw std::invalid_argument("chi must lie in (-pi/2, pi/2)");
}

ChiAngle ChiAngle::bad_cavity(const SystemParams& p) {
  return ChiAngle(std::atan2(p.delta(), 0.5 * p.kappa()));
}

ChiAngle ChiAngle::retarded(const SystemParams& p, double omega) {
  return ChiAngle(std::atan2(p.delta() - omega, 0.5 * p.kappa()));
}

double ChiAngle::cos() const { return std::cos(chi_); }
double ChiAngle::sin() const { return std::sin(chi_); }
double ChiAngle::tan() const { return std::tan(chi_); }

double mode_function(double x, const SystemParams& p) {
  return (x >= -p.w() && x < p.w()) ? 1.0 : 0.0;
}

double gamma_of_x(double x, const ChiAngle& chi, const SystemParams& p) {
  return p.gamma_c() * mode_function(x, p) * chi.cos();
}

double homogeneous_density(const SystemParams& p) { return p.n_atoms() / (2.0 * p.w()); }

}  // namespace sbeam
