#pragma once

#include <complex>
#include <cstdint>

namespace sbeam {

// Physical and numerical parameters of the beam-cavity system. All rates are
// angular frequencies. The transit time is always derived as tau = 2 w / vx.
class SystemParams {
 public:
  SystemParams(double delta, double kappa, double gamma_c, int n_atoms, double w, double vx,
               std::uint64_t rng_seed, double dt);

  // Builds parameters from the dimensionless groups with the given transit
  // time; the box half-width is fixed to w = 1/2 in units of vx * tau.
  static SystemParams from_groups(double n_gamma_tau, double delta_over_halfkappa,
                                  double kappa_tau, int n_atoms, double tau = 1.0,
                                  double dt = -1.0, std::uint64_t rng_seed = 0);

  double delta() const { return delta_; }
  double kappa() const { return kappa_; }
  double gamma_c() const { return gamma_c_; }
  int n_atoms() const { return n_atoms_; }
  double tau() const { return tau_; }
  double w() const { return w_; }
  double vx() const { return vx_; }
  std::uint64_t rng_seed() const { return rng_seed_; }
  double dt() const { return dt_; }

  // g = sqrt(Gamma_c * kappa)
  double coupling() const;

  double n_gamma_tau() const { return n_atoms_ * gamma_c_ * tau_; }
  double delta_over_halfkappa() const { return delta_ / (0.5 * kappa_); }
  double kappa_tau() const { return kappa_ * tau_; }

  SystemParams with_dt(double dt) const;
  SystemParams with_seed(std::uint64_t seed) const;

 private:
  double delta_;
  double kappa_;
  double gamma_c_;
  int n_atoms_;
  double tau_;
  double w_;
  double vx_;
  std::uint64_t rng_seed_;
  double dt_;
};

// Retardation angle chi in (-pi/2, pi/2).
class ChiAngle {
 public:
  ChiAngle() = default;
  explicit ChiAngle(double chi);

  // tan(chi) = delta / (kappa/2): cavity adiabatically eliminated.
  static ChiAngle bad_cavity(const SystemParams& p);
  // tan(chi) = (delta - omega) / (kappa/2)
  static ChiAngle retarded(const SystemParams& p, double omega);

  double value() const { return chi_; }
  double cos() const;
  double sin() const;
  double tan() const;

 private:
  double chi_ = 0.0;
};

struct AtomState {
  double entry_time = 0.0;
  double x = 0.0;
  double sx = 0.0;
  double sy = 0.0;
  double sz = 1.0;

  double length_squared() const { return sx * sx + sy * sy + sz * sz; }
};

// Cavity quadratures; alpha = (ax - i ay) / 2.
struct CavityField {
  double ax = 0.0;
  double ay = 0.0;

  std::complex<double> alpha() const { return {0.5 * ax, -0.5 * ay}; }
  static CavityField from_alpha(std::complex<double> a) { return {2.0 * a.real(), -2.0 * a.imag()}; }
};

// Mode-weighted sums J^x, J^y; J = (jx - i jy) / 2.
struct CollectiveDipole {
  double jx = 0.0;
  double jy = 0.0;

  std::complex<double> complex() const { return {0.5 * jx, -0.5 * jy}; }
};

// Box mode on the half-open interval [-w, w).
double mode_function(double x, const SystemParams& p);

double gamma_of_x(double x, const ChiAngle& chi, const SystemParams& p);

// rho = N / (2 w)
double homogeneous_density(const SystemParams& p);

}  // namespace sbeam
