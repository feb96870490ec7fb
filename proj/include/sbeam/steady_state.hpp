#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sbeam/params.hpp"

namespace sbeam {

enum class Branch { NonSuperradiant, Superradiant };

const char* to_string(Branch b);

struct SteadyState {
  double xi = 0.0;
  double f = 0.0;
  ChiAngle chi;
  double j0_par = 0.0;           // J0 / N along the dipole direction
  std::optional<double> omega;   // emission frequency relative to the atoms
  Branch branch = Branch::NonSuperradiant;
  double residual_xi = 0.0;
  double residual_f = 0.0;
};

// 1 - sin(x)/x, accurate for small x.
double one_minus_sinc(double x);

// xi - G sin^2(xi/2) / xi
double xi_residual(double n_gamma_tau, double xi);
// -xi tan(chi) - (G/2) f/sqrt(1+f^2) (1 - sin(xi)/xi)
double f_residual(double n_gamma_tau, const ChiAngle& chi, double xi, double f);

// Unique root of xi^2 = G sin^2(xi/2) on (0, 2pi). Exists iff G > 4.
double solve_xi(double n_gamma_tau);

// Closed-form inversion; throws Infeasible when no monochromatic solution
// exists at this detuning.
double solve_f(double n_gamma_tau, const ChiAngle& chi, double xi);

SteadyState solve_steady_state(const SystemParams& p);

// Smallest N Gamma_c tau with a superradiant solution at fixed Delta/(kappa/2).
double superradiant_threshold(double delta_over_halfkappa, double tol = 1e-12);

struct BlochTrace {
  std::vector<double> x;
  std::vector<double> K;
  std::vector<double> psi;
  std::vector<Eigen::Vector3d> b;  // unit vectors (cos psi sin K, sin psi sin K, cos K)
};

// Unit Bloch vector of the stationary dipole density at position x in [-w, w].
Eigen::Vector3d bloch_vector(const SteadyState& s, const SystemParams& p, double x);
double bloch_K(const SteadyState& s, const SystemParams& p, double x);
double bloch_psi(const SteadyState& s, const SystemParams& p, double x);

BlochTrace bloch_trace(const SteadyState& s, const SystemParams& p, int n_samples);

// P = omega / Delta to first order in Delta.
double pulling_coefficient(const SystemParams& p);
double pulling_coefficient(double n_gamma_tau, double kappa_tau);
// Limit of P kappa tau for kappa tau -> infinity.
double pulling_kappa_tau_limit(double n_gamma_tau);

}  // namespace sbeam
