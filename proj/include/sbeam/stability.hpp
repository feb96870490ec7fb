#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sbeam/params.hpp"
#include "sbeam/steady_state.hpp"

namespace sbeam {

using cplx = std::complex<double>;

enum class Relation { NonSR, SR };

struct DispersionRoot {
  cplx nu;           // angular frequency (1/time)
  Relation relation = Relation::NonSR;
  double residual = 0.0;
  cplx basin;        // grid point the Newton polish started from
  int iterations = 0;
};

struct RootSearchOptions {
  double re_min = -5.0;   // window in units of 1/tau
  double re_max = 5.0;
  double im_max = 4.0 * 3.14159265358979323846;
  int n_re = 41;
  int n_im = 81;
  double tolerance = 1e-9;       // accepted |D| at a root
  double exclude_radius = 0.0;   // drop roots with |nu tau| below this
  int max_newton = 60;
};

// All distinct zeros reached by Newton from the local minima of |D| on the
// window grid, sorted by decreasing real part. nu is passed in units of 1/tau.
std::vector<DispersionRoot> scan_roots(const std::function<cplx(cplx)>& d, double tau,
                                       Relation relation, const RootSearchOptions& opt);

cplx dispersion_nonsr(cplx nu, const SystemParams& p);
// Upper bound on Re(nu) tau over all zeros of the non-superradiant relation.
// The search window is widened to cover it when needed.
double nonsr_growth_bound(const SystemParams& p);
DispersionRoot find_root_nonsr(const SystemParams& p, const RootSearchOptions& opt = {});

// Linearization about the superradiant steady state in the frame rotating at
// omega. The generator L1 is constant inside the mode, so the characteristic
// propagator is an exact rotation.
class SRLinearization {
 public:
  SRLinearization(const SteadyState& steady, const SystemParams& p, int panels = 16,
                  int nodes_per_panel = 20);

  const SteadyState& steady() const { return steady_; }
  const SystemParams& params() const { return params_; }

  Eigen::Matrix3d L1(double x) const;
  Eigen::Matrix<double, 3, 2> S0(double x) const;
  // Fundamental solution of dM/dt = L1 M for an atom inside the mode.
  Eigen::Matrix3d propagator(double t) const;
  // Rotation vector Omega with L1 v = Omega x v inside the mode.
  Eigen::Vector3d axis() const { return axis_; }

  Eigen::Matrix2cd dispersion_matrix(cplx nu) const;
  // Largest |D| difference between the production rule and a coarser one on
  // a set of probe frequencies.
  double quadrature_error() const { return quad_error_; }

 private:
  struct Kernel {
    std::vector<double> u;
    std::vector<Eigen::Matrix2d> k;  // weight * P E(u) G(u)
  };
  Kernel build_kernel(int panels, int nodes) const;
  static Eigen::Matrix2cd evaluate(const Kernel& kern, cplx nu);

  SteadyState steady_;
  SystemParams params_;
  Eigen::Matrix3d l1_;
  Eigen::Vector3d axis_;
  Kernel kernel_;
  double quad_error_ = 0.0;
};

SRLinearization build_sr_linearization(const SteadyState& steady, const SystemParams& p);

cplx dispersion_sr(cplx nu, const SRLinearization& lin);
// The Goldstone zero at nu = 0 (phase of the dipole) is always excluded.
DispersionRoot find_root_sr(const SRLinearization& lin, RootSearchOptions opt = {});

enum class Phase { NonSuperradiant, SteadySuperradiant, Multicomponent, Inconclusive };
const char* to_string(Phase ph);

struct PhaseResult {
  Phase phase = Phase::Inconclusive;
  SteadyState steady;
  std::optional<DispersionRoot> nu0;
  std::optional<DispersionRoot> nu1;
};

PhaseResult classify_phase(const SystemParams& p);

// Root of fn on [a, b] by bisection; fn(a) and fn(b) must differ in sign.
double bisect(const std::function<double(double)>& fn, double a, double b, double tol);

// N Gamma_c tau at which Re(nu0) = 0 for fixed Delta/(kappa/2).
double nonsr_threshold(double delta_over_halfkappa, double kappa_tau, double tol = 1e-10);

// Re(nu1) tau at a parameter point; nullopt when no superradiant solution.
std::optional<double> growth_rate_sr(const SystemParams& p);

}  // namespace sbeam
