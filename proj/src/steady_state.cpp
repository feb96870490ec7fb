#include "sbeam/steady_state.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sbeam/errors.hpp"

namespace sbeam {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sinc(double y) {
  if (std::abs(y) < 1e-4) return 1.0 - y * y / 6.0;
  return std::sin(y) / y;
}

double sinc_prime(double y) {
  if (std::abs(y) < 1e-4) return -y / 3.0;
  return (y * std::cos(y) - std::sin(y)) / (y * y);
}

// q(xi) = 1 - (G/4) sinc^2(xi/2); increasing on (0, 2pi)
double q_of(double g, double xi) {
  const double s = sinc(0.5 * xi);
  return 1.0 - 0.25 * g * s * s;
}

double q_prime(double g, double xi) {
  const double y = 0.5 * xi;
  return -0.25 * g * sinc(y) * sinc_prime(y);
}

void require_superradiant(const SteadyState& s) {
  if (s.branch != Branch::Superradiant)
    throw DomainError("Bloch trace requires a superradiant steady state");
}

}  // namespace

const char* to_string(Branch b) {
  return b == Branch::Superradiant ? "superradiant" : "non_superradiant";
}

double one_minus_sinc(double x) {
  if (std::abs(x) < 0.1) {
    const double x2 = x * x;
    return x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0 * (1.0 - x2 / 110.0))));
  }
  return 1.0 - std::sin(x) / x;
}

double xi_residual(double n_gamma_tau, double xi) {
  const double s = std::sin(0.5 * xi);
  return xi - n_gamma_tau * s * s / xi;
}

double f_residual(double n_gamma_tau, const ChiAngle& chi, double xi, double f) {
  return -xi * chi.tan() - 0.5 * n_gamma_tau * f / std::sqrt(1.0 + f * f) * one_minus_sinc(xi);
}

double solve_xi(double n_gamma_tau) {
  if (!(n_gamma_tau > 0.0)) throw std::invalid_argument("n_gamma_tau must be > 0");
  if (!(n_gamma_tau > 4.0))
    throw NoSuperradiantSolution("no superradiant solution for N Gamma_c tau = " +
                                 std::to_string(n_gamma_tau) + " <= 4");
  double lo = 0.0;
  double hi = kTwoPi;
  double xi = std::sqrt(24.0 * (1.0 - 4.0 / n_gamma_tau));  // small-xi expansion
  if (!(xi > lo && xi < hi)) xi = 0.5 * (lo + hi);
  for (int it = 0; it < 500; ++it) {
    const double q = q_of(n_gamma_tau, xi);
    if (q == 0.0) return xi;
    if (q < 0.0) lo = xi; else hi = xi;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return 0.5 * (lo + hi);
    const double dq = q_prime(n_gamma_tau, xi);
    double next = dq > 0.0 ? xi - q / dq : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - xi) <= 1e-16 * xi) return next;
    xi = next;
  }
  throw NoConvergence("xi solver did not converge", q_of(n_gamma_tau, xi));
}

double solve_f(double n_gamma_tau, const ChiAngle& chi, double xi) {
  if (!(xi > 0.0)) throw std::invalid_argument("xi must be > 0");
  if (chi.value() == 0.0) return 0.0;
  const double u = -2.0 * xi * chi.tan() / (n_gamma_tau * one_minus_sinc(xi));
  if (!(std::abs(u) < 1.0))
    throw Infeasible("no monochromatic superradiant solution at this detuning");
  return u / std::sqrt(1.0 - u * u);
}

SteadyState solve_steady_state(const SystemParams& p) {
  SteadyState s;
  s.chi = ChiAngle::bad_cavity(p);
  const double g = p.n_gamma_tau();
  if (!(g > 4.0)) return s;
  const double xi = solve_xi(g);
  double f = 0.0;
  try {
    f = solve_f(g, s.chi, xi);
  } catch (const Infeasible&) {
    return s;
  }
  const double inv_norm = 1.0 / std::sqrt(1.0 + f * f);
  s.xi = xi;
  s.f = f;
  s.branch = Branch::Superradiant;
  s.j0_par = 2.0 * xi * inv_norm / (g * s.chi.cos());
  s.omega = -f * xi * inv_norm / p.tau();
  s.residual_xi = xi_residual(g, xi);
  s.residual_f = f_residual(g, s.chi, xi, f);
  return s;
}

double superradiant_threshold(double delta_over_halfkappa, double tol) {
  const double d = std::abs(delta_over_halfkappa);
  if (d == 0.0) return 4.0;
  const ChiAngle chi(std::atan(d));
  auto feasible = [&](double g) {
    if (!(g > 4.0)) return false;
    const double xi = solve_xi(g);
    return 2.0 * xi * chi.tan() < g * one_minus_sinc(xi);
  };
  double lo = 4.0;
  double hi = 8.0;
  while (!feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw NoConvergence("threshold search diverged", hi);
  }
  while (hi - lo > tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) hi = mid; else lo = mid;
  }
  return 0.5 * (lo + hi);
}

double bloch_K(const SteadyState& s, const SystemParams& p, double x) {
  require_superradiant(s);
  const double theta = s.xi * (x + p.w()) / (4.0 * p.w());
  if (s.f == 0.0) return 2.0 * theta;
  return 2.0 * std::asin(std::sin(theta) / std::sqrt(1.0 + s.f * s.f));
}

double bloch_psi(const SteadyState& s, const SystemParams& p, double x) {
  require_superradiant(s);
  if (s.f == 0.0) return s.chi.value();
  const double theta = s.xi * (x + p.w()) / (4.0 * p.w());
  const double sk = std::sin(theta) / std::sqrt(1.0 + s.f * s.f);
  // continuous branch with psi(-w) = chi
  return s.chi.value() + std::atan2(s.f * sk, std::cos(theta));
}

Eigen::Vector3d bloch_vector(const SteadyState& s, const SystemParams& p, double x) {
  require_superradiant(s);
  const double theta = s.xi * (x + p.w()) / (4.0 * p.w());
  const double sh = std::sin(theta) / std::sqrt(1.0 + s.f * s.f);  // sin(K/2)
  const double along = 2.0 * sh * std::cos(theta);                // sin K cos(psi - chi)
  const double across = 2.0 * s.f * sh * sh;                       // sin K sin(psi - chi)
  const double c = s.chi.cos();
  const double sn = s.chi.sin();
  return {along * c - across * sn, along * sn + across * c, 1.0 - 2.0 * sh * sh};
}

BlochTrace bloch_trace(const SteadyState& s, const SystemParams& p, int n_samples) {
  require_superradiant(s);
  if (n_samples < 2) throw std::invalid_argument("n_samples must be >= 2");
  BlochTrace tr;
  tr.x.reserve(n_samples);
  tr.K.reserve(n_samples);
  tr.psi.reserve(n_samples);
  tr.b.reserve(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    const double x = -p.w() + 2.0 * p.w() * i / (n_samples - 1);
    tr.x.push_back(x);
    tr.K.push_back(bloch_K(s, p, x));
    tr.psi.push_back(bloch_psi(s, p, x));
    tr.b.push_back(bloch_vector(s, p, x));
  }
  return tr;
}

double pulling_coefficient(double n_gamma_tau, double kappa_tau) {
  if (!(kappa_tau > 0.0)) throw std::invalid_argument("kappa_tau must be > 0");
  const double xi = solve_xi(n_gamma_tau);
  // kappa C_perp / 2 in units where tau = 1
  const double half_kc = 0.25 * kappa_tau * n_gamma_tau * one_minus_sinc(xi) / (xi * xi);
  return 1.0 / (half_kc + 1.0);
}

double pulling_coefficient(const SystemParams& p) {
  return pulling_coefficient(p.n_gamma_tau(), p.kappa_tau());
}

double pulling_kappa_tau_limit(double n_gamma_tau) {
  const double xi = solve_xi(n_gamma_tau);
  return 4.0 * xi * xi / (n_gamma_tau * one_minus_sinc(xi));
}

}  // namespace sbeam
