#include "sbeam/stability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "sbeam/errors.hpp"
#include "sbeam/rotation.hpp"

namespace sbeam {

namespace {

struct Rule {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

template <unsigned N>
Rule gauss_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& a = G::abscissa();
  const auto& wt = G::weights();
  Rule r;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) {
      r.x.push_back(0.0);
      r.w.push_back(wt[i]);
      continue;
    }
    r.x.push_back(-a[i]);
    r.w.push_back(wt[i]);
    r.x.push_back(a[i]);
    r.w.push_back(wt[i]);
  }
  return r;
}

const Rule& rule_for(int nodes) {
  static const Rule r15 = gauss_rule<15>();
  static const Rule r20 = gauss_rule<20>();
  static const Rule r30 = gauss_rule<30>();
  switch (nodes) {
    case 15: return r15;
    case 20: return r20;
    case 30: return r30;
    default: throw std::invalid_argument("unsupported Gauss-Legendre order");
  }
}

// F(z) = (1/z)(1 - (1 - e^{-z})/z), entire with F(0) = 1/2
cplx box_response(cplx z) {
  // series well past |z| = 1e-3: the closed form loses ~1/|z|^2 to cancellation
  if (std::abs(z) < 0.5) {
    cplx term = 0.5;
    cplx sum = term;
    for (int k = 1; k < 24; ++k) {
      term *= -z / static_cast<double>(k + 2);
      sum += term;
    }
    return sum;
  }
  return (1.0 - (1.0 - std::exp(-z)) / z) / z;
}

}  // namespace

std::vector<DispersionRoot> scan_roots(const std::function<cplx(cplx)>& d, double tau,
                                       Relation relation, const RootSearchOptions& opt) {
  if (opt.n_re < 3 || opt.n_im < 3) throw std::invalid_argument("root grid too small");
  const int nr = opt.n_re;
  const int ni = opt.n_im;
  std::vector<double> mag(static_cast<std::size_t>(nr * ni));
  auto node = [&](int i, int j) {
    const double re = opt.re_min + (opt.re_max - opt.re_min) * i / (nr - 1);
    const double im = -opt.im_max + 2.0 * opt.im_max * j / (ni - 1);
    return cplx(re, im);
  };
  auto dz = [&](cplx z) { return d(z / tau); };
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < ni; ++j) mag[i * ni + j] = std::abs(dz(node(i, j)));

  const double h = 1e-6;  // in units of 1/tau
  std::vector<DispersionRoot> roots;
  for (int i = 1; i < nr - 1; ++i) {
    for (int j = 1; j < ni - 1; ++j) {
      const double m = mag[i * ni + j];
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di)
        for (int dj = -1; dj <= 1; ++dj)
          if (mag[(i + di) * ni + j + dj] < m) {
            is_min = false;
            break;
          }
      if (!is_min) continue;

      // off-axis start: with D(conj z) = conj D(z) a real iterate never leaves
      // the real axis and cannot reach a nearby conjugate pair
      cplx z = node(i, j) + cplx(0.0, 1e-3);
      int it = 0;
      cplx val = dz(z);
      for (; it < opt.max_newton; ++it) {
        // no absolute cut on |D|: near threshold the determinant is tiny over
        // a whole neighbourhood of the Goldstone zero
        if (val == 0.0) break;
        const cplx deriv = (dz(z + h) - dz(z - h)) / (2.0 * h);
        if (deriv == 0.0 || !std::isfinite(std::abs(deriv))) break;
        const cplx step = val / deriv;
        z -= step;
        val = dz(z);
        if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z))) break;
      }
      const double res = std::abs(val);
      if (!(res <= opt.tolerance)) continue;
      if (std::abs(z) < opt.exclude_radius) continue;
      const bool dup = std::any_of(roots.begin(), roots.end(), [&](const DispersionRoot& r) {
        return std::abs(r.nu * tau - z) < 1e-6;
      });
      if (dup) continue;
      DispersionRoot r;
      r.nu = z / tau;
      r.relation = relation;
      r.residual = res;
      r.basin = node(i, j) / tau;
      r.iterations = it;
      roots.push_back(r);
    }
  }
  // conjugate partners differ in real part only by rounding; order them by
  // imaginary part so the reported member does not depend on it
  std::sort(roots.begin(), roots.end(), [tau](const DispersionRoot& a, const DispersionRoot& b) {
    const double ra = a.nu.real() * tau;
    const double rb = b.nu.real() * tau;
    if (std::abs(ra - rb) > 1e-8 * std::max(1.0, std::abs(ra))) return ra > rb;
    return a.nu.imag() < b.nu.imag();
  });
  return roots;
}

cplx dispersion_nonsr(cplx nu, const SystemParams& p) {
  const ChiAngle chi = ChiAngle::bad_cavity(p);
  const cplx phase = std::polar(1.0, -chi.value());
  return 1.0 - 0.5 * p.n_gamma_tau() * chi.cos() * phase * box_response(nu * p.tau());
}

double nonsr_growth_bound(const SystemParams& p) {
  const double gc = p.n_gamma_tau() * ChiAngle::bad_cavity(p).cos();
  if (!(gc > 4.0)) return 0.0;
  // |F(z)| <= F(Re z) for Re z > 0, so a zero needs F(Re z) >= 2 / (G cos chi)
  const double target = 2.0 / gc;
  double hi = 1.0;
  while (box_response(hi).real() > target) hi *= 2.0;
  return bisect([&](double a) { return box_response(a).real() - target; }, 0.0, hi, 1e-9);
}

DispersionRoot find_root_nonsr(const SystemParams& p, const RootSearchOptions& opt) {
  RootSearchOptions o = opt;
  const double bound = nonsr_growth_bound(p);
  if (bound > 1e6) throw NoRootFound("non-superradiant growth rate beyond the search range");
  if (bound + 1.0 > o.re_max) {
    const double spacing = (o.re_max - o.re_min) / (o.n_re - 1);
    o.re_max = std::ceil(bound + 1.0);
    o.n_re = static_cast<int>(std::lround((o.re_max - o.re_min) / spacing)) + 1;
  }
  const auto roots = scan_roots([&p](cplx nu) { return dispersion_nonsr(nu, p); }, p.tau(),
                                Relation::NonSR, o);
  if (roots.empty()) throw NoRootFound("no zero of the non-superradiant dispersion in window");
  return roots.front();
}

SRLinearization::SRLinearization(const SteadyState& steady, const SystemParams& p, int panels,
                                 int nodes_per_panel)
    : steady_(steady), params_(p) {
  if (steady.branch != Branch::Superradiant || !steady.omega)
    throw DomainError("linearization requires a superradiant steady state");
  const double c = steady.chi.cos();
  const double s = steady.chi.sin();
  const double gamma = p.gamma_c() * c;
  const double a = 0.5 * gamma * steady.j0_par * p.n_atoms();
  const double om = *steady.omega;
  l1_ << 0.0, om, a * c,
         -om, 0.0, a * s,
         -a * c, -a * s, 0.0;
  axis_ = Eigen::Vector3d(-a * s, a * c, -om);

  kernel_ = build_kernel(panels, nodes_per_panel);
  const Kernel coarse = build_kernel(12, 15);
  const double tau = p.tau();
  const cplx probes[] = {{0.0, 0.0}, {0.0, 6.0}, {2.0, -9.0}, {-4.0, 12.0}, {5.0, 3.0}};
  for (const cplx& z : probes) {
    const cplx nu = z / tau;
    const double diff = (evaluate(kernel_, nu) - evaluate(coarse, nu)).cwiseAbs().maxCoeff();
    quad_error_ = std::max(quad_error_, diff);
  }
  if (!(quad_error_ <= 1e-9))
    throw QuadratureFailure("dispersion quadrature did not reach 1e-9 (estimate " +
                            std::to_string(quad_error_) + ")");
}

Eigen::Matrix3d SRLinearization::L1(double x) const {
  if (mode_function(x, params_) == 0.0) return Eigen::Matrix3d::Zero();
  return l1_;
}

Eigen::Matrix<double, 3, 2> SRLinearization::S0(double x) const {
  Eigen::Matrix<double, 3, 2> m = Eigen::Matrix<double, 3, 2>::Zero();
  if (mode_function(x, params_) == 0.0) return m;
  const double c = steady_.chi.cos();
  const double s = steady_.chi.sin();
  const double half_gamma = 0.5 * params_.gamma_c() * c;
  const Eigen::Vector3d b = homogeneous_density(params_) * bloch_vector(steady_, params_, x);
  m << c * b.z(), -s * b.z(),
       s * b.z(), c * b.z(),
       -c * b.x() - s * b.y(), s * b.x() - c * b.y();
  return half_gamma * m;
}

Eigen::Matrix3d SRLinearization::propagator(double t) const { return rotation_matrix(axis_, t); }

SRLinearization::Kernel SRLinearization::build_kernel(int panels, int nodes) const {
  const Rule& outer = rule_for(nodes);
  const Rule& inner = rule_for(30);
  const double tau = params_.tau();
  const double w = params_.w();
  const double vx = params_.vx();
  Kernel kern;
  for (int pnl = 0; pnl < panels; ++pnl) {
    const double a = tau * pnl / panels;
    const double b = tau * (pnl + 1) / panels;
    for (std::size_t k = 0; k < outer.x.size(); ++k) {
      const double u = 0.5 * (b - a) * (outer.x[k] + 1.0) + a;
      const double wu = 0.5 * (b - a) * outer.w[k];
      // source points y in [-w, w - vx u]
      const double top = w - vx * u;
      Eigen::Matrix<double, 3, 2> g = Eigen::Matrix<double, 3, 2>::Zero();
      for (std::size_t m = 0; m < inner.x.size(); ++m) {
        const double y = 0.5 * (top + w) * (inner.x[m] + 1.0) - w;
        g += (0.5 * (top + w) * inner.w[m]) * S0(y);
      }
      const Eigen::Matrix<double, 3, 2> moved = propagator(u) * g;
      kern.u.push_back(u);
      kern.k.push_back(wu * moved.topRows<2>());
    }
  }
  return kern;
}

Eigen::Matrix2cd SRLinearization::evaluate(const Kernel& kern, cplx nu) {
  Eigen::Matrix2cd d = Eigen::Matrix2cd::Identity();
  for (std::size_t i = 0; i < kern.u.size(); ++i)
    d -= std::exp(-nu * kern.u[i]) * kern.k[i].cast<cplx>();
  return d;
}

Eigen::Matrix2cd SRLinearization::dispersion_matrix(cplx nu) const {
  return evaluate(kernel_, nu);
}

SRLinearization build_sr_linearization(const SteadyState& steady, const SystemParams& p) {
  return SRLinearization(steady, p);
}

cplx dispersion_sr(cplx nu, const SRLinearization& lin) {
  return lin.dispersion_matrix(nu).determinant();
}

DispersionRoot find_root_sr(const SRLinearization& lin, RootSearchOptions opt) {
  opt.exclude_radius = std::max(opt.exclude_radius, 1e-5);
  const auto roots = scan_roots([&lin](cplx nu) { return dispersion_sr(nu, lin); },
                                lin.params().tau(), Relation::SR, opt);
  if (roots.empty()) throw NoRootFound("no zero of the superradiant dispersion in window");
  return roots.front();
}

const char* to_string(Phase ph) {
  switch (ph) {
    case Phase::NonSuperradiant: return "non_superradiant";
    case Phase::SteadySuperradiant: return "steady_superradiant";
    case Phase::Multicomponent: return "multicomponent";
    case Phase::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

PhaseResult classify_phase(const SystemParams& p) {
  PhaseResult out;
  out.steady = solve_steady_state(p);
  const double edge = 1e-6 / p.tau();
  try {
    out.nu0 = find_root_nonsr(p);
  } catch (const NoRootFound&) {
  }
  if (out.steady.branch == Branch::NonSuperradiant) {
    if (out.nu0 && std::abs(out.nu0->nu.real()) < edge)
      out.phase = Phase::Inconclusive;
    else
      out.phase = Phase::NonSuperradiant;
    return out;
  }
  try {
    out.nu1 = find_root_sr(SRLinearization(out.steady, p));
  } catch (const NoRootFound&) {
    out.phase = Phase::Inconclusive;
    return out;
  }
  const double re = out.nu1->nu.real();
  if (std::abs(re) < edge)
    out.phase = Phase::Inconclusive;
  else
    out.phase = re < 0.0 ? Phase::SteadySuperradiant : Phase::Multicomponent;
  return out;
}

double bisect(const std::function<double(double)>& fn, double a, double b, double tol) {
  double fa = fn(a);
  const double fb = fn(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) throw NoRootFound("bisection interval does not bracket a root");
  for (int it = 0; it < 200 && std::abs(b - a) > tol; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = fn(m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

double nonsr_threshold(double delta_over_halfkappa, double kappa_tau, double tol) {
  auto growth = [&](double g) {
    const auto p = SystemParams::from_groups(g, delta_over_halfkappa, kappa_tau, 1);
    return find_root_nonsr(p).nu.real();
  };
  // |F(z)| <= F(0) = 1/2 for Re z >= 0, so no growth below 4 / cos(chi)
  const double c = 1.0 / std::sqrt(1.0 + delta_over_halfkappa * delta_over_halfkappa);
  double lo = 4.0 / c * (1.0 - 1e-6);
  double hi = std::max(8.0, 2.0 * lo);
  while (growth(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e4) throw NoRootFound("threshold outside the scanned range");
  }
  return bisect(growth, lo, hi, tol);
}

std::optional<double> growth_rate_sr(const SystemParams& p) {
  const SteadyState s = solve_steady_state(p);
  if (s.branch != Branch::Superradiant) return std::nullopt;
  return find_root_sr(SRLinearization(s, p)).nu.real() * p.tau();
}

}  // namespace sbeam
