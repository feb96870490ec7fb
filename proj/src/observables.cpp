#include "sbeam/observables.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "sbeam/errors.hpp"

namespace sbeam {

namespace {

struct Moments {
  double m2 = 0.0;
  double m4 = 0.0;
  double a2 = 0.0;
  std::size_t count = 0;
  double span = 0.0;
  double tau = 1.0;
  int n_atoms = 1;
};

Moments moments_after(const std::vector<TrajectoryRecord>& records, double t0) {
  if (records.empty()) throw InsufficientData("no trajectories");
  Moments m;
  m.tau = records.front().tau;
  m.n_atoms = records.front().n_atoms;
  for (const auto& rec : records) {
    const double start = t0 * rec.tau;
    for (std::size_t i = 0; i < rec.size(); ++i) {
      if (!(rec.times[i] > start)) continue;
      const double j2 = std::norm(rec.j[i]);
      m.m2 += j2;
      m.m4 += j2 * j2;
      if (rec.has_field()) m.a2 += std::norm(rec.alpha[i]);
      ++m.count;
    }
    if (rec.size() > 0) m.span = std::max(m.span, (rec.times.back() - start) / rec.tau);
  }
  if (m.count == 0) throw InsufficientData("no samples after the transient cut");
  m.m2 /= static_cast<double>(m.count);
  m.m4 /= static_cast<double>(m.count);
  m.a2 /= static_cast<double>(m.count);
  return m;
}

void require_span(const Moments& m, double min_span) {
  if (m.span + 1e-9 < min_span)
    throw InsufficientData("post-transient record shorter than required span");
}

}  // namespace

double output_power(const std::vector<TrajectoryRecord>& records, const SystemParams& p,
                    double t0, double min_span) {
  const Moments m = moments_after(records, t0);
  require_span(m, min_span);
  const double c = ChiAngle::bad_cavity(p).cos();
  return p.gamma_c() * c * c * p.tau() * m.m2 / p.n_atoms();
}

double output_power_field(const std::vector<TrajectoryRecord>& records, const SystemParams& p,
                          double t0, double min_span) {
  const Moments m = moments_after(records, t0);
  require_span(m, min_span);
  if (!records.front().has_field()) throw InsufficientData("records carry no cavity field");
  return p.kappa_tau() * (m.a2 - 0.5) / p.n_atoms();
}

double g2_zero(const std::vector<TrajectoryRecord>& records, double t0) {
  const Moments m = moments_after(records, t0);
  const double n = m.n_atoms;
  if (m.m2 < 1e-12 * n * n) throw DivisionUnstable("<|J|^2> too small for g2(0)");
  return m.m4 / (m.m2 * m.m2);
}

double mean_dipole_squared(const std::vector<TrajectoryRecord>& records, double t0) {
  const Moments m = moments_after(records, t0);
  return m.m2 / (static_cast<double>(m.n_atoms) * m.n_atoms);
}

SpectrumResult spectrum(const std::vector<TrajectoryRecord>& records, const SpectrumOptions& opt) {
  if (records.empty()) throw InsufficientData("no trajectories");
  if (!(opt.t_cut > 0.0) || !(opt.t0 >= 0.0) || !(opt.nu_max > 0.0))
    throw std::invalid_argument("spectrum window parameters must be positive");
  const auto& first = records.front();
  if (first.size() < 2) throw InsufficientData("record too short for a spectrum");
  const double tau = first.tau;
  const double ds = (first.times[1] - first.times[0]) / tau;
  const auto i0 = static_cast<std::size_t>(std::llround(opt.t0 / ds));
  const auto nc = static_cast<std::size_t>(std::llround(opt.t_cut / ds));
  if (nc < 2) throw InsufficientData("t_cut shorter than two samples");

  // C(t_k) = <J*(t0 + t_k) J(t0)>
  std::vector<std::complex<double>> corr(nc + 1);
  std::size_t count = 0;
  for (const auto& rec : records) {
    if (rec.size() <= i0 + nc) throw InsufficientData("record shorter than t0 + t_cut");
    const std::size_t last_origin = opt.sliding_average ? rec.size() - 1 - nc : i0;
    for (std::size_t o = i0; o <= last_origin; ++o) {
      const std::complex<double> ref = rec.j[o];
      for (std::size_t k = 0; k <= nc; ++k) corr[k] += std::conj(rec.j[o + k]) * ref;
      ++count;
    }
  }
  for (auto& c : corr) c /= static_cast<double>(count);

  const double t_cut = static_cast<double>(nc) * ds;
  std::vector<double> weight(nc + 1, ds);
  weight.front() *= 0.5;
  weight.back() *= 0.5;
  if (opt.hann_window)
    for (std::size_t k = 0; k <= nc; ++k)
      weight[k] *= 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(k) / nc));

  SpectrumResult out;
  out.resolution = 2.0 * std::numbers::pi / t_cut;
  out.spacing = std::numbers::pi / (4.0 * t_cut);
  out.sliding_average = opt.sliding_average;
  out.hann_window = opt.hann_window;
  out.correlation_samples = count;
  const auto half = static_cast<long long>(std::ceil(opt.nu_max / out.spacing - 1e-9));
  double peak = 0.0;
  for (long long m = -half; m <= half; ++m) {
    const double nu = static_cast<double>(m) * out.spacing;
    // e^{-i nu t_k} by recurrence would drift over long windows; use polar
    std::complex<double> s = 0.0;
    for (std::size_t k = 0; k <= nc; ++k)
      s += weight[k] * std::polar(1.0, -nu * static_cast<double>(k) * ds) * corr[k];
    out.frequencies.push_back(nu);
    out.raw.push_back(std::abs(s));
    peak = std::max(peak, std::abs(s));
  }
  out.magnitude.reserve(out.raw.size());
  for (double r : out.raw) out.magnitude.push_back(peak > 0.0 ? r / peak : 0.0);
  return out;
}

std::vector<Peak> peak_find(const SpectrumResult& spec, double min_prominence,
                            double min_separation) {
  const auto& y = spec.magnitude;
  const std::size_t n = y.size();
  std::vector<Peak> peaks;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(y[i] > y[i - 1])) continue;
    // plateau: take the left edge and require a strict drop on the right
    std::size_t r = i + 1;
    while (r < n && y[r] == y[i]) ++r;
    if (r == n || !(y[r] < y[i])) continue;

    double left_min = y[i];
    for (std::size_t k = i; k-- > 0;) {
      if (y[k] > y[i]) break;
      left_min = std::min(left_min, y[k]);
    }
    double right_min = y[i];
    for (std::size_t k = r; k < n; ++k) {
      if (y[k] > y[i]) break;
      right_min = std::min(right_min, y[k]);
    }
    const double prominence = y[i] - std::max(left_min, right_min);
    if (prominence >= min_prominence) peaks.push_back({spec.frequencies[i], y[i], prominence});
    i = r - 1;
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const Peak& a, const Peak& b) { return a.magnitude > b.magnitude; });
  const double gap = min_separation * spec.resolution;
  std::vector<Peak> kept;
  for (const auto& pk : peaks) {
    const bool close = std::any_of(kept.begin(), kept.end(), [&](const Peak& k) {
      return std::abs(k.nu - pk.nu) < gap;
    });
    if (!close) kept.push_back(pk);
  }
  return kept;
}

}  // namespace sbeam
