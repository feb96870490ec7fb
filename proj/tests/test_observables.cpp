#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "sbeam/errors.hpp"
#include "sbeam/observables.hpp"

using namespace sbeam;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

TrajectoryRecord synthetic(double total, double ds, int n_atoms,
                           const std::function<cd(double)>& j) {
  TrajectoryRecord r;
  r.n_atoms = n_atoms;
  r.tau = 1.0;
  const auto n = static_cast<std::size_t>(std::llround(total / ds));
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) * ds;
    r.times.push_back(t);
    r.j.push_back(j(t));
  }
  return r;
}

// complex Ornstein-Uhlenbeck process rotating at omega
TrajectoryRecord noisy_line(std::mt19937_64& gen, double omega, double gamma, double total,
                            double ds) {
  std::normal_distribution<double> n01;
  const cd step = std::exp(cd(-gamma, -omega) * ds);
  const double sd = std::sqrt((1.0 - std::exp(-2.0 * gamma * ds)) / 2.0);
  cd z(n01(gen) * std::sqrt(0.5), n01(gen) * std::sqrt(0.5));
  return synthetic(total, ds, 1, [&](double) {
    const cd out = z;
    z = step * z + cd(sd * n01(gen), sd * n01(gen));
    return out;
  });
}

}  // namespace

TEST_CASE("power and dipole moments from synthetic records") {
  const auto p = SystemParams::from_groups(20.0, 0.0, 100.0, 100);
  const auto zero = synthetic(60.0, 0.05, 100, [](double) { return cd(0.0); });
  CHECK(output_power({zero}, p) == 0.0);
  CHECK(mean_dipole_squared({zero}) == 0.0);
  CHECK_THROWS_AS(g2_zero({zero}), DivisionUnstable);

  const auto ring = synthetic(60.0, 0.05, 100, [](double t) { return 30.0 * std::polar(1.0, 2.0 * t); });
  CHECK(mean_dipole_squared({ring}) == doctest::Approx(0.09));
  // Gamma_c tau |J|^2 / N = (G / N^2) 900
  CHECK(output_power({ring}, p) == doctest::Approx(20.0 * 900.0 / 1e4));
  CHECK(g2_zero({ring}) == doctest::Approx(1.0).epsilon(1e-12));

  const auto detuned = SystemParams::from_groups(20.0, 1.0, 100.0, 100);
  CHECK(output_power({ring}, detuned) == doctest::Approx(0.5 * 20.0 * 900.0 / 1e4));
}

TEST_CASE("insufficient data") {
  const auto p = SystemParams::from_groups(20.0, 0.0, 100.0, 100);
  const auto short_run = synthetic(30.0, 0.05, 100, [](double) { return cd(1.0); });
  CHECK_THROWS_AS(output_power({short_run}, p), InsufficientData);
  CHECK_NOTHROW(output_power({short_run}, p, 10.0, 20.0));
  CHECK_THROWS_AS(output_power({}, p), InsufficientData);
  CHECK_THROWS_AS(output_power({short_run}, p, 40.0, 0.0), InsufficientData);
  CHECK_THROWS_AS(output_power_field({short_run}, p, 10.0, 0.0), InsufficientData);
  SpectrumOptions o;
  o.t_cut = 25.0;
  CHECK_THROWS_AS(spectrum({short_run}, o), InsufficientData);
}

TEST_CASE("g2 of a Gaussian field") {
  std::mt19937_64 gen(11);
  std::vector<TrajectoryRecord> recs;
  for (int r = 0; r < 20; ++r) recs.push_back(noisy_line(gen, 0.0, 0.5, 210.0, 0.1));
  // roughly 20 * 200 / 2 independent samples
  const double sigma = std::sqrt(20.0 / 2000.0);
  CHECK(std::abs(g2_zero(recs) - 2.0) < 3.0 * sigma);
}

TEST_CASE("spectrum of a pure tone") {
  for (double omega : {0.0, 3.0, -5.5}) {
    const auto rec = synthetic(60.0, 0.05, 1, [&](double t) { return std::polar(1.0, -omega * t); });
    const auto s = spectrum({rec});
    CAPTURE(omega);
    REQUIRE(s.frequencies.size() == s.magnitude.size());
    const std::size_t n = s.frequencies.size();
    for (std::size_t i = 0; i < n; ++i) CHECK(s.frequencies[i] == -s.frequencies[n - 1 - i]);
    CHECK(s.frequencies.back() >= 4.0 * kPi);
    CHECK(*std::max_element(s.magnitude.begin(), s.magnitude.end()) == 1.0);
    CHECK(s.resolution == doctest::Approx(2.0 * kPi / 20.0));
    const auto peaks = peak_find(s);
    REQUIRE(peaks.size() == 1);
    CHECK(std::abs(peaks[0].nu - omega) <= s.spacing);
    // |sum| over the window equals t_cut at the line
    const auto top = std::max_element(s.raw.begin(), s.raw.end());
    CHECK(*top == doctest::Approx(20.0).epsilon(0.01));
  }
}

TEST_CASE("two tones and a noise floor") {
  const auto rec = synthetic(60.0, 0.05, 1, [](double t) {
    return std::polar(1.0, -2.0 * t) + 0.6 * std::polar(1.0, 7.0 * t);
  });
  const auto peaks = peak_find(spectrum({rec}));
  REQUIRE(peaks.size() == 2);
  CHECK(peaks[0].nu == doctest::Approx(2.0).epsilon(0.05));
  CHECK(peaks[1].nu == doctest::Approx(-7.0).epsilon(0.05));
  CHECK(peaks[1].magnitude == doctest::Approx(0.6).epsilon(0.05));

  std::mt19937_64 gen(3);
  std::vector<TrajectoryRecord> recs;
  for (int r = 0; r < 30; ++r) recs.push_back(noisy_line(gen, 0.0, 0.05, 60.0, 0.05));
  SpectrumOptions o;
  o.sliding_average = true;
  const auto s = spectrum(recs, o);
  const auto noisy = peak_find(s);
  REQUIRE_FALSE(noisy.empty());
  CHECK(std::abs(noisy[0].nu) <= s.resolution);
  for (const auto& pk : noisy) CHECK(pk.prominence >= 0.1);
}

TEST_CASE("spectrum is invariant under a global phase") {
  std::mt19937_64 gen(5);
  std::vector<TrajectoryRecord> a, b;
  for (int r = 0; r < 4; ++r) {
    a.push_back(noisy_line(gen, 1.3, 0.2, 40.0, 0.05));
    b.push_back(a.back());
    for (auto& z : b.back().j) z = cd(-z.imag(), z.real());
  }
  for (bool sliding : {false, true}) {
    SpectrumOptions o;
    o.sliding_average = sliding;
    const auto sa = spectrum(a, o);
    const auto sb = spectrum(b, o);
    CHECK(sa.raw == sb.raw);
  }
}

TEST_CASE("discrete Parseval identity over one period of the frequency grid") {
  std::mt19937_64 gen(7);
  for (const auto& rec : {noisy_line(gen, 2.0, 0.3, 20.0, 0.05),
                          synthetic(20.0, 0.05, 1, [](double t) { return std::polar(2.0, -4.0 * t); })}) {
  SpectrumOptions o;
  o.t0 = 2.0;
  o.t_cut = 5.0;
  o.nu_max = kPi / 0.05 * (1.0 - 1e-12);
  const auto s = spectrum({rec}, o);
  // 8 nc + 1 points from -pi/ds to pi/ds; drop the duplicated endpoint
  double lhs = 0.0;
  for (std::size_t i = 0; i + 1 < s.raw.size(); ++i) lhs += s.raw[i] * s.raw[i];
  lhs *= s.spacing / (2.0 * kPi);

  const std::size_t i0 = 40, nc = 100;
  double rhs = 0.0;
  for (std::size_t k = 0; k <= nc; ++k) {
    const double w = (k == 0 || k == nc) ? 0.025 : 0.05;
    rhs += std::norm(w * std::conj(rec.j[i0 + k]) * rec.j[i0]);
  }
  rhs /= 0.05;
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("standard error of g2 falls as the square root of the run count") {
  auto spread = [](int runs, std::uint64_t seed0) {
    std::vector<double> vals;
    for (int rep = 0; rep < 128; ++rep) {
      std::mt19937_64 gen(seed0 + static_cast<std::uint64_t>(rep));
      std::vector<TrajectoryRecord> recs;
      for (int r = 0; r < runs; ++r) recs.push_back(noisy_line(gen, 0.0, 0.5, 35.0, 0.05));
      vals.push_back(g2_zero(recs));
    }
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= vals.size();
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    return std::sqrt(var / (vals.size() - 1));
  };
  const double ratio = spread(16, 5000) / spread(8, 9000);
  CHECK(ratio == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.25));
}

TEST_CASE("half-Hann taper removes the ripple around a line") {
  const auto rec = synthetic(60.0, 0.05, 1, [](double t) { return std::polar(1.0, -3.0 * t); });
  SpectrumOptions o;
  const auto rect = spectrum({rec}, o);
  o.hann_window = true;
  const auto hann = spectrum({rec}, o);
  CHECK(hann.hann_window);
  CHECK(peak_find(rect, 0.01, 0.0).size() > 3);
  CHECK(peak_find(hann, 0.01, 0.0).size() == 1);
}

TEST_CASE("sliding average uses every admissible origin") {
  const auto rec = synthetic(60.0, 0.05, 1, [](double t) { return std::polar(1.0, t); });
  SpectrumOptions o;
  CHECK(spectrum({rec}, o).correlation_samples == 1);
  o.sliding_average = true;
  // origins from t0 = 10 up to 60 - t_cut = 40
  CHECK(spectrum({rec, rec}, o).correlation_samples == 2 * 601);
}
