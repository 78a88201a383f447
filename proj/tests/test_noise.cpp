#include "doctest.h"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "qadd/noise.hpp"
#include "qadd/problems.hpp"
#include "qadd/rng.hpp"

using namespace qadd;

TEST_CASE("two-peak spectrum has a 3:1 height ratio at the centers") {
  const NoiseSpectrum s = lorentzian_spectrum(true, 3.0, 750.0);
  REQUIRE(s.peaks.size() == 2);
  CHECK(s.peaks[0].center_hz == 50.0);
  CHECK(s.peaks[1].center_hz == 150.0);
  // component peak heights (cross-peak tails excluded): w/(2 pi gamma)
  const double h1 = s.peaks[0].weight / (2.0 * std::numbers::pi * s.peaks[0].half_width_hz);
  const double h2 = s.peaks[1].weight / (2.0 * std::numbers::pi * s.peaks[1].half_width_hz);
  CHECK(h1 / h2 == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("single-peak spectrum is maximal at its center") {
  const NoiseSpectrum s = lorentzian_spectrum(false, 3.0, 1.0, 10.0);
  const double at_center = s.density(10.0);
  for (double f : {0.0, 5.0, 9.0, 11.0, 20.0, 100.0})
    CHECK(s.density(f) < at_center);
}

TEST_CASE("zero amplitude gives identically zero traces") {
  const NoiseSpectrum s = lorentzian_spectrum(true, 3.0, 0.0);
  const NoiseTrace t = sample_trace(s, 2000, 0.1, 3, true, 7);
  CHECK(t.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sampled traces are rescaled to the requested amplitude") {
  const NoiseSpectrum s = lorentzian_spectrum(true, 3.0, 750.0);
  const NoiseTrace t = sample_trace(s, 5000, 0.1, 2, true, 42);
  for (int q = 0; q < 2; ++q) {
    const auto col = t.values.col(q);
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().mean());
    CHECK(sd == doctest::Approx(750.0).epsilon(1e-9));
  }
}

TEST_CASE("same seed reproduces the identical trace") {
  const NoiseSpectrum s = lorentzian_spectrum(true, 3.0, 500.0);
  const NoiseTrace a = sample_trace(s, 3000, 0.1, 2, false, 99);
  const NoiseTrace b = sample_trace(s, 3000, 0.1, 2, false, 99);
  CHECK(a.values == b.values);
  const NoiseTrace c = sample_trace(s, 3000, 0.1, 2, false, 100);
  CHECK(a.values != c.values);
}

TEST_CASE("correlated traces share one realization across qubits") {
  const NoiseSpectrum s = lorentzian_spectrum(true, 3.0, 500.0);
  const NoiseTrace t = sample_trace(s, 2000, 0.1, 4, true, 5);
  for (int q = 1; q < 4; ++q)
    CHECK((t.values.col(q) - t.values.col(0)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("uncorrelated traces have vanishing mean pairwise correlation") {
  const NoiseSpectrum s = lorentzian_spectrum(true, 3.0, 1.0);
  double acc = 0.0;
  const int n_seeds = 50;
  for (std::uint64_t seed = 0; seed < n_seeds; ++seed) {
    const NoiseTrace t = sample_trace(s, 20000, 10.0, 2, false, seed);
    Eigen::VectorXd a = t.values.col(0), b = t.values.col(1);
    a.array() -= a.mean();
    b.array() -= b.mean();
    acc += a.dot(b) / (a.norm() * b.norm());
  }
  CHECK(std::abs(acc / n_seeds) < 0.05);
}

TEST_CASE("periodogram peaks sit at 50 and 150 Hz") {
  // 1 s of data -> 1 Hz resolution; average the periodogram over 20 seeds
  const int n = 20000;
  const double duration = 1.0;
  const NoiseSpectrum s = lorentzian_spectrum(true, 3.0, 1.0);
  Eigen::VectorXd power = Eigen::VectorXd::Zero(n / 2);
  Eigen::FFT<double> fft;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const NoiseTrace t = sample_trace(s, n, duration, 1, true, seed);
    std::vector<double> x(t.values.col(0).begin(), t.values.col(0).end());
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, x);
    for (int k = 0; k < n / 2; ++k) power[k] += std::norm(spec[k]);
  }
  // smooth over +-2 Hz and search below 300 Hz
  const double df = 1.0 / duration;
  const int kmax = static_cast<int>(300.0 / df);
  auto smoothed = [&](int k) {
    double acc = 0.0;
    for (int d = -2; d <= 2; ++d) acc += power[std::clamp(k + d, 0, n / 2 - 1)];
    return acc / 5.0;
  };
  int best1 = 1;
  for (int k = 1; k < kmax; ++k)
    if (smoothed(k) > smoothed(best1)) best1 = k;
  // second peak: exclude +-20 Hz around the first
  int best2 = -1;
  for (int k = 1; k < kmax; ++k) {
    if (std::abs(k - best1) * df < 20.0) continue;
    if (best2 < 0 || smoothed(k) > smoothed(best2)) best2 = k;
  }
  const double f1 = std::min(best1, best2) * df;
  const double f2 = std::max(best1, best2) * df;
  CHECK(std::abs(f1 - 50.0) <= 5.0);
  CHECK(std::abs(f2 - 150.0) <= 5.0);
}

TEST_CASE("static disorder: zero sigma, correlation, and amplitude statistics") {
  CHECK(static_disorder(0.0, 3, false, 1, 10).values.cwiseAbs().maxCoeff() == 0.0);

  const NoiseTrace corr = static_disorder(2.0, 5, true, 3, 4);
  for (int q = 1; q < 5; ++q)
    CHECK(corr.values(0, q) == corr.values(0, 0));
  for (int step = 1; step < 4; ++step)
    CHECK(corr.values(step, 0) == corr.values(0, 0));

  // law of large numbers: std over 1e5 independent draws
  double sum = 0.0, sum2 = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double v = static_disorder(1.0, 1, false, 1000 + i).values(0, 0);
    sum += v;
    sum2 += v * v;
  }
  const double sd = std::sqrt(sum2 / n - (sum / n) * (sum / n));
  CHECK(sd > 0.99);
  CHECK(sd < 1.01);
}

TEST_CASE("coupling disorder preserves the sparsity pattern") {
  const IsingModel m = paper_fixture("mot5");
  CHECK(uncorrelated_coupling_disorder(m, 0.0, 1).couplings == m.couplings);
  const IsingModel p = uncorrelated_coupling_disorder(m, 0.3, 1);
  for (Eigen::Index i = 0; i < m.n_spins(); ++i)
    for (Eigen::Index j = i + 1; j < m.n_spins(); ++j) {
      if (m.couplings(i, j) == 0.0)
        CHECK(p.couplings(i, j) == 0.0);
      else
        CHECK(p.couplings(i, j) != m.couplings(i, j));
    }
}

TEST_CASE("spectrum config block round trips") {
  const NoiseSpectrum s = lorentzian_spectrum(true, 3.0, 750.0);
  const NoiseSpectrum back = spectrum_from_json(spectrum_to_json(s));
  REQUIRE(back.peaks.size() == 2);
  CHECK(back.amplitude_hz == 750.0);
  CHECK(back.peaks[1].center_hz == 150.0);
  CHECK(back.peaks[1].half_width_hz == 9.0);
  CHECK(back.density(77.0) == s.density(77.0));

  const NoiseSpectrum custom = spectrum_from_json(
      R"({"peaks": [{"f": 10, "gamma": 2}], "amplitude": 100})");
  REQUIRE(custom.peaks.size() == 1);
  CHECK(custom.peaks[0].weight == 1.0);
  CHECK_THROWS_AS(
      spectrum_from_json(R"({"peaks": [{"f": 10, "gamma": -1}]})"),
      std::invalid_argument);
}

TEST_CASE("trace csv export") {
  const NoiseTrace t = static_disorder(1.0, 2, true, 9, 3, 0.003);
  std::ostringstream os;
  write_trace_csv(t, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "step,t,qubit,value");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 6);
}
