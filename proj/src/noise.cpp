#include "qadd/noise.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "qadd/rng.hpp"

namespace qadd {

double NoiseSpectrum::density(double f_hz) const {
  double s = 0.0;
  for (const auto& p : peaks) {
    const double d = f_hz - p.center_hz;
    s += p.weight * p.half_width_hz / (d * d + p.half_width_hz * p.half_width_hz);
  }
  return s / (2.0 * std::numbers::pi);
}

std::string NoiseSpectrum::id() const {
  if (is_static()) return "static";
  std::ostringstream os;
  os << "lorentz";
  for (const auto& p : peaks) os << "_" << p.center_hz << "g" << p.half_width_hz;
  return os.str();
}

NoiseSpectrum lorentzian_spectrum(bool two_peak, double gamma_hz,
                                  double amplitude_hz, double center_hz) {
  if (gamma_hz <= 0.0) throw std::invalid_argument("half width must be positive");
  if (amplitude_hz < 0.0) throw std::invalid_argument("amplitude must be >= 0");
  NoiseSpectrum s;
  s.amplitude_hz = amplitude_hz;
  if (two_peak) {
    s.peaks = {{50.0, gamma_hz, 1.0}, {150.0, 3.0 * gamma_hz, 1.0}};
  } else {
    s.peaks = {{center_hz, gamma_hz, 1.0}};
  }
  return s;
}

NoiseSpectrum static_spectrum(double amplitude_hz) {
  NoiseSpectrum s;
  s.amplitude_hz = amplitude_hz;
  return s;
}

std::string spectrum_to_json(const NoiseSpectrum& spectrum) {
  nlohmann::json j;
  auto peaks = nlohmann::json::array();
  for (const auto& p : spectrum.peaks)
    peaks.push_back({{"f", p.center_hz}, {"gamma", p.half_width_hz},
                     {"weight", p.weight}});
  j["peaks"] = peaks;
  j["amplitude"] = spectrum.amplitude_hz;
  return j.dump(2);
}

NoiseSpectrum spectrum_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  NoiseSpectrum s;
  s.amplitude_hz = j.value("amplitude", 0.0);
  for (const auto& p : j.value("peaks", nlohmann::json::array())) {
    SpectrumPeak peak;
    peak.center_hz = p.at("f").get<double>();
    peak.half_width_hz = p.at("gamma").get<double>();
    peak.weight = p.value("weight", 1.0);
    if (peak.half_width_hz <= 0.0)
      throw std::invalid_argument("peak half width must be positive");
    s.peaks.push_back(peak);
  }
  return s;
}

namespace {

// One frequency-domain realization, rescaled to the requested std.
Eigen::VectorXd sample_column(const NoiseSpectrum& spectrum, int n_steps,
                              double dt, std::uint64_t seed) {
  const int m = 3 * n_steps;       // spectrum evaluation points over [0, Nyquist]
  const int len = 2 * m;           // transform length, Hermitian-symmetric
  const double df = 1.0 / (len * dt);

  rng::GaussianStream g(seed);
  std::vector<std::complex<double>> freq(len);
  freq[0] = g.gaussian() * std::sqrt(spectrum.density(0.0));
  for (int k = 1; k < m; ++k) {
    const double s = std::sqrt(0.5 * spectrum.density(k * df));
    const std::complex<double> z(g.gaussian() * s, g.gaussian() * s);
    freq[k] = z;
    freq[len - k] = std::conj(z);
  }
  freq[m] = g.gaussian() * std::sqrt(spectrum.density(m * df));

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> time(len);
  fft.inv(time, freq);

  Eigen::VectorXd x(n_steps);
  for (int i = 0; i < n_steps; ++i) x[i] = time[i].real();

  const double mean = x.mean();
  const double sd = std::sqrt((x.array() - mean).square().mean());
  if (sd > 0.0 && spectrum.amplitude_hz >= 0.0)
    x *= spectrum.amplitude_hz / sd;
  return x;
}

}  // namespace

NoiseTrace sample_trace(const NoiseSpectrum& spectrum, int n_steps,
                        double duration_s, int n_qubits, bool correlated,
                        std::uint64_t seed) {
  if (n_steps < 1 || n_qubits < 1)
    throw std::invalid_argument("trace needs at least one step and qubit");
  if (duration_s <= 0.0) throw std::invalid_argument("duration must be positive");
  if (spectrum.is_static())
    return static_disorder(spectrum.amplitude_hz, n_qubits, correlated, seed,
                           n_steps, duration_s);

  NoiseTrace trace;
  trace.dt = duration_s / n_steps;
  trace.correlated = correlated;
  trace.seed = seed;
  trace.values.resize(n_steps, n_qubits);
  if (spectrum.amplitude_hz == 0.0) {
    trace.values.setZero();
    return trace;
  }
  if (correlated) {
    const Eigen::VectorXd col = sample_column(spectrum, n_steps, trace.dt, seed);
    trace.values.colwise() = col;
  } else {
    for (int q = 0; q < n_qubits; ++q)
      trace.values.col(q) = sample_column(
          spectrum, n_steps, trace.dt,
          rng::derive(seed, {static_cast<std::uint64_t>(q)}));
  }
  return trace;
}

NoiseTrace static_disorder(double sigma, int n_qubits, bool correlated,
                           std::uint64_t seed, int n_steps, double duration_s) {
  if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
  if (n_steps < 1 || n_qubits < 1)
    throw std::invalid_argument("trace needs at least one step and qubit");
  NoiseTrace trace;
  trace.dt = n_steps > 0 && duration_s > 0 ? duration_s / n_steps : 0.0;
  trace.correlated = correlated;
  trace.seed = seed;
  rng::GaussianStream g(seed);
  Eigen::RowVectorXd row(n_qubits);
  if (correlated) {
    row.setConstant(sigma * g.gaussian());
  } else {
    for (int q = 0; q < n_qubits; ++q) row[q] = sigma * g.gaussian();
  }
  trace.values = row.replicate(n_steps, 1);
  return trace;
}

IsingModel uncorrelated_coupling_disorder(const IsingModel& model, double sigma,
                                          std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
  IsingModel out = model;
  if (sigma == 0.0) return out;
  rng::GaussianStream g(seed);
  for (Eigen::Index i = 0; i < model.n_spins(); ++i)
    for (Eigen::Index j = i + 1; j < model.n_spins(); ++j)
      if (out.couplings(i, j) != 0.0) out.couplings(i, j) += sigma * g.gaussian();
  return out;
}

NoiseTrace scaled_trace(const NoiseTrace& trace, double factor) {
  NoiseTrace out = trace;
  out.values *= factor;
  return out;
}

void write_trace_csv(const NoiseTrace& trace, std::ostream& out) {
  out << "step,t,qubit,value\n";
  for (Eigen::Index s = 0; s < trace.n_steps(); ++s)
    for (Eigen::Index q = 0; q < trace.n_qubits(); ++q)
      out << s << "," << s * trace.dt << "," << q << "," << trace.values(s, q)
          << "\n";
}

}  // namespace qadd
