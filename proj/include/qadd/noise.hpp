#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qadd/ising.hpp"

namespace qadd {

struct SpectrumPeak {
  double center_hz = 0.0;
  double half_width_hz = 1.0;  // Lorentzian HWHM
  double weight = 1.0;         // relative integrated weight
};

/// Noise power spectrum: a sum of Lorentzian peaks,
/// S(f) = (1/2pi) sum_k w_k gamma_k / ((f - f_k)^2 + gamma_k^2).
/// `amplitude_hz` is the standard deviation the generated time traces are
/// rescaled to; "amplitude" always means trace std-dev here. An empty peak
/// list means constant-in-time Gaussian disorder of the same amplitude.
struct NoiseSpectrum {
  std::vector<SpectrumPeak> peaks;
  double amplitude_hz = 0.0;

  bool is_static() const { return peaks.empty(); }
  double density(double f_hz) const;
  std::string id() const;
};

// Two-peak form: Lorentzians at 50 and 150 Hz, the second with triple width
// (beta = 3 gamma), which puts its height at one third of the first.
// Single-peak form: one Lorentzian at `center_hz`.
NoiseSpectrum lorentzian_spectrum(bool two_peak, double gamma_hz,
                                  double amplitude_hz, double center_hz = 50.0);
NoiseSpectrum static_spectrum(double amplitude_hz);

// Config block { "peaks": [{"f": .., "gamma": .., "weight": ..}], "amplitude": .. }
std::string spectrum_to_json(const NoiseSpectrum& spectrum);
NoiseSpectrum spectrum_from_json(const std::string& text);

/// Per-step, per-qubit longitudinal field samples delta h_i^z. Values carry
/// the spectrum's unit (Hz as generated; callers rescale to coupling units).
struct NoiseTrace {
  Eigen::MatrixXd values;  // n_steps x n_qubits
  double dt = 0.0;         // seconds per step
  bool correlated = false;
  std::uint64_t seed = 0;

  Eigen::Index n_steps() const { return values.rows(); }
  Eigen::Index n_qubits() const { return values.cols(); }
};

// Frequency-domain sampling: the spectrum is evaluated at M = 3 n_steps
// equidistant frequencies spanning [0, Nyquist], complex Gaussian amplitudes
// with variance proportional to S(f_k) are drawn with negative-frequency
// symmetry enforced, inverse transformed, truncated to n_steps points, and
// rescaled so the empirical std equals spectrum.amplitude_hz. Correlated
// traces share one realization across qubits; uncorrelated traces use one
// derived stream per qubit.
NoiseTrace sample_trace(const NoiseSpectrum& spectrum, int n_steps,
                        double duration_s, int n_qubits, bool correlated,
                        std::uint64_t seed);

// Constant-in-time Gaussian disorder: one draw per qubit (or one shared draw
// when correlated), held for all steps. No post-hoc rescaling.
NoiseTrace static_disorder(double sigma, int n_qubits, bool correlated,
                           std::uint64_t seed, int n_steps = 1,
                           double duration_s = 0.0);

// Independent Gaussian perturbation of every nonzero coupling; zero entries
// stay zero.
IsingModel uncorrelated_coupling_disorder(const IsingModel& model, double sigma,
                                          std::uint64_t seed);

NoiseTrace scaled_trace(const NoiseTrace& trace, double factor);

// CSV export (step, t, qubit, value) for audit.
void write_trace_csv(const NoiseTrace& trace, std::ostream& out);

}  // namespace qadd
