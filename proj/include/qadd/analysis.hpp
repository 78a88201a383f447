#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qadd/dynamics.hpp"
#include "qadd/ising.hpp"
#include "qadd/noise.hpp"

namespace qadd {

struct SweepRow {
  double amplitude_hz = 0.0;
  int pulse_count = 0;
  double pulses_per_ms = 0.0;
  std::uint64_t seed = 0;
  double fidelity = 0.0;
  std::string protocol;
  std::string problem;
  double duration = 0.0;  // dimensionless sweep length
  std::string spectrum;
  double normalized_fidelity = 0.0;  // fidelity / noiseless fidelity
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double noiseless_fidelity = 0.0;
  double duration_s = 0.0;  // physical sweep time
};

/// Sweep grid: full factorial over amplitudes x pulse counts x realizations.
/// Realization seeds derive as
///   seed = derive(master_seed, {amplitude_index, pulse_index, realization}).
struct SweepSpec {
  std::vector<double> amplitudes_hz;
  std::vector<int> pulse_counts;
  int n_realizations = 25;
  std::uint64_t master_seed = 1;
  double j_hz = 26.0;      // energy scale: t_phys = t_dimensionless / j_hz
  bool correlated = true;
  int workers = 0;         // 0 = hardware concurrency
  std::string problem_name = "model";
};

SweepResult dd_sweep(const IsingModel& model, const AnnealConfig& config,
                     const NoiseSpectrum& spectrum, const SweepSpec& spec);

enum class DisorderKind {
  local_correlated,
  local_uncorrelated,
  coupling_uncorrelated,
};
std::string to_string(DisorderKind k);
DisorderKind disorder_kind_from_string(const std::string& s);

struct StabilityPoint {
  double sigma = 0.0;       // in units of the model's coupling scale
  double probability = 0.0; // changed-ground-state fraction
  int n_samples = 0;
};

// Monte Carlo probability that disorder of strength sigma moves the ground
// manifold: a draw counts as changed when the perturbed ground set is not a
// subset of the clean one (losing one of two degenerate partners still
// decodes to the same solution and does not count).
std::vector<StabilityPoint> gs_change_probability(const IsingModel& model,
                                                  DisorderKind kind,
                                                  const std::vector<double>& sigma_grid,
                                                  int n_samples,
                                                  std::uint64_t seed);

struct FitResult {
  Eigen::VectorXd params;
  double rms = 0.0;
  bool converged = false;
  bool degenerate = false;
  int iterations = 0;
};

// Least-squares fit of f(x) = a atan(b (x - c)) + d, Levenberg-Marquardt with
// analytic Jacobian. Start values: a = range/pi, b = 1, c = mid x, d = mean y.
FitResult arctan_fit(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys);

// f(u) = f_inf - a exp(-k u), params (f_inf, a, k).
FitResult exp_saturation_fit(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys);

struct CollapseFit {
  double exponent = 0.0;        // c in u = (dt * sigma^c)^-1
  double residual = 0.0;        // max vertical spread between rescaled curves
  double unrescaled_residual = 0.0;  // same metric at c = 0 (u = 1/dt)
  bool auto_fitted = false;
  FitResult exp_fit;            // optional pooled exponential fit at c
};

// Rescale per-amplitude mean-fidelity curves to u = (dt sigma^c)^-1 and
// measure the max vertical spread on a common u grid; c = nullopt searches
// c in [0.3, 1.0] for the minimum residual. Zero-pulse rows are excluded
// (dt undefined). Needs at least two distinct amplitudes.
CollapseFit collapse_fit(const SweepResult& result, std::optional<double> c);

struct GroupStats {
  std::string spectrum;
  double amplitude_hz = 0.0;
  int pulse_count = 0;
  int count = 0;
  double median = 0.0, q1 = 0.0, q3 = 0.0, mean = 0.0, stddev = 0.0;
};

// Per (spectrum, amplitude, pulse count) group statistics. Quartiles use the
// median-of-halves convention: the halves exclude the middle element when the
// group size is odd.
std::vector<GroupStats> summarize(const SweepResult& result);

double median(std::vector<double> values);

void write_sweep_csv(const SweepResult& result, std::ostream& out,
                     const std::string& config_comment = {});
SweepResult read_sweep_csv(std::istream& in);

}  // namespace qadd
