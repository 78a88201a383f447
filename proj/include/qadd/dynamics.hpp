#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

#include "qadd/ising.hpp"
#include "qadd/noise.hpp"

namespace qadd {

using StateVector = Eigen::VectorXcd;

enum class Protocol {
  couplings_only,               // field-free cost, ancilla encoding
  local_fields_with_sign_flips, // problem fields, sign-flipped at each pulse
  coupling_modulation,          // field-free cost, qubit-targeted flips allowed
};

std::string to_string(Protocol p);
Protocol protocol_from_string(const std::string& s);

enum class Ramp { linear };  // C(t) = 1 - t/T

struct AnnealConfig {
  double duration = 2.6;         // in units 1/J
  int n_steps = 50000;
  double driver_strength = 3.0;  // h_x in units of J
  Ramp ramp = Ramp::linear;
  Protocol protocol = Protocol::couplings_only;

  void validate() const;
  double dt() const { return duration / n_steps; }
  double ramp_value(double t) const { return 1.0 - t / duration; }
  double ramp_slope() const { return 1.0 / duration; }
};

/// One instantaneous pi-pulse around x: a global spin flip (qubit < 0) or a
/// flip of a single qubit. Pulses act between steps, after the step whose
/// index they carry (step in [1, n_steps]).
struct PulseEvent {
  int step = 0;
  int qubit = -1;
  bool global() const { return qubit < 0; }
};

struct PulseSchedule {
  std::vector<PulseEvent> events;
  int pulse_count() const { return static_cast<int>(events.size()); }
};

// `pulse_count` global flips over `n_steps` steps: a leading block of
// floor(n_steps/pulse_count) spacings followed by ceil spacings, summing to
// exactly n_steps (e.g. 300 pulses over 50000 steps: 166-step gaps, then 167).
PulseSchedule pulse_positions(int pulse_count, int n_steps);

// Asymmetric pulse pair on one qubit over `interval_steps` steps: a flip at
// step round((1+scale)/2 * interval) and a second at the interval end. To
// first order in the interval length the couplings J_ik are scaled by
// `scale` while all other pairs are untouched.
PulseSchedule coupling_modulation_schedule(int target_qubit, double scale,
                                           int interval_steps);

StateVector uniform_superposition(int n_qubits);
void apply_global_flip(StateVector& state);
void apply_qubit_flip(StateVector& state, int qubit);

// Total squared overlap with the listed basis configurations.
double fidelity(const StateVector& state, const std::vector<SpinConfiguration>& targets);
double fidelity(const StateVector& state, const GroundStates& targets);

struct PropagateOptions {
  // record fidelity against `targets` every `record_every` steps (0 = off)
  int record_every = 0;
  const GroundStates* targets = nullptr;
};

struct PropagationResult {
  StateVector state;
  std::vector<double> fidelity_trace;
};

// Discretized Schroedinger evolution of
//   H(t) = -C(t) h_x sum_i sigma_i^x + sum_{i<j} J_ij sigma_i^z sigma_j^z
//          + sum_i (s h_i + delta h_i(t)) sigma_i^z
// from the uniform superposition. Per step a symmetric split is applied:
// half a diagonal phase, the driver rotation at the mid-step ramp value,
// half a diagonal phase. Noise is piecewise constant per step (trace row k-1
// for step k, same units as the couplings; empty trace = noiseless). Global
// pulses flip all qubits; under local_fields_with_sign_flips they also negate
// the problem fields (s above). If the run ends with odd flip parity the
// frame is restored with one final flip.
PropagationResult propagate(const IsingModel& model, const AnnealConfig& config,
                            const NoiseTrace& trace, const PulseSchedule& schedule,
                            const PropagateOptions& options = {});

// Dense 2^n x 2^n operators (small systems; used by the Magnus machinery).
Eigen::MatrixXcd pauli_term(int n_qubits, int qubit, char axis);
Eigen::MatrixXcd dense_cost_hamiltonian(const IsingModel& model);
Eigen::MatrixXcd dense_driver_hamiltonian(int n_qubits, double driver_strength);
Eigen::MatrixXcd dense_noise_hamiltonian(const Eigen::VectorXd& delta_h);

// Effective generator A1 + A2 + A3 of one pulse-sandwiched DD cycle
// X U(t0 -> t0+dt) X U(t0-dt -> t0) of half-interval `delta_t` centered at
// pulse time t0 = t_start + delta_t, for constant per-qubit fields delta_h:
//   A1 = H_cost + C(t0) H_driving
//   A2 = h_x C(t0) sum_i delta_h_i sigma_i^y * dt
//   A3 = (-2/3 h_x v sum_{i<j} J_ij (sigma_i^z sigma_j^y + sigma_i^y sigma_j^z)
//         + 2/3 h_x C(t0) sum_i delta_h_i^2 sigma_i^x) * dt^2
// with v the linear ramp slope. exp(-i (A1+A2+A3) 2 dt) matches the exact
// cycle propagator to O(dt^4).
Eigen::MatrixXcd magnus_effective_generator(const IsingModel& model,
                                            const AnnealConfig& config,
                                            const Eigen::VectorXd& delta_h,
                                            double t_start, double delta_t);

}  // namespace qadd
