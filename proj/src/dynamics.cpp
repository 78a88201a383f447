#include "qadd/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qadd {

std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::couplings_only: return "couplings_only";
    case Protocol::local_fields_with_sign_flips: return "local_fields_with_sign_flips";
    case Protocol::coupling_modulation: return "coupling_modulation";
  }
  return "?";
}

Protocol protocol_from_string(const std::string& s) {
  if (s == "couplings_only") return Protocol::couplings_only;
  if (s == "local_fields_with_sign_flips") return Protocol::local_fields_with_sign_flips;
  if (s == "coupling_modulation") return Protocol::coupling_modulation;
  throw std::invalid_argument("unknown protocol: " + s);
}

void AnnealConfig::validate() const {
  if (duration <= 0.0) throw std::invalid_argument("duration must be positive");
  if (n_steps < 1) throw std::invalid_argument("need at least one step");
  if (driver_strength < 0.0)
    throw std::invalid_argument("driver strength must be >= 0");
}

PulseSchedule pulse_positions(int pulse_count, int n_steps) {
  if (pulse_count < 0) throw std::invalid_argument("pulse count must be >= 0");
  if (pulse_count > n_steps)
    throw std::invalid_argument("more pulses than steps");
  PulseSchedule schedule;
  if (pulse_count == 0) return schedule;
  const int q = n_steps / pulse_count;
  const int r = n_steps % pulse_count;
  // (pulse_count - r) gaps of q steps, then r gaps of q+1: total n_steps
  int acc = 0;
  for (int i = 0; i < pulse_count; ++i) {
    acc += i < pulse_count - r ? q : q + 1;
    schedule.events.push_back({acc, -1});
  }
  return schedule;
}

PulseSchedule coupling_modulation_schedule(int target_qubit, double scale,
                                           int interval_steps) {
  if (std::abs(scale) > 1.0) throw std::invalid_argument("|scale| must be <= 1");
  if (interval_steps < 1) throw std::invalid_argument("interval must be >= 1 step");
  const int first = static_cast<int>(
      std::llround(0.5 * (1.0 + scale) * interval_steps));
  PulseSchedule schedule;
  schedule.events.push_back({std::clamp(first, 0, interval_steps), target_qubit});
  schedule.events.push_back({interval_steps, target_qubit});
  return schedule;
}

StateVector uniform_superposition(int n_qubits) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  return StateVector::Constant(dim, std::complex<double>(
                                        1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
}

void apply_global_flip(StateVector& state) {
  const Eigen::Index dim = state.size();
  const Eigen::Index mask = dim - 1;
  for (Eigen::Index b = 0; b < dim / 2; ++b) std::swap(state[b], state[b ^ mask]);
}

void apply_qubit_flip(StateVector& state, int qubit) {
  const Eigen::Index dim = state.size();
  const Eigen::Index bit = Eigen::Index{1} << qubit;
  if (bit >= dim) throw std::invalid_argument("qubit index out of range");
  for (Eigen::Index b = 0; b < dim; ++b)
    if (!(b & bit)) std::swap(state[b], state[b | bit]);
}

double fidelity(const StateVector& state, const std::vector<SpinConfiguration>& targets) {
  if (targets.empty()) throw std::invalid_argument("fidelity needs a nonempty target set");
  double f = 0.0;
  for (const auto& t : targets) {
    const std::uint64_t b = t.basis_index();
    if (b >= static_cast<std::uint64_t>(state.size()))
      throw std::invalid_argument("target configuration does not fit the state");
    f += std::norm(state[b]);
  }
  return f;
}

double fidelity(const StateVector& state, const GroundStates& targets) {
  return fidelity(state, targets.states);
}

namespace {

// single-qubit x rotation exp(i theta sigma_x) applied to every qubit
void apply_driver(StateVector& psi, int n, double theta) {
  const double c = std::cos(theta);
  const std::complex<double> is(0.0, std::sin(theta));
  const Eigen::Index dim = psi.size();
  for (int q = 0; q < n; ++q) {
    const Eigen::Index bit = Eigen::Index{1} << q;
    for (Eigen::Index base = 0; base < dim; base += 2 * bit)
      for (Eigen::Index lo = base; lo < base + bit; ++lo) {
        const std::complex<double> a0 = psi[lo];
        const std::complex<double> a1 = psi[lo | bit];
        psi[lo] = c * a0 + is * a1;
        psi[lo | bit] = is * a0 + c * a1;
      }
  }
}

}  // namespace

PropagationResult propagate(const IsingModel& model, const AnnealConfig& config,
                            const NoiseTrace& trace, const PulseSchedule& schedule,
                            const PropagateOptions& options) {
  model.validate();
  config.validate();
  const int n = static_cast<int>(model.n_spins());
  if (n < 1 || n > 24) throw std::invalid_argument("state vector limited to 24 qubits");
  const Eigen::Index dim = Eigen::Index{1} << n;

  const bool has_noise = trace.values.size() > 0;
  if (has_noise && (trace.n_steps() != config.n_steps || trace.n_qubits() != n))
    throw std::invalid_argument("noise trace shape does not match run");
  if (config.protocol != Protocol::local_fields_with_sign_flips &&
      model.fields.cwiseAbs().maxCoeff() != 0.0)
    throw std::invalid_argument(
        "model fields must be zero unless the sign-flip protocol is used");

  for (const auto& ev : schedule.events) {
    if (ev.step < 1 || ev.step > config.n_steps)
      throw std::invalid_argument("pulse step outside [1, n_steps]");
    if (ev.qubit >= n) throw std::invalid_argument("pulse qubit out of range");
  }
  std::vector<PulseEvent> events = schedule.events;
  std::stable_sort(events.begin(), events.end(),
                   [](const PulseEvent& a, const PulseEvent& b) { return a.step < b.step; });

  const double dt = config.dt();
  const Eigen::VectorXd e_j = coupling_basis_energies(model);
  const Eigen::VectorXd e_h = field_basis_energies(model);
  const bool has_fields = e_h.cwiseAbs().maxCoeff() != 0.0;

  // precomputed half-step phases of the time-independent diagonal part
  const auto half_phases = [&](double sign) {
    Eigen::VectorXcd ph(dim);
    for (Eigen::Index b = 0; b < dim; ++b)
      ph[b] = std::polar(1.0, -0.5 * dt * (e_j[b] + sign * e_h[b]));
    return ph;
  };
  const Eigen::VectorXcd phase_pos = half_phases(1.0);
  const Eigen::VectorXcd phase_neg = has_fields ? half_phases(-1.0) : phase_pos;

  // correlated noise acts through the magnetization only
  Eigen::VectorXi magnetization(dim);
  Eigen::MatrixXd signs;  // dim x n, general path
  const bool correlated_noise = has_noise && trace.correlated;
  if (correlated_noise) {
    for (Eigen::Index b = 0; b < dim; ++b)
      magnetization[b] = n - 2 * std::popcount(static_cast<std::uint64_t>(b));
  } else if (has_noise) {
    signs.resize(dim, n);
    for (Eigen::Index b = 0; b < dim; ++b)
      for (int i = 0; i < n; ++i) signs(b, i) = (b >> i) & 1 ? -1.0 : 1.0;
  }

  StateVector psi = uniform_superposition(n);
  PropagationResult result;
  if (options.record_every > 0 && options.targets)
    result.fidelity_trace.reserve(config.n_steps / options.record_every + 1);

  Eigen::VectorXcd diag_half(dim);
  Eigen::VectorXcd noise_half(2 * n + 1);
  Eigen::VectorXd noise_diag(dim);

  std::size_t next_event = 0;
  double field_sign = 1.0;
  long global_flips = 0;

  for (int step = 1; step <= config.n_steps; ++step) {
    const double t_mid = (step - 0.5) * dt;
    const double c_mid = config.ramp_value(t_mid);

    const Eigen::VectorXcd& base = field_sign >= 0.0 ? phase_pos : phase_neg;
    const Eigen::VectorXcd* active = &base;
    if (correlated_noise) {
      const double dh = trace.values(step - 1, 0);
      for (int m = -n; m <= n; m += 2)
        noise_half[m + n] = std::polar(1.0, -0.5 * dt * dh * m);
      for (Eigen::Index b = 0; b < dim; ++b)
        diag_half[b] = base[b] * noise_half[magnetization[b] + n];
      active = &diag_half;
    } else if (has_noise) {
      noise_diag.noalias() = signs * trace.values.row(step - 1).transpose();
      for (Eigen::Index b = 0; b < dim; ++b)
        diag_half[b] = base[b] * std::polar(1.0, -0.5 * dt * noise_diag[b]);
      active = &diag_half;
    }

    psi.array() *= active->array();
    apply_driver(psi, n, c_mid * config.driver_strength * dt);
    psi.array() *= active->array();

    while (next_event < events.size() && events[next_event].step == step) {
      const PulseEvent& ev = events[next_event++];
      if (ev.global()) {
        apply_global_flip(psi);
        ++global_flips;
        if (config.protocol == Protocol::local_fields_with_sign_flips)
          field_sign = -field_sign;
      } else {
        apply_qubit_flip(psi, ev.qubit);
      }
    }

    if (options.record_every > 0 && options.targets &&
        step % options.record_every == 0)
      result.fidelity_trace.push_back(fidelity(psi, *options.targets));
  }

  // restore the measurement frame after an odd number of global flips
  if (global_flips % 2 != 0) apply_global_flip(psi);

  result.state = std::move(psi);
  return result;
}

Eigen::MatrixXcd pauli_term(int n_qubits, int qubit, char axis) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(dim, dim);
  const Eigen::Index bit = Eigen::Index{1} << qubit;
  const std::complex<double> im(0.0, 1.0);
  for (Eigen::Index b = 0; b < dim; ++b) {
    const bool set = b & bit;
    switch (axis) {
      case 'z': op(b, b) = set ? -1.0 : 1.0; break;
      case 'x': op(b ^ bit, b) = 1.0; break;
      case 'y': op(b ^ bit, b) = set ? -im : im; break;  // |0> -> i|1>
      default: throw std::invalid_argument("axis must be x, y or z");
    }
  }
  return op;
}

Eigen::MatrixXcd dense_cost_hamiltonian(const IsingModel& model) {
  const int n = static_cast<int>(model.n_spins());
  const Eigen::Index dim = Eigen::Index{1} << n;
  const Eigen::VectorXd diag = coupling_basis_energies(model) + field_basis_energies(model);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  h.diagonal() = diag.cast<std::complex<double>>();
  return h;
}

Eigen::MatrixXcd dense_driver_hamiltonian(int n_qubits, double driver_strength) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (int q = 0; q < n_qubits; ++q) h -= driver_strength * pauli_term(n_qubits, q, 'x');
  return h;
}

Eigen::MatrixXcd dense_noise_hamiltonian(const Eigen::VectorXd& delta_h) {
  const int n = static_cast<int>(delta_h.size());
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (int q = 0; q < n; ++q) h += delta_h[q] * pauli_term(n, q, 'z');
  return h;
}

Eigen::MatrixXcd magnus_effective_generator(const IsingModel& model,
                                            const AnnealConfig& config,
                                            const Eigen::VectorXd& delta_h,
                                            double t_start, double delta_t) {
  model.validate();
  config.validate();
  const int n = static_cast<int>(model.n_spins());
  if (delta_h.size() != n) throw std::invalid_argument("delta_h length mismatch");

  const double t0 = t_start + delta_t;
  const double c0 = config.ramp_value(t0);
  const double v = config.ramp_slope();
  const double hx = config.driver_strength;

  Eigen::MatrixXcd a1 = dense_cost_hamiltonian(model) +
                        c0 * dense_driver_hamiltonian(n, hx);

  Eigen::MatrixXcd a2 = Eigen::MatrixXcd::Zero(a1.rows(), a1.cols());
  for (int q = 0; q < n; ++q) a2 += delta_h[q] * pauli_term(n, q, 'y');
  a2 *= hx * c0 * delta_t;

  Eigen::MatrixXcd zy = Eigen::MatrixXcd::Zero(a1.rows(), a1.cols());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double jij = model.couplings(i, j);
      if (jij == 0.0) continue;
      zy += jij * (pauli_term(n, i, 'z') * pauli_term(n, j, 'y') +
                   pauli_term(n, i, 'y') * pauli_term(n, j, 'z'));
    }
  Eigen::MatrixXcd xx = Eigen::MatrixXcd::Zero(a1.rows(), a1.cols());
  for (int q = 0; q < n; ++q)
    xx += delta_h[q] * delta_h[q] * pauli_term(n, q, 'x');
  const Eigen::MatrixXcd a3 =
      (-(2.0 / 3.0) * hx * v * zy + (2.0 / 3.0) * hx * c0 * xx) *
      (delta_t * delta_t);

  return a1 + a2 + a3;
}

}  // namespace qadd
