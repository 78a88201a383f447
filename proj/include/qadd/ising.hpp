#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace qadd {

// Pairwise penalty term  weight * x_i * x_j  added directly to the folded
// QUBO matrix (Glover's Transformation #2 for sum(x) <= 1 constraints).
struct ProductPenalty {
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  double weight = 0.0;
};

/// Quadratic unconstrained binary optimization instance. The objective is a
/// square matrix over binary variables (symmetric or upper triangular, both
/// read as x^T W x); optional linear constraints A x = b enter through the
/// penalty weight lambda.
struct QuboProblem {
  Eigen::MatrixXd objective;          // n x n
  Eigen::MatrixXd constraint_matrix;  // m x n, 0x0 when unconstrained
  Eigen::VectorXd constraint_rhs;     // m
  double penalty = 0.0;               // lambda >= 0
  std::vector<ProductPenalty> product_penalties;

  Eigen::Index n_vars() const { return objective.rows(); }
  bool has_constraints() const { return constraint_matrix.size() > 0; }
  void validate() const;  // throws std::invalid_argument on shape errors

  // x^T W x + lambda ||A x - b||^2 + sum of product penalties, x binary
  double energy(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

/// Computational-basis spin assignment, one of {-1, +1} per qubit.
/// Basis index convention: bit i set <=> spin i = -1.
struct SpinConfiguration {
  std::vector<std::int8_t> spins;

  static SpinConfiguration from_index(std::uint64_t basis, int n_spins);
  std::uint64_t basis_index() const;
  SpinConfiguration flipped() const;
  bool operator==(const SpinConfiguration&) const = default;
};

/// Ising cost model  H = sum_{i<j} J_ij s_i s_j + sum_i h_i s_i + offset.
/// J is stored strictly upper triangular, one entry per unordered pair.
/// `scale` records the energy unit the entries are expressed in (the
/// pre-normalization max |J_ij| after normalized() has been applied).
struct IsingModel {
  Eigen::MatrixXd couplings;
  Eigen::VectorXd fields;
  double offset = 0.0;
  double scale = 1.0;
  std::vector<std::string> labels;  // optional qubit names, size 0 or n

  Eigen::Index n_spins() const { return couplings.rows(); }
  double max_abs_coupling() const;
  void validate() const;
};

struct FoldedQubo {
  Eigen::MatrixXd q;   // symmetric folded matrix
  double offset = 0.0; // lambda * b^T b, kept out of the matrix
};

// Q = W + lambda * (A^T A - diag(A^T b + b^T A)) + product penalties.
FoldedQubo penalty_fold(const QuboProblem& qubo);

// Substitute x_i -> (1 + s_i)/2. Symmetric inputs are folded by summation
// Q_ij + Q_ji, so the pair coefficient is counted exactly once. The returned
// model satisfies, for every binary x, qubo energy == ising energy exactly.
IsingModel qubo_to_ising(const Eigen::Ref<const Eigen::MatrixXd>& q,
                         double offset = 0.0);

// Move all local fields onto couplings to a fresh ancilla qubit at index 0
// (J_{0,i+1} = h_i). Doubles the ground degeneracy; the two ground sectors
// are related by a global spin flip and decode via the ancilla's sign.
IsingModel quadratize_with_ancilla(const IsingModel& model);

// Rescale so max |J_ij| = 1 exactly; `scale` accumulates the divisor.
// The argmin configuration set is unchanged (positive scaling).
IsingModel normalized(const IsingModel& model);

// Full chain: penalty_fold -> qubo_to_ising -> [quadratize] -> normalized.
IsingModel encode_qubo(const QuboProblem& qubo, bool ancilla = true);

double energy(const IsingModel& model, const SpinConfiguration& s);

// Energies of all 2^n basis states, excluding the offset (which never enters
// dynamics). Index convention matches SpinConfiguration::from_index.
Eigen::VectorXd coupling_basis_energies(const IsingModel& model);
Eigen::VectorXd field_basis_energies(const IsingModel& model);

struct GroundStates {
  double energy = 0.0;  // includes the model offset
  std::vector<SpinConfiguration> states;  // ascending basis index
  std::vector<std::uint64_t> indices() const;
};

// Exhaustive minimum over all 2^n configurations, n <= 24. Ties are kept
// within 1e-9 relative to the enumerated energy spread.
GroundStates brute_force_ground_states(const IsingModel& model);

// Key-value (JSON) serialization; doubles round-trip bit-exactly.
std::string to_json(const IsingModel& model);
IsingModel model_from_json(const std::string& text);
void save_model(const IsingModel& model, const std::string& path);
IsingModel load_model(const std::string& path);

}  // namespace qadd
