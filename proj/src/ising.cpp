#include "qadd/ising.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qadd {

void QuboProblem::validate() const {
  if (objective.rows() != objective.cols())
    throw std::invalid_argument("qubo objective must be square");
  if (!std::isfinite(penalty) || penalty < 0.0)
    throw std::invalid_argument("qubo penalty must be finite and >= 0");
  if (has_constraints()) {
    if (constraint_matrix.cols() != n_vars())
      throw std::invalid_argument("constraint matrix must have n_vars columns");
    if (constraint_rhs.size() != constraint_matrix.rows())
      throw std::invalid_argument("constraint rhs length must match rows of A");
  } else if (constraint_rhs.size() != 0) {
    throw std::invalid_argument("constraint rhs given without constraint matrix");
  }
  for (const auto& p : product_penalties) {
    if (p.i < 0 || p.j < 0 || p.i >= n_vars() || p.j >= n_vars() || p.i == p.j)
      throw std::invalid_argument("product penalty indices out of range");
  }
}

double QuboProblem::energy(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  double e = x.dot(objective * x);
  if (has_constraints()) {
    e += penalty * (constraint_matrix * x - constraint_rhs).squaredNorm();
  }
  for (const auto& p : product_penalties) e += p.weight * x[p.i] * x[p.j];
  return e;
}

SpinConfiguration SpinConfiguration::from_index(std::uint64_t basis, int n_spins) {
  SpinConfiguration s;
  s.spins.resize(n_spins);
  for (int i = 0; i < n_spins; ++i)
    s.spins[i] = (basis >> i) & 1 ? -1 : +1;
  return s;
}

std::uint64_t SpinConfiguration::basis_index() const {
  std::uint64_t b = 0;
  for (std::size_t i = 0; i < spins.size(); ++i)
    if (spins[i] < 0) b |= std::uint64_t{1} << i;
  return b;
}

SpinConfiguration SpinConfiguration::flipped() const {
  SpinConfiguration s = *this;
  for (auto& v : s.spins) v = -v;
  return s;
}

double IsingModel::max_abs_coupling() const {
  return couplings.size() ? couplings.cwiseAbs().maxCoeff() : 0.0;
}

void IsingModel::validate() const {
  if (couplings.rows() != couplings.cols())
    throw std::invalid_argument("coupling matrix must be square");
  if (fields.size() != couplings.rows())
    throw std::invalid_argument("field vector length must equal n_spins");
  for (Eigen::Index i = 0; i < couplings.rows(); ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      if (couplings(i, j) != 0.0)
        throw std::invalid_argument("couplings must be strictly upper triangular");
  if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != n_spins())
    throw std::invalid_argument("label count must equal n_spins");
}

FoldedQubo penalty_fold(const QuboProblem& qubo) {
  qubo.validate();
  FoldedQubo out;
  out.q = qubo.objective;
  if (qubo.has_constraints() && qubo.penalty != 0.0) {
    const Eigen::MatrixXd& a = qubo.constraint_matrix;
    const Eigen::VectorXd atb = a.transpose() * qubo.constraint_rhs;
    out.q += qubo.penalty *
             (a.transpose() * a - Eigen::MatrixXd((2.0 * atb).asDiagonal()));
    out.offset = qubo.penalty * qubo.constraint_rhs.squaredNorm();
  }
  for (const auto& p : qubo.product_penalties) {
    out.q(p.i, p.j) += 0.5 * p.weight;
    out.q(p.j, p.i) += 0.5 * p.weight;
  }
  return out;
}

IsingModel qubo_to_ising(const Eigen::Ref<const Eigen::MatrixXd>& q, double offset) {
  if (q.rows() != q.cols())
    throw std::invalid_argument("qubo matrix must be square");
  const Eigen::Index n = q.rows();
  IsingModel m;
  m.couplings = Eigen::MatrixXd::Zero(n, n);
  m.fields = Eigen::VectorXd::Zero(n);
  m.offset = offset;
  for (Eigen::Index i = 0; i < n; ++i) {
    // binary diagonal: q_ii x_i^2 = q_ii x_i = q_ii (1 + s_i)/2
    m.fields[i] += 0.5 * q(i, i);
    m.offset += 0.5 * q(i, i);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double c = q(i, j) + q(j, i);  // pair coefficient, counted once
      if (c == 0.0) continue;
      m.couplings(i, j) += 0.25 * c;
      m.fields[i] += 0.25 * c;
      m.fields[j] += 0.25 * c;
      m.offset += 0.25 * c;
    }
  }
  return m;
}

IsingModel quadratize_with_ancilla(const IsingModel& model) {
  model.validate();
  const Eigen::Index n = model.n_spins();
  IsingModel out;
  out.couplings = Eigen::MatrixXd::Zero(n + 1, n + 1);
  out.couplings.block(1, 1, n, n) = model.couplings;
  out.couplings.row(0).tail(n) = model.fields.transpose();
  out.fields = Eigen::VectorXd::Zero(n + 1);
  out.offset = model.offset;
  out.scale = model.scale;
  if (!model.labels.empty()) {
    out.labels.reserve(n + 1);
    out.labels.push_back("ancilla");
    out.labels.insert(out.labels.end(), model.labels.begin(), model.labels.end());
  }
  return out;
}

IsingModel normalized(const IsingModel& model) {
  const double j = model.max_abs_coupling();
  if (j == 0.0) return model;
  IsingModel out = model;
  out.couplings /= j;
  out.fields /= j;
  out.offset /= j;
  out.scale = model.scale * j;
  return out;
}

IsingModel encode_qubo(const QuboProblem& qubo, bool ancilla) {
  FoldedQubo folded = penalty_fold(qubo);
  IsingModel m = qubo_to_ising(folded.q, folded.offset);
  if (ancilla) m = quadratize_with_ancilla(m);
  return normalized(m);
}

double energy(const IsingModel& model, const SpinConfiguration& s) {
  if (static_cast<Eigen::Index>(s.spins.size()) != model.n_spins())
    throw std::invalid_argument("spin configuration length mismatch");
  double e = model.offset;
  const Eigen::Index n = model.n_spins();
  for (Eigen::Index i = 0; i < n; ++i) {
    e += model.fields[i] * s.spins[i];
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (model.couplings(i, j) != 0.0)
        e += model.couplings(i, j) * s.spins[i] * s.spins[j];
  }
  return e;
}

Eigen::VectorXd coupling_basis_energies(const IsingModel& model) {
  const int n = static_cast<int>(model.n_spins());
  if (n > 24) throw std::invalid_argument("basis enumeration limited to 24 spins");
  const std::size_t dim = std::size_t{1} << n;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double jij = model.couplings(i, j);
      if (jij == 0.0) continue;
      for (std::size_t b = 0; b < dim; ++b) {
        const int si = (b >> i) & 1 ? -1 : 1;
        const int sj = (b >> j) & 1 ? -1 : 1;
        e[b] += jij * si * sj;
      }
    }
  return e;
}

Eigen::VectorXd field_basis_energies(const IsingModel& model) {
  const int n = static_cast<int>(model.n_spins());
  if (n > 24) throw std::invalid_argument("basis enumeration limited to 24 spins");
  const std::size_t dim = std::size_t{1} << n;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i < n; ++i) {
    const double hi = model.fields[i];
    if (hi == 0.0) continue;
    for (std::size_t b = 0; b < dim; ++b)
      e[b] += (b >> i) & 1 ? -hi : hi;
  }
  return e;
}

namespace {

// Gray-code walk over all configurations: one spin flip per visited state,
// O(n) energy update via cached local fields.
template <typename Visit>
void enumerate_energies(const IsingModel& model, Visit&& visit) {
  const int n = static_cast<int>(model.n_spins());
  const std::uint64_t count = std::uint64_t{1} << n;
  Eigen::MatrixXd jsym = model.couplings + model.couplings.transpose();
  Eigen::VectorXd s = Eigen::VectorXd::Ones(n);  // all bits clear -> +1
  Eigen::VectorXd local = jsym * s + model.fields;  // local[i] = sum_j Jsym_ij s_j + h_i
  double e = 0.5 * s.dot(jsym * s) + model.fields.dot(s);
  std::uint64_t gray = 0;
  visit(std::uint64_t{0}, e);
  for (std::uint64_t k = 1; k < count; ++k) {
    const int bit = std::countr_zero(k);
    gray ^= std::uint64_t{1} << bit;
    // flipping spin `bit`: dE = -2 s_bit * local_bit
    e -= 2.0 * s[bit] * local[bit];
    s[bit] = -s[bit];
    local += 2.0 * s[bit] * jsym.col(bit);
    visit(gray, e);
  }
}

}  // namespace

GroundStates brute_force_ground_states(const IsingModel& model) {
  model.validate();
  const int n = static_cast<int>(model.n_spins());
  if (n > 24) throw std::invalid_argument("brute force limited to 24 spins");
  double emin = std::numeric_limits<double>::infinity();
  double emax = -emin;
  enumerate_energies(model, [&](std::uint64_t, double e) {
    emin = std::min(emin, e);
    emax = std::max(emax, e);
  });
  const double tol = 1e-9 * (emax - emin);
  std::vector<std::uint64_t> hits;
  enumerate_energies(model, [&](std::uint64_t b, double e) {
    if (e <= emin + tol) hits.push_back(b);
  });
  std::sort(hits.begin(), hits.end());
  GroundStates gs;
  gs.energy = emin + model.offset;
  gs.states.reserve(hits.size());
  for (std::uint64_t b : hits)
    gs.states.push_back(SpinConfiguration::from_index(b, n));
  return gs;
}

std::vector<std::uint64_t> GroundStates::indices() const {
  std::vector<std::uint64_t> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s.basis_index());
  return out;
}

std::string to_json(const IsingModel& model) {
  nlohmann::json j;
  j["n_spins"] = model.n_spins();
  auto couplings = nlohmann::json::array();
  for (Eigen::Index a = 0; a < model.n_spins(); ++a)
    for (Eigen::Index b = a + 1; b < model.n_spins(); ++b)
      if (model.couplings(a, b) != 0.0)
        couplings.push_back({a, b, model.couplings(a, b)});
  j["couplings"] = couplings;
  j["fields"] = std::vector<double>(model.fields.begin(), model.fields.end());
  j["offset"] = model.offset;
  j["scale"] = model.scale;
  if (!model.labels.empty()) j["labels"] = model.labels;
  return j.dump(2);
}

IsingModel model_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  const Eigen::Index n = j.at("n_spins").get<Eigen::Index>();
  IsingModel m;
  m.couplings = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : j.at("couplings")) {
    const Eigen::Index a = e.at(0).get<Eigen::Index>();
    const Eigen::Index b = e.at(1).get<Eigen::Index>();
    if (a < 0 || b < 0 || a >= n || b >= n || a >= b)
      throw std::invalid_argument("coupling entry must have i < j < n_spins");
    m.couplings(a, b) = e.at(2).get<double>();
  }
  m.fields = Eigen::VectorXd::Zero(n);
  const auto& fields = j.at("fields");
  if (static_cast<Eigen::Index>(fields.size()) != n)
    throw std::invalid_argument("field count mismatch in model document");
  for (Eigen::Index i = 0; i < n; ++i) m.fields[i] = fields[i].get<double>();
  m.offset = j.value("offset", 0.0);
  m.scale = j.value("scale", 1.0);
  if (j.contains("labels")) m.labels = j["labels"].get<std::vector<std::string>>();
  m.validate();
  return m;
}

void save_model(const IsingModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << to_json(model) << "\n";
}

IsingModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace qadd
