#include "qadd/magic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qadd {

void IonChainSpec::validate() const {
  if (n_ions < 2) throw std::invalid_argument("ion chain needs at least 2 ions");
  if (ion_mass <= 0 || axial_frequency <= 0)
    throw std::invalid_argument("ion mass and trap frequency must be positive");
  if (magnetic_sensitivity <= 0)
    throw std::invalid_argument("magnetic sensitivity must be positive");
  if (gradient < 0) throw std::invalid_argument("gradient must be non-negative");
}

double IonChainSpec::length_scale() const {
  const double e2 = constants::elementary_charge * constants::elementary_charge;
  return std::cbrt(e2 / (4.0 * std::numbers::pi * constants::vacuum_permittivity *
                         ion_mass * axial_frequency * axial_frequency));
}

namespace {

// dimensionless potential: V = sum u_i^2 / 2 + sum_{i<j} 1/|u_i - u_j|
Eigen::VectorXd force_residual(const Eigen::VectorXd& u) {
  const Eigen::Index n = u.size();
  Eigen::VectorXd g = u;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = u[i] - u[j];
      g[i] -= (d > 0 ? 1.0 : -1.0) / (d * d);
    }
  return g;
}

Eigen::MatrixXd hessian(const Eigen::VectorXd& u) {
  const Eigen::Index n = u.size();
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d3 = std::pow(std::abs(u[i] - u[j]), 3);
      h(i, i) += 2.0 / d3;
      h(i, j) = -2.0 / d3;
    }
  return h;
}

Eigen::VectorXd solve_equilibrium(int n) {
  // uniform spacing over the approximate crystal extent ~ n^0.56
  const double half = 0.96 * std::pow(static_cast<double>(n), 0.56);
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i)
    u[i] = n == 1 ? 0.0 : -half + 2.0 * half * i / (n - 1);

  for (int iter = 0; iter < 200; ++iter) {
    const Eigen::VectorXd g = force_residual(u);
    if (g.cwiseAbs().maxCoeff() < 1e-12) return u;
    Eigen::VectorXd step = hessian(u).ldlt().solve(g);
    // damp steps that would reorder ions
    double alpha = 1.0;
    for (int back = 0; back < 40; ++back) {
      Eigen::VectorXd trial = u - alpha * step;
      std::sort(trial.begin(), trial.end());
      bool ordered = true;
      for (int i = 0; i + 1 < n; ++i)
        if (trial[i + 1] - trial[i] < 1e-8) ordered = false;
      if (ordered && force_residual(trial).norm() <= g.norm()) {
        u = trial;
        break;
      }
      alpha *= 0.5;
      if (back == 39) u -= alpha * step;
    }
  }
  if (force_residual(u).cwiseAbs().maxCoeff() >= 1e-12)
    throw std::runtime_error("ion equilibrium solver did not converge");
  return u;
}

}  // namespace

Eigen::VectorXd equilibrium_positions(const IonChainSpec& spec) {
  spec.validate();
  if (spec.n_ions > 50)
    throw std::invalid_argument("equilibrium solver limited to 50 ions");
  return solve_equilibrium(spec.n_ions) * spec.length_scale();
}

NormalModes normal_modes(const IonChainSpec& spec) {
  spec.validate();
  const Eigen::VectorXd u = equilibrium_positions(spec) / spec.length_scale();
  const Eigen::MatrixXd h = hessian(u);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("mode diagonalization failed");
  if (eig.eigenvalues().minCoeff() <= 0.0)
    throw std::runtime_error("axial potential is not positive definite");
  NormalModes modes;
  modes.frequencies = eig.eigenvalues().cwiseSqrt() * spec.axial_frequency;
  modes.mode_matrix = eig.eigenvectors();
  modes.equilibrium_positions = u * spec.length_scale();
  return modes;
}

IsingModel coupling_matrix(const IonChainSpec& spec) {
  const NormalModes modes = normal_modes(spec);
  const int n = spec.n_ions;
  const double dw_dz = spec.magnetic_sensitivity * spec.gradient;  // rad/(s m)

  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int l = 0; l < n; ++l) {
    const double nu = modes.frequencies[l];
    const double dz = std::sqrt(constants::hbar / (2.0 * spec.ion_mass * nu));
    const Eigen::VectorXd eps = (dz * dw_dz / nu) * modes.mode_matrix.col(l);
    j.noalias() += nu * eps * eps.transpose();
  }

  IsingModel m;
  m.couplings = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      m.couplings(a, b) = j(a, b) / (2.0 * std::numbers::pi);  // report in Hz
  m.fields = Eigen::VectorXd::Zero(n);
  m.labels.reserve(n);
  for (int a = 0; a < n; ++a) m.labels.push_back("ion_" + std::to_string(a));
  return m;
}

IsingModel trap_fluctuation_couplings(const IsingModel& couplings,
                                      double axial_frequency,
                                      double frequency_offset) {
  if (axial_frequency <= 0)
    throw std::invalid_argument("axial frequency must be positive");
  IsingModel out = couplings;
  out.couplings *= 1.0 - 2.0 * frequency_offset / axial_frequency;
  return out;
}

}  // namespace qadd
