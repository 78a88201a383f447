#pragma once

// Test-side oracles: dense matrix exponentials and time-ordered propagators,
// independent of the split-step implementation they are used to check.

#include <Eigen/Dense>

#include <complex>

#include "qadd/dynamics.hpp"
#include "qadd/ising.hpp"

namespace qadd::testing {

inline Eigen::MatrixXcd expm_hermitian(const Eigen::MatrixXcd& h, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
  const Eigen::VectorXd w = eig.eigenvalues();
  Eigen::VectorXcd phase(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k)
    phase[k] = std::polar(1.0, -w[k] * t);
  return eig.eigenvectors() * phase.asDiagonal() * eig.eigenvectors().adjoint();
}

// midpoint-rule time-ordered propagator for H(t) = H_cost + C(t) H_drive + H_noise
inline Eigen::MatrixXcd exact_propagator(const IsingModel& model,
                                         const AnnealConfig& config,
                                         const Eigen::VectorXd& delta_h,
                                         double t0, double t1, int substeps) {
  const Eigen::MatrixXcd cost =
      dense_cost_hamiltonian(model) + dense_noise_hamiltonian(delta_h);
  const Eigen::MatrixXcd drive = dense_driver_hamiltonian(
      static_cast<int>(model.n_spins()), config.driver_strength);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(cost.rows(), cost.cols());
  const double dt = (t1 - t0) / substeps;
  for (int k = 0; k < substeps; ++k) {
    const double tm = t0 + (k + 0.5) * dt;
    u = expm_hermitian(cost + config.ramp_value(tm) * drive, dt) * u;
  }
  return u;
}

inline Eigen::MatrixXcd global_flip_matrix(int n) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) x(b ^ (dim - 1), b) = 1.0;
  return x;
}

inline double operator_norm(const Eigen::MatrixXcd& m) {
  return m.jacobiSvd().singularValues()[0];
}

inline double loglog_slope(const std::vector<double>& x,
                           const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace qadd::testing
