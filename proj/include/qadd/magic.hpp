#pragma once

#include <Eigen/Dense>

#include "qadd/ising.hpp"

namespace qadd {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double atomic_mass = 1.66053906660e-27;  // kg
inline constexpr double yb171_mass = 171.0 * atomic_mass;
// first-order Zeeman sensitivity of a magnetically sensitive 171Yb+
// hyperfine transition, 2*pi * 14 GHz/T
inline constexpr double yb171_sensitivity = 2.0 * 3.14159265358979323846 * 14e9;
}  // namespace constants

/// Linear ion chain in a harmonic axial trap with a static magnetic-field
/// gradient along the chain axis.
struct IonChainSpec {
  int n_ions = 5;
  double ion_mass = constants::yb171_mass;           // kg
  double axial_frequency = 0.0;                      // omega_z, rad/s
  double gradient = 0.0;                             // dB/dz, T/m
  double magnetic_sensitivity = constants::yb171_sensitivity;  // rad/(s T)

  void validate() const;
  // characteristic Coulomb length (e^2 / (4 pi eps0 m omega_z^2))^(1/3)
  double length_scale() const;
};

struct NormalModes {
  Eigen::VectorXd frequencies;            // rad/s, ascending
  Eigen::MatrixXd mode_matrix;            // S(ion, mode), orthogonal
  Eigen::VectorXd equilibrium_positions;  // meters
};

// Stationary chain positions (meters), mirror-symmetric about the trap
// center. Damped Newton iteration from a uniformly spaced initial guess;
// converged when the residual force is below 1e-12 characteristic units.
Eigen::VectorXd equilibrium_positions(const IonChainSpec& spec);

// Axial phonon modes: eigen-decomposition of the potential Hessian at the
// equilibrium. The lowest mode is the center-of-mass mode at omega_z.
NormalModes normal_modes(const IonChainSpec& spec);

// Gradient-induced spin-spin couplings J_ij = sum_l nu_l eps_il eps_jl with
// Lamb-Dicke factors eps_il = dz_l (dw/dz) S_il / nu_l. Entries in ordinary
// Hz (angular result divided by 2 pi); fields are zero.
IsingModel coupling_matrix(const IonChainSpec& spec);

// First-order effect of an axial trap frequency offset: every coupling is
// scaled by (1 - 2 d_omega/omega_z), so the ground-state set is unchanged.
// The linearization holds for |frequency_offset| / omega_z up to about 0.1.
IsingModel trap_fluctuation_couplings(const IsingModel& couplings,
                                      double axial_frequency,
                                      double frequency_offset);

}  // namespace qadd
