#pragma once

#include <Eigen/Dense>
#include <complex>

#include "iccsim/crystal.hpp"

namespace iccsim {

using Complex = std::complex<double>;

// Bogoliubov/displacement machinery linking the two structures' phonon
// bases.  All quantities are dimensionless (hbar = m = 1).
struct BogoliubovMap {
  Eigen::VectorXd d_g;   // equilibrium displacements r^e - r^g (2N, Coulomb lengths)
  Eigen::MatrixXd T;     // mode-link matrix T_jl = sum_k Mg_kj Me_kl
  Eigen::VectorXd D_g;   // mode-space displacement in quantum-length units
  Eigen::MatrixXd u, v;  // Bogoliubov coefficients
  Eigen::VectorXd beta_g, beta_e;  // phase-space displacements (real)
  Eigen::MatrixXd A;     // squeezing matrix u^{-1} v (symmetric)
  double Z = 1.0;        // det(1 - A^2)^{1/4}

  // Carried along for the overlap evaluation.
  Eigen::VectorXd omega_g, omega_e;  // dimensionless angular frequencies
  double e0_g = 0.0, e0_e = 0.0;     // classical energies in hbar*wx units

  // Diagnostics.
  double u_condition = 1.0;
  double a_asymmetry = 0.0;

  int n_modes() const { return static_cast<int>(omega_g.size()); }
};

// quantum_scale = UnitSystem::quantum_scale converts the structural
// displacement (Coulomb lengths) and classical energies (m wx^2 l^2) into
// ladder-operator units; the synthetic path passes 1.
BogoliubovMap build_map(const ModeBasis& basis_g, const ModeBasis& basis_e,
                        const CrystalStructure& struct_g,
                        const CrystalStructure& struct_e,
                        double quantum_scale = 1.0);

// Synthetic map from raw ingredients (used by the Fock oracle suite and
// tests).  T must be orthogonal; D_g is the mode-space displacement.
BogoliubovMap synthetic_map(const Eigen::VectorXd& omega_g,
                            const Eigen::VectorXd& omega_e,
                            const Eigen::MatrixXd& T,
                            const Eigen::VectorXd& D_g, double e0_g = 0.0,
                            double e0_e = 0.0);

enum class RecoilGeometry { None, Copropagating, Orthogonal, Counterpropagating, Explicit };

std::string to_string(RecoilGeometry g);
RecoilGeometry recoil_geometry_from_string(const std::string& s);

enum class WhichPulse { First, Second };

// Effective wave vectors of the two Ramsey pulses acting on one ion.
// Presets put the effective k along +y with |k| in {0, sqrt(2) k0, 2 k0},
// k0 = 2 pi / wavelength, and use k' = k for the second pulse.
struct RecoilSpec {
  RecoilGeometry geometry = RecoilGeometry::None;
  Eigen::Vector2d k_first = Eigen::Vector2d::Zero();   // 1/m, Explicit only
  Eigen::Vector2d k_second = Eigen::Vector2d::Zero();  // 1/m, Explicit only
  int target_ion = -1;  // -1 selects the central ion

  Eigen::Vector2d effective_k(WhichPulse pulse, const IonSpecies& species) const;
};

// Per-mode coherent displacement kappa_j = i sqrt(hbar / (2 m w_j)) K_j
// with K_j the projection of the wave vector onto mode j at the target
// ion.  Returned dimensionless; the SI bridge uses the scenario units.
Eigen::VectorXcd recoil_displacement(const RecoilSpec& spec,
                                     const ModeBasis& basis_e,
                                     WhichPulse pulse,
                                     const TrapScenario& scenario);

// Phase in D_g(lambda) = e^{i phi} D_e(lambda^e):  phi = 2 Im sum lambda_j beta^g_j.
double displacement_phase(const Eigen::VectorXcd& lambda_g, const BogoliubovMap& map);

// Static basis change lambda^e_j = sum_l (lambda_l u_lj + conj(lambda_l) v_lj).
Eigen::VectorXcd to_excited_basis(const Eigen::VectorXcd& lambda_g, const BogoliubovMap& map);

// Time-evolved basis change with e^{-i w^g t} phases on lambda.
Eigen::VectorXcd evolve_lambda(const Eigen::VectorXcd& lambda_g, const BogoliubovMap& map,
                               double t);

}  // namespace iccsim
