#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "iccsim/params.hpp"

namespace iccsim {

enum class InternalState { Ground, Excited };

std::string to_string(InternalState s);

enum class StructureLabel { Linear, ZigzagUp, ZigzagDown };

std::string to_string(StructureLabel l);

// Classical equilibrium of one internal state, in dimensionless planar
// coordinates ordered (x_1..x_N, y_1..y_N) with ions sorted by axial
// position.
struct CrystalStructure {
  InternalState internal_state = InternalState::Ground;
  Eigen::VectorXd positions;  // size 2N
  double classical_energy = 0.0;
  StructureLabel structure_label = StructureLabel::Linear;

  int n_ions() const { return static_cast<int>(positions.size()) / 2; }
};

struct PotentialEval {
  double energy = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

// Dimensionless potential energy with exact analytic gradient and Hessian:
// trap terms 1/2 sum(x^2 + a^2 y^2), the central-ion dipole term when
// internal_state is Excited, and pairwise Coulomb 1/|r_i - r_j|.
PotentialEval total_potential(const Eigen::VectorXd& positions,
                              const TrapScenario& scenario,
                              InternalState internal_state);

// Normal modes of one structure: dimensionless angular frequencies in
// ascending order, orthogonal mode matrix (columns are modes) with a
// deterministic sign convention.
struct ModeBasis {
  InternalState internal_state = InternalState::Ground;
  Eigen::VectorXd frequencies;  // size 2N, ascending
  Eigen::MatrixXd mode_matrix;  // 2N x 2N orthogonal
  int soft_mode_index = -1;
  bool soft_mode_confident = true;  // false when the correlation fallback fired

  int n_modes() const { return static_cast<int>(frequencies.size()); }
};

struct NewtonDiagnostics {
  int iterations = 0;
  std::vector<double> energy_history;
  double final_gradient_norm = 0.0;
};

// Newton minimization with backtracking line search from a deterministic
// seed.  Without a seed the zigzag branch with positive central-ion
// transverse displacement is selected; with a seed, the converged minimum
// keeps the seed's transverse pattern.
CrystalStructure find_equilibrium(const TrapScenario& scenario,
                                  InternalState internal_state,
                                  const CrystalStructure* seed = nullptr,
                                  NewtonDiagnostics* diagnostics = nullptr);

ModeBasis normal_modes(const CrystalStructure& structure,
                       const TrapScenario& scenario);

struct SoftModeResult {
  int index = 0;
  bool confident = true;
};

// Lowest-frequency mode whose transverse pattern correlates > 0.9 with the
// alternating (+,-,+,...) zigzag pattern; falls back to the overall
// lowest-frequency mode with confident=false.
SoftModeResult soft_mode_index(const ModeBasis& basis);

// Smallest transverse-sector Hessian eigenvalue of the linear chain at
// transverse/axial ratio a; negative below the instability.  Used by the
// numerical critical-frequency finder.
double linear_chain_soft_eigenvalue(int n_ions, double a_ratio);

// Validity guard: minimum dimensionless mode frequency below which the
// harmonic treatment is refused (anharmonic regime near the instability).
inline constexpr double kMinModeFrequency = 0.05;

// Throws NumericalError("near_critical") unless allow_near_critical.
void enforce_validity_guard(const ModeBasis& basis, bool allow_near_critical);

}  // namespace iccsim
