#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "iccsim/structure_map.hpp"

namespace iccsim {

// Bose-Einstein mean vibrational number; 0 at T = 0.
double thermal_occupation(double omega_rad_s, double temperature_k);

// Modes with nbar below this are excluded from the thermal lambda
// integration (their lambda pinned to 0); the closed form assumes nbar > 0
// and is numerically catastrophic for nbar -> 0.
inline constexpr double kColdOccupation = 1e-8;

enum class ThermalSource { GlobalTemperature, PerModeOverride };

struct ThermalSpec {
  Eigen::VectorXd occupations;  // nbar_j per ground-structure mode
  ThermalSource source = ThermalSource::PerModeOverride;
  double temperature_k = 0.0;  // meaningful for GlobalTemperature

  static ThermalSpec zero(int n_modes);
  static ThermalSpec global_temperature(const ModeBasis& basis_g,
                                        const UnitSystem& units,
                                        double temperature_k);
  static ThermalSpec per_mode(const Eigen::VectorXd& occupations);
  // Mode-selective cooling: every mode at `temperature_k` except the listed
  // ones, which get their own temperature.
  static ThermalSpec mode_selective(const ModeBasis& basis_g,
                                    const UnitSystem& units,
                                    double temperature_k,
                                    const std::vector<int>& special_modes,
                                    double special_temperature_k);

  void validate() const;
};

// Every displayed sub-quantity of the thermal Gaussian integral,
// individually inspectable.  Sizes: with n ground modes, Omega and s span
// the 2n-dimensional coherent-state integral; X and L span the 2h real
// integration variables of the h hot modes.
struct KernelParts {
  Eigen::MatrixXcd Omega;       // 2n x 2n complex symmetric
  Eigen::VectorXcd s;           // 2n
  Complex G_zeta;               // G(zeta),  zeta  = kappa  + beta^e
  Complex G_zeta_prime;         // G*(zeta'), zeta' = kappa' + beta^e
  double phi_tilde = 0.0;       // constant phase Im[(kappa - kappa')^T beta^e]
  Complex C;                    // G_zeta + G_zeta_prime + (1/4) s^T Omega^{-1} s
  Eigen::VectorXcd L;           // linear coefficient of the lambda integral
  Eigen::VectorXcd L_I, L_J, L_K;  // decomposition: G terms, phases, s-coupling
  Eigen::MatrixXcd X;           // quadratic form of the lambda integral (hot)
  Eigen::VectorXd T_diag;       // thermal block 1/nbar on hot modes
  std::vector<bool> hot;        // per-mode integration mask

  Complex log_det_omega;  // principal log det
  Complex log_det_x;      // principal log det of X (0 when no hot modes)
  Complex quad;           // (1/4) L^T X^{-1} L
  double cond_omega = 1.0, cond_x = 1.0;  // LU-based estimates
  double prefactor_phase = 0.0;  // -[(E0e - E0g) + (1/2) sum(we - wg)] t
  double log_z2 = 0.0;           // 2 ln Z
  double sum_log_nbar = 0.0;     // over hot modes
};

KernelParts assemble_kernel(const BogoliubovMap& map, const Eigen::VectorXcd& kappa,
                            const Eigen::VectorXcd& kappa_prime,
                            const ThermalSpec& thermal, double t);

// Lean per-sample record used for branch-tracked sweeps.
struct OverlapSample {
  Complex log_det_omega;  // principal branch
  Complex log_det_x;
  Complex rest;  // everything else in log space
  double cond_x = 1.0;
};

OverlapSample overlap_sample(const BogoliubovMap& map, const Eigen::VectorXcd& kappa,
                             const Eigen::VectorXcd& kappa_prime,
                             const ThermalSpec& thermal, double t);

// Closed-form overlap at a single time; determinant roots on the principal
// branch (the modulus is branch independent).
Complex overlap_at(const BogoliubovMap& map, const Eigen::VectorXcd& kappa,
                   const Eigen::VectorXcd& kappa_prime, const ThermalSpec& thermal,
                   double t);

// Zero-temperature limit (all modes cold).
Complex overlap_zero_t(const BogoliubovMap& map, const Eigen::VectorXcd& kappa,
                       const Eigen::VectorXcd& kappa_prime, double t);

// P_g = (1/2)(1 + Re[e^{i phi} O]).
double ramsey_probability(Complex overlap, double phi);

struct TraceDiagnostics {
  double max_branch_step_omega = 0.0;  // max |d arg sqrt(det Omega)| per step
  double max_branch_step_x = 0.0;
  double max_cond_x = 1.0;
  bool grid_density_ok = true;
};

// Branch-continuous overlap along a sorted time grid: determinant phases
// are unwrapped sequentially from the analytically known t = 0 branch.
// Throws NumericalError("branch_tracking") if a step is too large to
// unwrap reliably.
std::vector<Complex> overlap_sequence(const BogoliubovMap& map,
                                      const Eigen::VectorXcd& kappa,
                                      const Eigen::VectorXcd& kappa_prime,
                                      const ThermalSpec& thermal,
                                      const Eigen::VectorXd& t_grid,
                                      TraceDiagnostics* diagnostics = nullptr,
                                      int n_threads = 1);

// Full pipeline bundle for one scenario.
struct QuenchPipeline {
  TrapScenario scenario;
  UnitSystem units;
  DimensionlessQuench quench;
  double nu_c_hz = 0.0;
  CrystalStructure struct_g, struct_e;
  ModeBasis basis_g, basis_e;
  BogoliubovMap map;
};

QuenchPipeline build_pipeline(const TrapScenario& scenario,
                              bool allow_near_critical = false);

struct VisibilityTrace {
  Eigen::VectorXd t_seconds;
  Eigen::VectorXd t_dimensionless;
  std::vector<Complex> overlap;
  Eigen::VectorXd visibility;
  std::string fingerprint;  // hash of all inputs
  TraceDiagnostics diagnostics;
};

VisibilityTrace visibility_trace(const QuenchPipeline& pipeline,
                                 const ThermalSpec& thermal,
                                 const RecoilSpec& recoil,
                                 const Eigen::VectorXd& t_seconds,
                                 int n_threads = 1);

}  // namespace iccsim
