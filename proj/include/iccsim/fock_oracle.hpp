#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "iccsim/structure_map.hpp"
#include "iccsim/visibility.hpp"

namespace iccsim {

// Brute-force evaluator of O(t) = Tr{R_{k'}^dag U_e R_k rho0 U_g^dag} in a
// truncated Fock space.  Independent of the Gaussian-integral machinery:
// only the Bogoliubov coefficients are shared with the closed form.
//
// Caps: at most 3 modes and a tensor-product dimension of 250 000.
inline constexpr int kOracleMaxModes = 3;
inline constexpr long kOracleMaxDimension = 250000;

struct TruncatedSystem {
  BogoliubovMap map;          // restricted or synthetic
  std::vector<int> n_max;     // per-mode truncation
  long dimension = 0;

  // Ladder operators of the ground-structure modes in the product basis.
  std::vector<Eigen::MatrixXcd> lowering;

  int n_modes() const { return static_cast<int>(n_max.size()); }
};

TruncatedSystem make_truncated_system(const BogoliubovMap& map,
                                      const std::vector<int>& n_max);

struct OracleHamiltonians {
  Eigen::MatrixXcd h_g;
  Eigen::MatrixXcd h_e;
};

// H_g = sum w_j^g (a^dag a + 1/2) + E0g, diagonal in the product basis;
// H_e built operatorially from b_j = sum_k u_kj a_k + v_kj a_k^dag + beta^e_j.
OracleHamiltonians build_hamiltonians(const TruncatedSystem& system);

// Relative Boltzmann weight beyond the truncation; must stay below 1e-10.
double thermal_tail(const TruncatedSystem& system, const ThermalSpec& thermal);

Complex oracle_overlap(const TruncatedSystem& system, const ThermalSpec& thermal,
                       const Eigen::VectorXcd& kappa, const Eigen::VectorXcd& kappa_prime,
                       double t);

// Precomputed spectral data for evaluating many times cheaply.
class OracleEvaluator {
 public:
  OracleEvaluator(const TruncatedSystem& system, const ThermalSpec& thermal,
                  const Eigen::VectorXcd& kappa, const Eigen::VectorXcd& kappa_prime);
  Complex operator()(double t) const;

 private:
  Eigen::VectorXd e_levels_;   // eigenvalues of H_e
  Eigen::VectorXd g_levels_;   // diagonal of H_g
  Eigen::VectorXd weights_;    // thermal weights per basis state
  Eigen::MatrixXcd coupling_;  // conj(W^dag R')_{mn} (W^dag R)_{mn}
};

struct ConvergenceEntry {
  int n_max = 0;
  Complex value;
  double difference = 0.0;  // max |value - previous| over the t list
};

struct ConvergenceReport {
  std::vector<std::vector<ConvergenceEntry>> per_time;  // [t][level]
  double last_difference = 0.0;
  bool converged = false;
};

// Runs the oracle at increasing truncations and reports successive
// differences; converged iff the last difference < 1e-7.
ConvergenceReport convergence_sweep(const BogoliubovMap& map, const ThermalSpec& thermal,
                                    const Eigen::VectorXcd& kappa,
                                    const Eigen::VectorXcd& kappa_prime,
                                    const std::vector<double>& t_list,
                                    const std::vector<int>& n_max_levels);

}  // namespace iccsim
