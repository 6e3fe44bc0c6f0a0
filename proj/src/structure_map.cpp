#include "iccsim/structure_map.hpp"

#include <cmath>

#include "iccsim/constants.hpp"

namespace iccsim {

namespace {

BogoliubovMap assemble(const Eigen::VectorXd& omega_g, const Eigen::VectorXd& omega_e,
                       const Eigen::MatrixXd& T, const Eigen::VectorXd& D_g,
                       double e0_g, double e0_e) {
  const int n = static_cast<int>(omega_g.size());
  BogoliubovMap m;
  m.T = T;
  m.D_g = D_g;
  m.omega_g = omega_g;
  m.omega_e = omega_e;
  m.e0_g = e0_g;
  m.e0_e = e0_e;

  m.u.resize(n, n);
  m.v.resize(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const double r = std::sqrt(omega_e[k] / omega_g[j]);
      m.u(j, k) = 0.5 * T(j, k) * (r + 1.0 / r);
      m.v(j, k) = 0.5 * T(j, k) * (r - 1.0 / r);
    }
  }

  m.beta_g = (omega_g * 0.5).cwiseSqrt().cwiseProduct(D_g);
  m.beta_e = -(m.u + m.v).transpose() * m.beta_g;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.u, Eigen::ComputeThinU | Eigen::ComputeThinV);
  m.u_condition = svd.singularValues()[0] / svd.singularValues()[n - 1];
  if (!(m.u_condition < 1e12))
    throw NumericalError("singular_u", "Bogoliubov u matrix is numerically singular");

  Eigen::MatrixXd a = m.u.partialPivLu().solve(m.v);
  m.a_asymmetry = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (m.a_asymmetry > 1e-9)
    throw NumericalError("asymmetric_A",
                         "u^{-1} v asymmetry " + std::to_string(m.a_asymmetry) +
                             " exceeds tolerance; map inputs are inconsistent");
  m.A = 0.5 * (a + a.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.A);
  const double radius = es.eigenvalues().cwiseAbs().maxCoeff();
  if (radius >= 1.0)
    throw NumericalError("squeezing_unbounded", "spectral radius of A is >= 1");
  double log_z = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a_i = es.eigenvalues()[i];
    log_z += 0.25 * std::log1p(-a_i * a_i);
  }
  m.Z = std::exp(log_z);
  return m;
}

}  // namespace

BogoliubovMap build_map(const ModeBasis& basis_g, const ModeBasis& basis_e,
                        const CrystalStructure& struct_g,
                        const CrystalStructure& struct_e, double quantum_scale) {
  const Eigen::VectorXd d_g = struct_e.positions - struct_g.positions;
  const Eigen::MatrixXd T = basis_g.mode_matrix.transpose() * basis_e.mode_matrix;
  const Eigen::VectorXd D_g =
      quantum_scale * (basis_g.mode_matrix.transpose() * d_g);
  const double energy_scale = quantum_scale * quantum_scale;  // m wx^2 l^2 / (hbar wx)
  BogoliubovMap m = assemble(basis_g.frequencies, basis_e.frequencies, T, D_g,
                             energy_scale * struct_g.classical_energy,
                             energy_scale * struct_e.classical_energy);
  m.d_g = d_g;
  return m;
}

BogoliubovMap synthetic_map(const Eigen::VectorXd& omega_g, const Eigen::VectorXd& omega_e,
                            const Eigen::MatrixXd& T, const Eigen::VectorXd& D_g,
                            double e0_g, double e0_e) {
  const int n = static_cast<int>(omega_g.size());
  if (omega_e.size() != n || T.rows() != n || T.cols() != n || D_g.size() != n)
    throw ConfigError("synthetic map: inconsistent dimensions");
  if ((T.transpose() * T - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-9)
    throw ConfigError("synthetic map: T must be orthogonal");
  if (omega_g.minCoeff() <= 0.0 || omega_e.minCoeff() <= 0.0)
    throw ConfigError("synthetic map: frequencies must be positive");
  BogoliubovMap m = assemble(omega_g, omega_e, T, D_g, e0_g, e0_e);
  m.d_g = Eigen::VectorXd::Zero(n);
  return m;
}

std::string to_string(RecoilGeometry g) {
  switch (g) {
    case RecoilGeometry::None: return "none";
    case RecoilGeometry::Copropagating: return "copropagating";
    case RecoilGeometry::Orthogonal: return "orthogonal";
    case RecoilGeometry::Counterpropagating: return "counterpropagating";
    default: return "explicit";
  }
}

RecoilGeometry recoil_geometry_from_string(const std::string& s) {
  if (s == "none") return RecoilGeometry::None;
  if (s == "copropagating") return RecoilGeometry::Copropagating;
  if (s == "orthogonal") return RecoilGeometry::Orthogonal;
  if (s == "counterpropagating") return RecoilGeometry::Counterpropagating;
  if (s == "explicit") return RecoilGeometry::Explicit;
  throw ConfigError("unknown recoil geometry: " + s);
}

Eigen::Vector2d RecoilSpec::effective_k(WhichPulse pulse, const IonSpecies& species) const {
  const double k0 = constants::two_pi / species.transition_wavelength_m;
  switch (geometry) {
    case RecoilGeometry::None:
    case RecoilGeometry::Copropagating:
      return Eigen::Vector2d::Zero();
    case RecoilGeometry::Orthogonal:
      return {0.0, std::sqrt(2.0) * k0};
    case RecoilGeometry::Counterpropagating:
      return {0.0, 2.0 * k0};
    case RecoilGeometry::Explicit:
      return pulse == WhichPulse::First ? k_first : k_second;
  }
  return Eigen::Vector2d::Zero();
}

Eigen::VectorXcd recoil_displacement(const RecoilSpec& spec, const ModeBasis& basis_e,
                                     WhichPulse pulse, const TrapScenario& scenario) {
  const int n2 = basis_e.n_modes();
  const int n = n2 / 2;
  Eigen::VectorXcd kappa = Eigen::VectorXcd::Zero(n2);
  const Eigen::Vector2d k = spec.effective_k(pulse, scenario.species);
  if (k.squaredNorm() == 0.0) return kappa;

  int ion = spec.target_ion >= 0 ? spec.target_ion : scenario.central_ion();
  if (ion >= n)
    throw ConfigError("recoil target ion index out of range");

  const UnitSystem units = UnitSystem::from_scenario(scenario);
  const double m = scenario.species.mass_kg;
  for (int j = 0; j < n2; ++j) {
    const double proj =
        k.x() * basis_e.mode_matrix(ion, j) + k.y() * basis_e.mode_matrix(n + ion, j);
    const double omega_si = basis_e.frequencies[j] * units.angular_frequency_rad_s;
    kappa[j] = Complex(0.0, std::sqrt(constants::hbar / (2.0 * m * omega_si)) * proj);
  }
  return kappa;
}

double displacement_phase(const Eigen::VectorXcd& lambda_g, const BogoliubovMap& map) {
  return 2.0 * (lambda_g.cwiseProduct(map.beta_g.cast<Complex>())).sum().imag();
}

Eigen::VectorXcd to_excited_basis(const Eigen::VectorXcd& lambda_g, const BogoliubovMap& map) {
  return map.u.transpose() * lambda_g + map.v.transpose() * lambda_g.conjugate();
}

Eigen::VectorXcd evolve_lambda(const Eigen::VectorXcd& lambda_g, const BogoliubovMap& map,
                               double t) {
  const int n = map.n_modes();
  Eigen::VectorXcd rotated(n);
  for (int j = 0; j < n; ++j)
    rotated[j] = lambda_g[j] * std::exp(Complex(0.0, -map.omega_g[j] * t));
  return map.u.transpose() * rotated + map.v.transpose() * rotated.conjugate();
}

}  // namespace iccsim
