#include "iccsim/fock_oracle.hpp"

#include <cmath>

namespace iccsim {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

TruncatedSystem make_truncated_system(const BogoliubovMap& map,
                                      const std::vector<int>& n_max) {
  const int n = map.n_modes();
  if (n != static_cast<int>(n_max.size()))
    throw ConfigError("n_max list does not match the number of modes");
  if (n > kOracleMaxModes)
    throw OracleError("mode_cap", "oracle supports at most 3 modes");

  TruncatedSystem sys;
  sys.map = map;
  sys.n_max = n_max;
  long dim = 1;
  for (int m : n_max) {
    if (m < 1) throw ConfigError("n_max must be >= 1");
    dim *= (m + 1);
    if (dim > kOracleMaxDimension)
      throw OracleError("dimension_cap", "tensor-product dimension exceeds 250000");
  }
  sys.dimension = dim;

  for (int j = 0; j < n; ++j) {
    MatrixXcd a1 = MatrixXcd::Zero(n_max[j] + 1, n_max[j] + 1);
    for (int k = 1; k <= n_max[j]; ++k) a1(k - 1, k) = std::sqrt(double(k));
    MatrixXcd op = MatrixXcd::Identity(1, 1);
    for (int k = 0; k < n; ++k) {
      op = kron(op, k == j ? a1
                           : MatrixXcd::Identity(n_max[k] + 1, n_max[k] + 1));
    }
    sys.lowering.push_back(std::move(op));
  }
  return sys;
}

OracleHamiltonians build_hamiltonians(const TruncatedSystem& sys) {
  const int n = sys.n_modes();
  const long dim = sys.dimension;
  const BogoliubovMap& m = sys.map;

  OracleHamiltonians h;
  h.h_g = MatrixXcd::Zero(dim, dim);
  for (int j = 0; j < n; ++j)
    h.h_g += m.omega_g[j] * (sys.lowering[j].adjoint() * sys.lowering[j]);
  h.h_g += (m.e0_g + 0.5 * m.omega_g.sum()) * MatrixXcd::Identity(dim, dim);

  h.h_e = MatrixXcd::Zero(dim, dim);
  for (int j = 0; j < n; ++j) {
    MatrixXcd b = m.beta_e[j] * MatrixXcd::Identity(dim, dim);
    for (int k = 0; k < n; ++k)
      b += m.u(k, j) * sys.lowering[k] + m.v(k, j) * sys.lowering[k].adjoint();
    h.h_e += m.omega_e[j] * (b.adjoint() * b);
  }
  h.h_e += (m.e0_e + 0.5 * m.omega_e.sum()) * MatrixXcd::Identity(dim, dim);
  return h;
}

namespace {

// Thermal weight of each product basis state, plus the truncated-tail check.
VectorXd thermal_weights(const TruncatedSystem& sys, const ThermalSpec& thermal) {
  const int n = sys.n_modes();
  VectorXd w = VectorXd::Ones(sys.dimension);
  long stride = sys.dimension;
  for (int j = 0; j < n; ++j) {
    const int d = sys.n_max[j] + 1;
    stride /= d;
    const double nb = thermal.occupations[j];
    const double q = nb / (1.0 + nb);
    for (long idx = 0; idx < sys.dimension; ++idx) {
      const int occ = static_cast<int>((idx / stride) % d);
      w[idx] *= std::pow(q, occ) / (1.0 + nb);
    }
  }
  return w / w.sum();
}

}  // namespace

double thermal_tail(const TruncatedSystem& sys, const ThermalSpec& thermal) {
  double kept = 1.0;
  for (int j = 0; j < sys.n_modes(); ++j) {
    const double nb = thermal.occupations[j];
    const double q = nb / (1.0 + nb);
    kept *= 1.0 - std::pow(q, sys.n_max[j] + 1);
  }
  return 1.0 - kept;
}

OracleEvaluator::OracleEvaluator(const TruncatedSystem& sys, const ThermalSpec& thermal,
                                 const VectorXcd& kappa, const VectorXcd& kappa_prime) {
  if (thermal.occupations.size() != sys.n_modes())
    throw ConfigError("thermal spec dimension does not match the oracle system");
  if (thermal_tail(sys, thermal) > 1e-10)
    throw OracleError("truncation_tail",
                      "thermal tail beyond the truncation exceeds 1e-10 of the partition sum");

  const OracleHamiltonians h = build_hamiltonians(sys);
  g_levels_ = h.h_g.diagonal().real();
  weights_ = thermal_weights(sys, thermal);

  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h.h_e);
  e_levels_ = es.eigenvalues();
  const MatrixXcd& w_mat = es.eigenvectors();

  auto displacement = [&](const VectorXcd& kv) -> MatrixXcd {
    if (kv.cwiseAbs().maxCoeff() == 0.0)
      return MatrixXcd::Identity(sys.dimension, sys.dimension);
    MatrixXcd x = MatrixXcd::Zero(sys.dimension, sys.dimension);
    for (int j = 0; j < sys.n_modes(); ++j) {
      MatrixXcd b = sys.map.beta_e[j] * MatrixXcd::Identity(sys.dimension, sys.dimension);
      for (int k = 0; k < sys.n_modes(); ++k)
        b += sys.map.u(k, j) * sys.lowering[k] + sys.map.v(k, j) * sys.lowering[k].adjoint();
      x += kv[j] * b.adjoint() - std::conj(kv[j]) * b;
    }
    // x is anti-Hermitian: exponentiate through the Hermitian ix.
    Eigen::SelfAdjointEigenSolver<MatrixXcd> hx(Complex(0, 1) * x);
    VectorXcd phases(sys.dimension);
    for (long i = 0; i < sys.dimension; ++i)
      phases[i] = std::exp(Complex(0.0, -hx.eigenvalues()[i]));
    return hx.eigenvectors() * phases.asDiagonal() * hx.eigenvectors().adjoint();
  };

  const MatrixXcd b_right = w_mat.adjoint() * displacement(kappa);
  const MatrixXcd b_left = w_mat.adjoint() * displacement(kappa_prime);
  coupling_ = b_left.conjugate().cwiseProduct(b_right);
}

Complex OracleEvaluator::operator()(double t) const {
  const long dim = g_levels_.size();
  VectorXcd phase_e(dim), weighted_g(dim);
  for (long m = 0; m < dim; ++m) phase_e[m] = std::exp(Complex(0.0, -e_levels_[m] * t));
  for (long n = 0; n < dim; ++n)
    weighted_g[n] = weights_[n] * std::exp(Complex(0.0, g_levels_[n] * t));
  return (phase_e.transpose() * (coupling_ * weighted_g))(0);
}

Complex oracle_overlap(const TruncatedSystem& sys, const ThermalSpec& thermal,
                       const VectorXcd& kappa, const VectorXcd& kappa_prime, double t) {
  return OracleEvaluator(sys, thermal, kappa, kappa_prime)(t);
}

ConvergenceReport convergence_sweep(const BogoliubovMap& map, const ThermalSpec& thermal,
                                    const VectorXcd& kappa, const VectorXcd& kappa_prime,
                                    const std::vector<double>& t_list,
                                    const std::vector<int>& n_max_levels) {
  ConvergenceReport report;
  report.per_time.assign(t_list.size(), {});
  std::vector<std::vector<Complex>> values;  // [level][t]
  for (int level : n_max_levels) {
    const TruncatedSystem sys =
        make_truncated_system(map, std::vector<int>(map.n_modes(), level));
    OracleEvaluator eval(sys, thermal, kappa, kappa_prime);
    std::vector<Complex> row;
    for (double t : t_list) row.push_back(eval(t));
    values.push_back(std::move(row));
  }
  for (size_t ti = 0; ti < t_list.size(); ++ti) {
    for (size_t li = 0; li < n_max_levels.size(); ++li) {
      ConvergenceEntry e;
      e.n_max = n_max_levels[li];
      e.value = values[li][ti];
      e.difference = li == 0 ? 0.0 : std::abs(values[li][ti] - values[li - 1][ti]);
      report.per_time[ti].push_back(e);
    }
  }
  double last = 0.0;
  for (size_t ti = 0; ti < t_list.size(); ++ti)
    if (!report.per_time[ti].empty())
      last = std::max(last, report.per_time[ti].back().difference);
  report.last_difference = last;
  report.converged = n_max_levels.size() >= 2 && last < 1e-7;
  return report;
}

}  // namespace iccsim
