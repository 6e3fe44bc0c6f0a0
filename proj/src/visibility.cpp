#include "iccsim/visibility.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "iccsim/constants.hpp"
#include "iccsim/sha256.hpp"

namespace iccsim {

double thermal_occupation(double omega_rad_s, double temperature_k) {
  if (!(omega_rad_s > 0.0)) throw ConfigError("thermal occupation needs omega > 0");
  if (temperature_k < 0.0) throw ConfigError("temperature must be >= 0");
  if (temperature_k == 0.0) return 0.0;
  const double x = constants::hbar * omega_rad_s / (constants::k_boltzmann * temperature_k);
  if (x > 700.0) return 0.0;
  return 1.0 / std::expm1(x);
}

ThermalSpec ThermalSpec::zero(int n_modes) {
  ThermalSpec t;
  t.occupations = Eigen::VectorXd::Zero(n_modes);
  t.source = ThermalSource::GlobalTemperature;
  t.temperature_k = 0.0;
  return t;
}

ThermalSpec ThermalSpec::global_temperature(const ModeBasis& basis_g,
                                            const UnitSystem& units,
                                            double temperature_k) {
  ThermalSpec t;
  const int n = basis_g.n_modes();
  t.occupations.resize(n);
  for (int j = 0; j < n; ++j)
    t.occupations[j] = thermal_occupation(
        basis_g.frequencies[j] * units.angular_frequency_rad_s, temperature_k);
  t.source = ThermalSource::GlobalTemperature;
  t.temperature_k = temperature_k;
  return t;
}

ThermalSpec ThermalSpec::per_mode(const Eigen::VectorXd& occupations) {
  ThermalSpec t;
  t.occupations = occupations;
  t.source = ThermalSource::PerModeOverride;
  t.validate();
  return t;
}

ThermalSpec ThermalSpec::mode_selective(const ModeBasis& basis_g, const UnitSystem& units,
                                        double temperature_k,
                                        const std::vector<int>& special_modes,
                                        double special_temperature_k) {
  ThermalSpec t = global_temperature(basis_g, units, temperature_k);
  for (int j : special_modes) {
    if (j < 0 || j >= t.occupations.size())
      throw ConfigError("mode-selective cooling: mode index out of range");
    t.occupations[j] = thermal_occupation(
        basis_g.frequencies[j] * units.angular_frequency_rad_s, special_temperature_k);
  }
  t.source = ThermalSource::PerModeOverride;
  return t;
}

void ThermalSpec::validate() const {
  for (int j = 0; j < occupations.size(); ++j)
    if (!(occupations[j] >= 0.0) || !std::isfinite(occupations[j]))
      throw ConfigError("mode occupations must be finite and >= 0");
}

double ramsey_probability(Complex overlap, double phi) {
  return 0.5 * (1.0 + (std::exp(Complex(0.0, phi)) * overlap).real());
}

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Accumulator for the exponent of the thermal Gaussian integral over the
// real and imaginary parts w of the hot lambdas:  c + b.w + w.Q.w.
struct ExponentForm {
  Complex c{0.0, 0.0};
  VectorXcd b;
  MatrixXcd Q;

  explicit ExponentForm(int dim)
      : b(VectorXcd::Zero(dim)), Q(MatrixXcd::Zero(dim, dim)) {}

  // scale * p(w)^T R q(w) with affine p = p0 + P w, q = q0 + Q2 w.
  void add_bilinear(const VectorXcd& p0, const MatrixXcd& P, const MatrixXcd& R,
                    const VectorXcd& q0, const MatrixXcd& Q2, Complex scale,
                    VectorXcd* bucket = nullptr) {
    c += scale * (p0.transpose() * R * q0)(0);
    const VectorXcd lin = scale * (P.transpose() * (R * q0) + Q2.transpose() * (R.transpose() * p0));
    b += lin;
    if (bucket != nullptr) *bucket += lin;
    const MatrixXcd M = scale * (P.transpose() * R * Q2);
    Q += 0.5 * (M + M.transpose());
  }

  void add_linear(const VectorXcd& lin, Complex scale, VectorXcd* bucket = nullptr) {
    const VectorXcd contribution = scale * lin;
    b += contribution;
    if (bucket != nullptr) *bucket += contribution;
  }
};

struct LogDet {
  Complex log_value;  // log|det| + i arg, principal
  double condition;
};

// log det and a conditioning estimate from the LU factors.
LogDet log_det_lu(const Eigen::PartialPivLU<MatrixXcd>& lu, int dim) {
  double log_abs = 0.0, arg = 0.0;
  double min_piv = std::numeric_limits<double>::infinity(), max_piv = 0.0;
  const auto& u = lu.matrixLU();
  for (int i = 0; i < dim; ++i) {
    const Complex d = u(i, i);
    const double a = std::abs(d);
    log_abs += std::log(a);
    arg += std::arg(d);
    min_piv = std::min(min_piv, a);
    max_piv = std::max(max_piv, a);
  }
  const int sign = lu.permutationP().determinant();
  if (sign < 0) arg += constants::pi;
  // reduce to (-pi, pi]
  arg = std::remainder(arg, 2.0 * constants::pi);
  return {Complex(log_abs, arg), min_piv > 0.0 ? max_piv / min_piv : 1e300};
}

struct KernelCore {
  KernelParts parts;
  OverlapSample sample;
};

KernelCore assemble_core(const BogoliubovMap& map, const VectorXcd& kappa,
                         const VectorXcd& kappa_prime, const ThermalSpec& thermal,
                         double t, bool want_parts) {
  const int n = map.n_modes();
  if (kappa.size() != n || kappa_prime.size() != n)
    throw ConfigError("kappa dimension does not match the map");
  if (thermal.occupations.size() != n)
    throw ConfigError("thermal spec dimension does not match the map");
  if (!std::isfinite(t)) throw ConfigError("t must be finite");

  const MatrixXd& u = map.u;
  const MatrixXd& v = map.v;
  const MatrixXd& A = map.A;
  const VectorXd& wg = map.omega_g;
  const VectorXd& we = map.omega_e;
  const VectorXd& nbar = thermal.occupations;

  VectorXcd F(n), E(n);
  for (int j = 0; j < n; ++j) {
    F[j] = std::exp(Complex(0.0, -we[j] * t));
    E[j] = std::exp(Complex(0.0, -wg[j] * t));
  }

  // Omega blocks from A~ = A .* (F F^T).
  MatrixXcd At(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) At(j, k) = A(j, k) * F[j] * F[k];
  const MatrixXcd Ap = 0.5 * (At + A);
  const MatrixXcd Am = 0.5 * (At - A);
  MatrixXcd Omega(2 * n, 2 * n);
  const MatrixXcd id = MatrixXcd::Identity(n, n);
  Omega << id - Ap, Complex(0, -1) * Am, Complex(0, -1) * Am, id + Ap;

  std::vector<bool> hot(n);
  std::vector<int> hot_idx;
  for (int j = 0; j < n; ++j) {
    hot[j] = nbar[j] >= kColdOccupation;
    if (hot[j]) hot_idx.push_back(j);
  }
  const int nh = static_cast<int>(hot_idx.size());

  // lambda(w): affine maps of the 2*nh real integration variables.
  MatrixXcd Lam = MatrixXcd::Zero(n, 2 * nh);
  for (int c = 0; c < nh; ++c) {
    Lam(hot_idx[c], c) = Complex(1.0, 0.0);
    Lam(hot_idx[c], nh + c) = Complex(0.0, 1.0);
  }
  const MatrixXcd LamC = Lam.conjugate();

  const VectorXcd zeta = kappa + map.beta_e.cast<Complex>();
  const VectorXcd zetap = kappa_prime + map.beta_e.cast<Complex>();

  const MatrixXcd Cmat = u.cast<Complex>().transpose() * Lam +
                         v.cast<Complex>().transpose() * LamC;
  const MatrixXcd Dmat = u.cast<Complex>().transpose() * (E.asDiagonal() * Lam) +
                         v.cast<Complex>().transpose() * (E.conjugate().asDiagonal() * LamC);

  const MatrixXcd CmatC = Cmat.conjugate();
  const MatrixXcd DmatC = Dmat.conjugate();
  const VectorXcd zetaC = zeta.conjugate();
  const VectorXcd zetapC = zetap.conjugate();
  const MatrixXcd Ac = A.cast<Complex>();
  const MatrixXcd idc = MatrixXcd::Identity(n, n);

  ExponentForm exp_form(2 * nh);
  VectorXcd bucket_i = VectorXcd::Zero(2 * nh);
  VectorXcd bucket_j = VectorXcd::Zero(2 * nh);
  VectorXcd bucket_k = VectorXcd::Zero(2 * nh);

  // G(theta) = 1/2 conj(th)^T A conj(th) - 1/2 conj(th)^T th, theta = zeta + Cmat w
  exp_form.add_bilinear(zetaC, CmatC, Ac, zetaC, CmatC, 0.5, &bucket_i);
  exp_form.add_bilinear(zetaC, CmatC, idc, zeta, Cmat, -0.5, &bucket_i);
  const Complex g_zeta = exp_form.c;
  // G*(theta') = 1/2 th'^T A th' - 1/2 th'^T conj(th'), theta' = zeta' + Dmat w
  exp_form.add_bilinear(zetap, Dmat, Ac, zetap, Dmat, 0.5, &bucket_i);
  exp_form.add_bilinear(zetap, Dmat, idc, zetapC, DmatC, -0.5, &bucket_i);
  const Complex g_zeta_prime = exp_form.c - g_zeta;

  // s = (S+; -i S-) with S[gamma] = A conj(gamma) - gamma and
  // S± = S[theta] ± F .* conj(S[theta']).
  const VectorXcd s_th0 = Ac * zetaC - zeta;
  const MatrixXcd s_th_w = Ac * CmatC - Cmat;
  const VectorXcd s_tp0 = Ac * zetapC - zetap;
  const MatrixXcd s_tp_w = Ac * DmatC - Dmat;
  const VectorXcd s_tpc0 = s_tp0.conjugate();
  const MatrixXcd s_tpc_w = s_tp_w.conjugate();

  VectorXcd s0(2 * n);
  MatrixXcd Sw(2 * n, 2 * nh);
  s0.head(n) = s_th0 + F.cwiseProduct(s_tpc0);
  s0.tail(n) = Complex(0, -1) * (s_th0 - F.cwiseProduct(s_tpc0));
  Sw.topRows(n) = s_th_w + F.asDiagonal() * s_tpc_w;
  Sw.bottomRows(n) = Complex(0, -1) * (s_th_w - F.asDiagonal() * s_tpc_w);

  Eigen::PartialPivLU<MatrixXcd> lu_omega(Omega);
  const LogDet det_omega = log_det_lu(lu_omega, 2 * n);
  const VectorXcd om_inv_s0 = lu_omega.solve(s0);
  const MatrixXcd om_inv_sw = lu_omega.solve(Sw);
  const Complex c_s = 0.25 * (s0.transpose() * om_inv_s0)(0);
  exp_form.c += c_s;
  exp_form.add_linear(0.5 * (Sw.transpose() * om_inv_s0), 1.0, &bucket_k);
  {
    const MatrixXcd M = 0.25 * (Sw.transpose() * om_inv_sw);
    exp_form.Q += 0.5 * (M + M.transpose());
  }

  // Phases: i phi(w),
  //   phi = phi[l] - phi[l(t)] + Im[k^T conj(l^e)] + beta_e.Im(k) + beta_e.Im(l^e)
  //         - beta_e.Im(l^e(t)) + Im[(beta_e + l^e(t))^T conj(k')]
  const VectorXcd beta_g_c = map.beta_g.cast<Complex>();
  const VectorXcd beta_e_c = map.beta_e.cast<Complex>();
  VectorXd phi_lin = 2.0 * (Lam.transpose() * beta_g_c).imag();
  phi_lin -= 2.0 * (Lam.transpose() * (beta_g_c.cwiseProduct(E))).imag();
  phi_lin += (CmatC.transpose() * kappa).imag();
  phi_lin += (Cmat.transpose() * beta_e_c).imag();
  phi_lin -= (Dmat.transpose() * beta_e_c).imag();
  phi_lin += (Dmat.transpose() * kappa_prime.conjugate()).imag();
  const double phi_const =
      map.beta_e.dot(kappa.imag()) + (beta_e_c.transpose() * kappa_prime.conjugate())(0).imag();
  exp_form.c += Complex(0.0, phi_const);
  exp_form.add_linear(Complex(0, 1) * phi_lin.cast<Complex>(), 1.0, &bucket_j);

  // Thermal quadratic and the reduced Gaussian integral.
  MatrixXcd X = -exp_form.Q;
  double sum_log_nbar = 0.0;
  for (int c = 0; c < nh; ++c) {
    const double inv = 1.0 / nbar[hot_idx[c]];
    X(c, c) += inv;
    X(nh + c, nh + c) += inv;
    sum_log_nbar += std::log(nbar[hot_idx[c]]);
  }

  LogDet det_x{Complex(0.0, 0.0), 1.0};
  Complex quad(0.0, 0.0);
  if (nh > 0) {
    Eigen::PartialPivLU<MatrixXcd> lu_x(X);
    det_x = log_det_lu(lu_x, 2 * nh);
    if (det_x.condition > 1e13)
      throw NumericalError("ill_conditioned",
                           "thermal quadratic form is numerically singular (condition ~ " +
                               std::to_string(det_x.condition) + ")");
    quad = 0.25 * (exp_form.b.transpose() * lu_x.solve(exp_form.b))(0);
  }
  if (det_omega.condition > 1e13)
    throw NumericalError("ill_conditioned", "Omega is numerically singular");

  const double prefactor_phase =
      -((map.e0_e - map.e0_g) + 0.5 * (we - wg).sum()) * t;
  const double log_z2 = 2.0 * std::log(map.Z);

  KernelCore core;
  OverlapSample& smp = core.sample;
  smp.log_det_omega = det_omega.log_value;
  smp.log_det_x = det_x.log_value;
  smp.cond_x = det_x.condition;
  smp.rest = Complex(0.0, prefactor_phase) + log_z2 + exp_form.c + quad - sum_log_nbar;

  if (want_parts) {
    KernelParts& p = core.parts;
    p.Omega = std::move(Omega);
    p.s = s0;
    p.G_zeta = g_zeta;
    p.G_zeta_prime = g_zeta_prime;
    p.phi_tilde = phi_const;
    p.C = g_zeta + g_zeta_prime + c_s;
    p.L = exp_form.b;
    p.L_I = bucket_i;
    p.L_J = bucket_j;
    p.L_K = bucket_k;
    p.X = std::move(X);
    p.T_diag.resize(nh);
    for (int c = 0; c < nh; ++c) p.T_diag[c] = 1.0 / nbar[hot_idx[c]];
    p.hot = hot;
    p.log_det_omega = det_omega.log_value;
    p.log_det_x = det_x.log_value;
    p.quad = quad;
    p.cond_omega = det_omega.condition;
    p.cond_x = det_x.condition;
    p.prefactor_phase = prefactor_phase;
    p.log_z2 = log_z2;
    p.sum_log_nbar = sum_log_nbar;
  }
  return core;
}

Complex combine(const OverlapSample& s, double branch_omega, double branch_x) {
  const Complex log_root_omega(0.5 * s.log_det_omega.real(), 0.5 * branch_omega);
  const Complex log_root_x(0.5 * s.log_det_x.real(), 0.5 * branch_x);
  return std::exp(s.rest - log_root_omega - log_root_x);
}

}  // namespace

KernelParts assemble_kernel(const BogoliubovMap& map, const VectorXcd& kappa,
                            const VectorXcd& kappa_prime, const ThermalSpec& thermal,
                            double t) {
  return assemble_core(map, kappa, kappa_prime, thermal, t, true).parts;
}

OverlapSample overlap_sample(const BogoliubovMap& map, const VectorXcd& kappa,
                             const VectorXcd& kappa_prime, const ThermalSpec& thermal,
                             double t) {
  return assemble_core(map, kappa, kappa_prime, thermal, t, false).sample;
}

Complex overlap_at(const BogoliubovMap& map, const VectorXcd& kappa,
                   const VectorXcd& kappa_prime, const ThermalSpec& thermal, double t) {
  const OverlapSample s = overlap_sample(map, kappa, kappa_prime, thermal, t);
  return combine(s, s.log_det_omega.imag(), s.log_det_x.imag());
}

Complex overlap_zero_t(const BogoliubovMap& map, const VectorXcd& kappa,
                       const VectorXcd& kappa_prime, double t) {
  return overlap_at(map, kappa, kappa_prime, ThermalSpec::zero(map.n_modes()), t);
}

std::vector<Complex> overlap_sequence(const BogoliubovMap& map, const VectorXcd& kappa,
                                      const VectorXcd& kappa_prime,
                                      const ThermalSpec& thermal,
                                      const VectorXd& t_grid,
                                      TraceDiagnostics* diagnostics, int n_threads) {
  const int nt = static_cast<int>(t_grid.size());
  std::vector<Complex> out(nt);
  if (nt == 0) return out;
  for (int i = 1; i < nt; ++i)
    if (t_grid[i] < t_grid[i - 1]) throw ConfigError("time grid must be sorted");

  // The t = 0 sample anchors the branch: det Omega(0) = det(1-A)det(1+A) > 0
  // and the thermal form is real positive there.
  const bool need_anchor = t_grid[0] > 0.0;
  std::vector<OverlapSample> samples(nt);
  const int workers = std::max(1, n_threads);
  if (workers == 1 || nt < 4) {
    for (int i = 0; i < nt; ++i)
      samples[i] = overlap_sample(map, kappa, kappa_prime, thermal, t_grid[i]);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          const int i = next.fetch_add(1);
          if (i >= nt) return;
          try {
            samples[i] = overlap_sample(map, kappa, kappa_prime, thermal, t_grid[i]);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
            return;
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  OverlapSample anchor = need_anchor
                             ? overlap_sample(map, kappa, kappa_prime, thermal, 0.0)
                             : samples[0];

  double chi_omega = anchor.log_det_omega.imag();
  double chi_x = anchor.log_det_x.imag();
  double prev_omega = chi_omega, prev_x = chi_x;
  double max_step_omega = 0.0, max_step_x = 0.0, max_cond = anchor.cond_x;

  auto unwrap = [](double accumulated, double principal) {
    const double delta = std::remainder(principal - std::remainder(accumulated, 2.0 * constants::pi),
                                        2.0 * constants::pi);
    return accumulated + delta;
  };

  for (int i = 0; i < nt; ++i) {
    const OverlapSample& s = samples[i];
    chi_omega = unwrap(prev_omega, s.log_det_omega.imag());
    chi_x = unwrap(prev_x, s.log_det_x.imag());
    const double step_omega = 0.5 * std::abs(chi_omega - prev_omega);
    const double step_x = 0.5 * std::abs(chi_x - prev_x);
    max_step_omega = std::max(max_step_omega, step_omega);
    max_step_x = std::max(max_step_x, step_x);
    max_cond = std::max(max_cond, s.cond_x);
    if (step_omega > 0.5 * constants::pi - 1e-9 || step_x > 0.5 * constants::pi - 1e-9)
      throw NumericalError("branch_tracking",
                           "determinant-root phase step exceeds pi/2 between adjacent "
                           "samples; the time grid is too coarse");
    prev_omega = chi_omega;
    prev_x = chi_x;
    out[i] = combine(s, chi_omega, chi_x);
  }

  if (diagnostics != nullptr) {
    diagnostics->max_branch_step_omega = max_step_omega;
    diagnostics->max_branch_step_x = max_step_x;
    diagnostics->max_cond_x = max_cond;
  }
  return out;
}

QuenchPipeline build_pipeline(const TrapScenario& scenario, bool allow_near_critical) {
  scenario.validate();
  QuenchPipeline p;
  p.scenario = scenario;
  p.units = UnitSystem::from_scenario(scenario);
  p.nu_c_hz = critical_frequency_hz(scenario);
  p.quench = to_dimensionless(scenario);
  p.struct_g = find_equilibrium(scenario, InternalState::Ground);
  p.basis_g = normal_modes(p.struct_g, scenario);
  p.struct_e = find_equilibrium(scenario, InternalState::Excited, &p.struct_g);
  p.basis_e = normal_modes(p.struct_e, scenario);
  enforce_validity_guard(p.basis_g, allow_near_critical);
  enforce_validity_guard(p.basis_e, allow_near_critical);
  p.map = build_map(p.basis_g, p.basis_e, p.struct_g, p.struct_e,
                    p.units.quantum_scale);
  return p;
}

VisibilityTrace visibility_trace(const QuenchPipeline& pipeline, const ThermalSpec& thermal,
                                 const RecoilSpec& recoil, const VectorXd& t_seconds,
                                 int n_threads) {
  VisibilityTrace trace;
  trace.t_seconds = t_seconds;
  trace.t_dimensionless =
      t_seconds * pipeline.units.angular_frequency_rad_s;

  const VectorXcd kappa =
      recoil_displacement(recoil, pipeline.basis_e, WhichPulse::First, pipeline.scenario);
  const VectorXcd kappa_prime =
      recoil_displacement(recoil, pipeline.basis_e, WhichPulse::Second, pipeline.scenario);

  trace.overlap = overlap_sequence(pipeline.map, kappa, kappa_prime, thermal,
                                   trace.t_dimensionless, &trace.diagnostics, n_threads);

  const int nt = static_cast<int>(t_seconds.size());
  trace.visibility.resize(nt);
  for (int i = 0; i < nt; ++i) {
    const double vis = std::abs(trace.overlap[i]);
    if (vis > 1.0 + 1e-9)
      throw NumericalError("overlap_bound",
                           "|O| = " + std::to_string(vis) + " exceeds 1 at sample " +
                               std::to_string(i));
    trace.visibility[i] = vis;
  }

  if (nt > 1) {
    const double max_omega =
        std::max(pipeline.basis_g.frequencies.maxCoeff(), pipeline.basis_e.frequencies.maxCoeff());
    double max_dt = 0.0;
    for (int i = 1; i < nt; ++i)
      max_dt = std::max(max_dt, trace.t_dimensionless[i] - trace.t_dimensionless[i - 1]);
    trace.diagnostics.grid_density_ok = max_dt * max_omega <= 0.05 + 1e-12;
  }

  // Fingerprint of all inputs.
  std::ostringstream os;
  os.precision(17);
  const TrapScenario& s = pipeline.scenario;
  os << s.n_ions << ',' << s.nu_x_hz << ',' << s.nu_y_hz << ',' << s.nu_dip_hz << ','
     << to_string(s.dipole_geometry) << ',' << s.species.label << ',' << s.species.mass_kg
     << ';';
  for (int j = 0; j < thermal.occupations.size(); ++j) os << thermal.occupations[j] << ',';
  os << ';' << to_string(recoil.geometry) << ',' << recoil.target_ion << ','
     << recoil.k_first.x() << ',' << recoil.k_first.y() << ',' << recoil.k_second.x() << ','
     << recoil.k_second.y() << ';';
  os << nt << ',' << (nt > 0 ? t_seconds[0] : 0.0) << ',' << (nt > 0 ? t_seconds[nt - 1] : 0.0);
  trace.fingerprint = Sha256::of(os.str());
  return trace;
}

}  // namespace iccsim
