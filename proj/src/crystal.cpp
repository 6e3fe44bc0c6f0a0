#include "iccsim/crystal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace iccsim {

std::string to_string(InternalState s) {
  return s == InternalState::Ground ? "g" : "e";
}

std::string to_string(StructureLabel l) {
  switch (l) {
    case StructureLabel::Linear: return "linear";
    case StructureLabel::ZigzagUp: return "zigzag-up";
    default: return "zigzag-down";
  }
}

namespace {

// Core dimensionless potential: trap + central-ion dipole + Coulomb.
PotentialEval eval_potential(const Eigen::VectorXd& pos, double a2, double b2,
                             bool isotropic, int central, bool excited) {
  const int n = static_cast<int>(pos.size()) / 2;
  PotentialEval out;
  out.gradient = Eigen::VectorXd::Zero(2 * n);
  out.hessian = Eigen::MatrixXd::Zero(2 * n, 2 * n);

  for (int j = 0; j < n; ++j) {
    const double x = pos[j], y = pos[n + j];
    out.energy += 0.5 * (x * x + a2 * y * y);
    out.gradient[j] += x;
    out.gradient[n + j] += a2 * y;
    out.hessian(j, j) += 1.0;
    out.hessian(n + j, n + j) += a2;
  }
  if (excited && b2 > 0.0) {
    const double yc = pos[n + central];
    out.energy += 0.5 * b2 * yc * yc;
    out.gradient[n + central] += b2 * yc;
    out.hessian(n + central, n + central) += b2;
    if (isotropic) {
      const double xc = pos[central];
      out.energy += 0.5 * b2 * xc * xc;
      out.gradient[central] += b2 * xc;
      out.hessian(central, central) += b2;
    }
  }

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dx = pos[i] - pos[j];
      const double dy = pos[n + i] - pos[n + j];
      const double r2 = dx * dx + dy * dy;
      const double r = std::sqrt(r2);
      if (r < 1e-9)
        throw NumericalError("coincident_ions",
                             "ions closer than 1e-9 in dimensionless units");
      const double inv_r = 1.0 / r;
      const double inv_r3 = inv_r * inv_r * inv_r;
      const double inv_r5 = inv_r3 * inv_r * inv_r;
      out.energy += inv_r;
      out.gradient[i] -= dx * inv_r3;
      out.gradient[j] += dx * inv_r3;
      out.gradient[n + i] -= dy * inv_r3;
      out.gradient[n + j] += dy * inv_r3;
      // d^2(1/r)/dd_a dd_b = (3 d_a d_b - r^2 delta_ab) / r^5
      const double bxx = (3.0 * dx * dx - r2) * inv_r5;
      const double byy = (3.0 * dy * dy - r2) * inv_r5;
      const double bxy = 3.0 * dx * dy * inv_r5;
      const int xi = i, yi = n + i, xj = j, yj = n + j;
      out.hessian(xi, xi) += bxx;  out.hessian(yi, yi) += byy;
      out.hessian(xi, yi) += bxy;  out.hessian(yi, xi) += bxy;
      out.hessian(xj, xj) += bxx;  out.hessian(yj, yj) += byy;
      out.hessian(xj, yj) += bxy;  out.hessian(yj, xj) += bxy;
      out.hessian(xi, xj) -= bxx;  out.hessian(xj, xi) -= bxx;
      out.hessian(yi, yj) -= byy;  out.hessian(yj, yi) -= byy;
      out.hessian(xi, yj) -= bxy;  out.hessian(yj, xi) -= bxy;
      out.hessian(yi, xj) -= bxy;  out.hessian(xj, yi) -= bxy;
    }
  }
  return out;
}

struct PotentialParams {
  double a2 = 0.0, b2 = 0.0;
  bool isotropic = false;
  int central = 0;
  bool excited = false;
};

PotentialParams potential_params(const TrapScenario& scenario, InternalState state) {
  PotentialParams p;
  p.a2 = scenario.a_ratio() * scenario.a_ratio();
  p.b2 = scenario.b_ratio() * scenario.b_ratio();
  p.isotropic = scenario.dipole_geometry == DipoleGeometry::IsotropicPlanar;
  p.central = scenario.central_ion();
  p.excited = state == InternalState::Excited;
  return p;
}

// Axial-only equilibrium of the linear chain (y = 0), Newton in x.
Eigen::VectorXd axial_equilibrium(int n, const PotentialParams& p) {
  Eigen::VectorXd x(n);
  const double d0 = 2.0;
  for (int j = 0; j < n; ++j) x[j] = (j - 0.5 * (n - 1)) * d0;

  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(2 * n);
    full.head(n) = x;
    PotentialEval ev = eval_potential(full, p.a2, p.b2, p.isotropic, p.central, p.excited);
    Eigen::VectorXd g = ev.gradient.head(n);
    if (g.norm() < 1e-12) return x;
    Eigen::MatrixXd h = ev.hessian.topLeftCorner(n, n);
    Eigen::VectorXd step = h.ldlt().solve(-g);
    double s = 1.0;
    for (int ls = 0; ls < 60; ++ls) {
      Eigen::VectorXd trial = Eigen::VectorXd::Zero(2 * n);
      trial.head(n) = x + s * step;
      bool ok = true;
      double e_trial = 0.0;
      try {
        e_trial = eval_potential(trial, p.a2, p.b2, p.isotropic, p.central, p.excited).energy;
      } catch (const NumericalError&) {
        ok = false;
      }
      if (ok && e_trial < ev.energy + 1e-4 * s * g.dot(step)) {
        x += s * step;
        break;
      }
      s *= 0.5;
    }
  }
  return x;
}

// Saddle-free Newton direction: eigenvalues are replaced by max(|l|, floor).
Eigen::VectorXd newton_direction(const Eigen::MatrixXd& hessian,
                                 const Eigen::VectorXd& gradient) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hessian);
  const Eigen::VectorXd& evals = es.eigenvalues();
  Eigen::VectorXd inv(evals.size());
  for (int i = 0; i < evals.size(); ++i)
    inv[i] = 1.0 / std::max(std::abs(evals[i]), 1e-8);
  return -(es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose() * gradient);
}

// Orient an unstable transverse direction so the central ion moves to
// positive y (largest transverse component decides if the central one is 0).
Eigen::VectorXd orient_kick(Eigen::VectorXd dir, int n, int central) {
  double ref = dir[n + central];
  if (std::abs(ref) < 1e-12) {
    int best = 0;
    for (int j = 0; j < n; ++j)
      if (std::abs(dir[n + j]) > std::abs(dir[n + best])) best = j;
    ref = dir[n + best];
  }
  if (ref < 0) dir = -dir;
  return dir;
}

}  // namespace

PotentialEval total_potential(const Eigen::VectorXd& positions,
                              const TrapScenario& scenario,
                              InternalState internal_state) {
  const auto p = potential_params(scenario, internal_state);
  const int n = static_cast<int>(positions.size()) / 2;
  if (2 * n != positions.size())
    throw ConfigError("positions must have even size (x block then y block)");
  PotentialParams q = p;
  q.central = std::min(q.central, n - 1);
  return eval_potential(positions, q.a2, q.b2, q.isotropic, q.central, q.excited);
}

double linear_chain_soft_eigenvalue(int n_ions, double a_ratio) {
  PotentialParams p;
  p.a2 = a_ratio * a_ratio;
  const Eigen::VectorXd x = axial_equilibrium(n_ions, p);
  Eigen::VectorXd pos = Eigen::VectorXd::Zero(2 * n_ions);
  pos.head(n_ions) = x;
  PotentialEval ev = eval_potential(pos, p.a2, 0.0, false, 0, false);
  const Eigen::MatrixXd hyy = ev.hessian.bottomRightCorner(n_ions, n_ions);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hyy);
  return es.eigenvalues()[0];
}

CrystalStructure find_equilibrium(const TrapScenario& scenario,
                                  InternalState internal_state,
                                  const CrystalStructure* seed,
                                  NewtonDiagnostics* diagnostics) {
  const int n = scenario.n_ions;
  const auto p = potential_params(scenario, internal_state);

  Eigen::VectorXd pos;
  if (seed != nullptr) {
    pos = seed->positions;
  } else {
    pos = Eigen::VectorXd::Zero(2 * n);
    pos.head(n) = axial_equilibrium(n, p);
  }

  // If the start is (numerically) stationary but unstable, kick 1e-3 along
  // the unstable direction; otherwise Newton would sit on the saddle.
  {
    PotentialEval ev = eval_potential(pos, p.a2, p.b2, p.isotropic, p.central, p.excited);
    if (ev.gradient.norm() < 1e-6) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ev.hessian);
      if (es.eigenvalues()[0] < 0.0) {
        Eigen::VectorXd kick = orient_kick(es.eigenvectors().col(0), n, p.central);
        pos += 1e-3 * kick;
      }
    }
  }

  PotentialEval ev = eval_potential(pos, p.a2, p.b2, p.isotropic, p.central, p.excited);
  if (diagnostics != nullptr) diagnostics->energy_history.push_back(ev.energy);
  int it = 0;
  for (; it < 200; ++it) {
    if (ev.gradient.norm() < 1e-10) break;
    const Eigen::VectorXd dir = newton_direction(ev.hessian, ev.gradient);
    const double slope = ev.gradient.dot(dir);
    double s = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      Eigen::VectorXd trial = pos + s * dir;
      PotentialEval trial_ev;
      try {
        trial_ev = eval_potential(trial, p.a2, p.b2, p.isotropic, p.central, p.excited);
      } catch (const NumericalError&) {
        s *= 0.5;
        continue;
      }
      if (trial_ev.energy <= ev.energy + 1e-4 * s * slope) {
        pos = trial;
        ev = trial_ev;
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted)
      throw NumericalError("non_convergence", "line search failed to reduce the energy");
    if (diagnostics != nullptr) diagnostics->energy_history.push_back(ev.energy);
  }
  if (ev.gradient.norm() >= 1e-10)
    throw NumericalError("non_convergence",
                         "Newton did not reach gradient tolerance in 200 iterations");
  if (diagnostics != nullptr) {
    diagnostics->iterations = it;
    diagnostics->final_gradient_norm = ev.gradient.norm();
  }

  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ev.hessian);
    const double scale = std::max(1.0, std::abs(es.eigenvalues().cwiseAbs().maxCoeff()));
    if (es.eigenvalues()[0] < -1e-9 * scale)
      throw NumericalError("saddle", "converged to a stationary point that is not a minimum");
  }

  // Sort ions by axial coordinate.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return pos[i] < pos[j]; });
  Eigen::VectorXd sorted(2 * n);
  for (int j = 0; j < n; ++j) {
    sorted[j] = pos[order[j]];
    sorted[n + j] = pos[n + order[j]];
  }
  pos = sorted;

  CrystalStructure out;
  out.internal_state = internal_state;
  const double max_y = pos.tail(n).cwiseAbs().maxCoeff();
  if (max_y < 1e-7) {
    pos.tail(n).setZero();  // exact symmetric minimum
    out.structure_label = StructureLabel::Linear;
  } else {
    if (seed != nullptr && seed->positions.tail(n).cwiseAbs().maxCoeff() > 1e-7) {
      // Match the seed's branch.
      if (seed->positions.tail(n).dot(pos.tail(n)) < 0.0) pos.tail(n) *= -1.0;
    } else if (pos[n + p.central] < 0.0) {
      pos.tail(n) *= -1.0;  // convention: central ion displaced to +y
    }
    out.structure_label = pos[n + p.central] >= 0.0 ? StructureLabel::ZigzagUp
                                                    : StructureLabel::ZigzagDown;
  }
  out.positions = pos;
  out.classical_energy =
      eval_potential(pos, p.a2, p.b2, p.isotropic, p.central, p.excited).energy;
  return out;
}

ModeBasis normal_modes(const CrystalStructure& structure, const TrapScenario& scenario) {
  PotentialEval ev = total_potential(structure.positions, scenario, structure.internal_state);
  Eigen::MatrixXd h = 0.5 * (ev.hessian + ev.hessian.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const Eigen::VectorXd& evals = es.eigenvalues();
  const double scale = std::max(1.0, evals.cwiseAbs().maxCoeff());
  if (evals[0] < -1e-9 * scale)
    throw NumericalError("saddle", "structure is not a minimum (negative Hessian eigenvalue)");

  ModeBasis basis;
  basis.internal_state = structure.internal_state;
  basis.frequencies = evals.cwiseMax(0.0).cwiseSqrt();
  basis.mode_matrix = es.eigenvectors();

  // Deterministic sign: largest-magnitude component positive, ties broken
  // by the lowest index.
  for (int k = 0; k < basis.mode_matrix.cols(); ++k) {
    auto col = basis.mode_matrix.col(k);
    int best = 0;
    for (int r = 1; r < col.size(); ++r)
      if (std::abs(col[r]) > std::abs(col[best]) + 1e-15) best = r;
    if (col[best] < 0.0) basis.mode_matrix.col(k) *= -1.0;
  }

  const SoftModeResult soft = soft_mode_index(basis);
  basis.soft_mode_index = soft.index;
  basis.soft_mode_confident = soft.confident;
  return basis;
}

SoftModeResult soft_mode_index(const ModeBasis& basis) {
  const int n2 = basis.n_modes();
  const int n = n2 / 2;
  Eigen::VectorXd pattern(n);
  for (int j = 0; j < n; ++j) pattern[j] = (j % 2 == 0) ? 1.0 : -1.0;
  const double pattern_norm = pattern.norm();
  for (int k = 0; k < n2; ++k) {
    const Eigen::VectorXd y = basis.mode_matrix.col(k).tail(n);
    const double ynorm = y.norm();
    if (ynorm < 1e-12) continue;
    const double corr = std::abs(y.dot(pattern)) / (ynorm * pattern_norm);
    if (corr > 0.9) return {k, true};
  }
  return {0, false};
}

void enforce_validity_guard(const ModeBasis& basis, bool allow_near_critical) {
  if (allow_near_critical) return;
  const double min_freq = basis.frequencies.minCoeff();
  if (min_freq < kMinModeFrequency)
    throw NumericalError(
        "near_critical",
        "minimum mode frequency " + std::to_string(min_freq) +
            " is below 0.05 nu_x; anharmonic corrections dominate this close to "
            "the instability (--allow-near-critical overrides)");
}

}  // namespace iccsim
