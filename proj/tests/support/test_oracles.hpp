#pragma once

// Test-side reference computations, kept independent of the library code
// paths they certify.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

namespace testsupport {

using Complex = std::complex<double>;

// --- independent linear-chain machinery (axial Newton + transverse coupling)

// Axial equilibrium of n ions in a unit harmonic trap with unit Coulomb
// coupling: minimizes 1/2 sum x^2 + sum_{i<j} 1/|xi-xj|.
inline Eigen::VectorXd reference_axial_positions(int n) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = 1.5 * (i - 0.5 * (n - 1));
  for (int iter = 0; iter < 400; ++iter) {
    Eigen::VectorXd grad = x;
    Eigen::MatrixXd hess = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const double d = x[i] - x[j];
        grad[i] -= (d > 0 ? 1.0 : -1.0) / (d * d);
        hess(i, i) += 2.0 / std::abs(d * d * d);
        hess(i, j) -= 2.0 / std::abs(d * d * d);
      }
    }
    const Eigen::VectorXd step = hess.ldlt().solve(-grad);
    x += step;
    if (step.norm() < 1e-14) break;
  }
  return x;
}

// Transverse coupling matrix C of the linear chain: the yy Hessian is
// a^2 I - C, so the instability sits at a^2 = max eigenvalue of C.
inline Eigen::MatrixXd reference_transverse_coupling(const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double inv_d3 = 1.0 / std::pow(std::abs(x[i] - x[j]), 3);
      c(i, i) += inv_d3;
      c(i, j) -= inv_d3;
    }
  }
  return c;
}

// nu_c / nu_x from the largest eigenvalue of C.
inline double reference_critical_ratio(int n_ions) {
  const Eigen::VectorXd x = reference_axial_positions(n_ions);
  const Eigen::MatrixXd c = reference_transverse_coupling(x);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  return std::sqrt(es.eigenvalues()[n_ions - 1]);
}

// --- finite differences

inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2 * h);
  }
  return g;
}

inline Eigen::MatrixXd fd_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                                  const Eigen::VectorXd& x, double h = 1e-4) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd hess(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd xpp = x, xpm = x, xmp = x, xmm = x;
      xpp[i] += h; xpp[j] += h;
      xpm[i] += h; xpm[j] -= h;
      xmp[i] -= h; xmp[j] += h;
      xmm[i] -= h; xmm[j] -= h;
      hess(i, j) = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4 * h * h);
    }
  }
  return hess;
}

// --- N=3 zigzag by symmetry-reduced grid scan
//
// Ansatz: x = (-s, 0, s), y = (-w, 2w, -w); nested grid refinement of the
// dimensionless energy.
struct ZigzagScan {
  double s = 0.0, w = 0.0, energy = 0.0;
};

inline ZigzagScan reference_zigzag_scan(double a2) {
  auto energy = [&](double s, double w) {
    const Eigen::Vector2d p0(-s, -w), p1(0.0, 2 * w), p2(s, -w);
    const double coul =
        1.0 / (p0 - p1).norm() + 1.0 / (p1 - p2).norm() + 1.0 / (p0 - p2).norm();
    const double trap = 0.5 * (2 * s * s) + 0.5 * a2 * (2 * w * w + 4 * w * w);
    return trap + coul;
  };
  double s_lo = 0.6, s_hi = 1.6, w_lo = 0.0, w_hi = 0.8;
  ZigzagScan best;
  best.energy = 1e300;
  for (int level = 0; level < 14; ++level) {
    const int grid = 24;
    ZigzagScan local = best;
    for (int i = 0; i <= grid; ++i) {
      for (int j = 0; j <= grid; ++j) {
        const double s = s_lo + (s_hi - s_lo) * i / grid;
        const double w = w_lo + (w_hi - w_lo) * j / grid;
        const double e = energy(s, w);
        if (e < local.energy) local = {s, w, e};
      }
    }
    best = local;
    const double ds = (s_hi - s_lo) / grid, dw = (w_hi - w_lo) / grid;
    s_lo = best.s - 2 * ds; s_hi = best.s + 2 * ds;
    w_lo = std::max(0.0, best.w - 2 * dw); w_hi = best.w + 2 * dw;
  }
  return best;
}

// --- random synthetic-map ingredients (deterministic LCG)

struct Lcg {
  uint64_t state;
  explicit Lcg(uint64_t seed) : state(seed) {}
  double uniform() {  // in [0, 1)
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return double(state >> 11) * (1.0 / 9007199254740992.0);
  }
  double range(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

inline Eigen::MatrixXd random_orthogonal(int n, Lcg& rng) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.range(-1.0, 1.0);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ();
  // fix determinant sign for reproducibility
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

}  // namespace testsupport
