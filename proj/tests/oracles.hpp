// Test-side oracles, deliberately independent of the implementation paths
// they cross-check.
#ifndef QWELL_TESTS_ORACLES_HPP
#define QWELL_TESTS_ORACLES_HPP

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "qwell/potentials.hpp"

namespace oracle {

/// Plain bisection to a fixed iteration count; needs f(a) and f(b) of
/// opposite sign.
inline double bisection_root(const std::function<double(double)>& f, double a, double b,
                             int iters = 200) {
  double fa = f(a);
  for (int i = 0; i < iters; ++i) {
    double m = 0.5 * (a + b);
    double fm = f(m);
    if ((fa < 0) != (fm < 0)) {
      b = m;
    } else {
      a = m;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

/// Number of eigenvalues of the symmetric tridiagonal matrix
/// (diag d, off-diagonal e) strictly below lambda, by Sturm sequence count.
inline int sturm_count(const std::vector<double>& d, double e, double lambda) {
  int count = 0;
  double q = d[0] - lambda;
  if (q < 0) ++count;
  for (std::size_t i = 1; i < d.size(); ++i) {
    double denom = (q == 0.0) ? 1e-300 : q;
    q = d[i] - lambda - e * e / denom;
    if (q < 0) ++count;
  }
  return count;
}

/// Eigenvalues (in eV) of the double-well Hamiltonian inside the window
/// (-V0, -V1), from a dense second-order finite-difference discretization
/// diagonalized by Sturm bisection. Nodes land exactly on the potential
/// jumps; those nodes take the average of the two plateau values.
/// `subdiv` = grid points per inner half-width L1 (grid step h = L1/subdiv).
inline std::vector<double> fd_spectrum(const qwell::DswpParams& p,
                                       const qwell::PhysicalConstants& c, int subdiv,
                                       double tail_lengths = 14.0) {
  double v0 = p.v0(), v1 = p.v1(), l0 = p.l0(), l1 = p.l1();
  double m = c.particle_mass();
  double h = l1 / subdiv;
  double gamma_min = std::sqrt(2.0 * m * v1) / c.hbar;  // slowest decay in window
  long nx = static_cast<long>(std::ceil((l0 + tail_lengths / gamma_min) / h));
  long n = 2 * nx - 1;  // interior nodes, Dirichlet walls at +-nx*h
  std::vector<double> diag(n);
  double t = c.hbar * c.hbar / (2.0 * m * h * h);
  for (long i = 0; i < n; ++i) {
    double x = (i - (nx - 1)) * h;
    double ax = std::fabs(x);
    double V;
    if (ax < l1 - 0.5 * h) V = -v1;
    else if (std::fabs(ax - l1) <= 0.5 * h) V = 0.5 * (-v1 - v0);
    else if (ax < l0 - 0.5 * h) V = -v0;
    else if (std::fabs(ax - l0) <= 0.5 * h) V = 0.5 * (-v0);
    else V = 0.0;
    diag[i] = 2.0 * t + V;
  }
  double off = -t;

  std::vector<double> eigs;
  int below_window = sturm_count(diag, off, -v0);
  int upto = sturm_count(diag, off, -v1);
  for (int idx = below_window; idx < upto; ++idx) {
    double lo = -v0, hi = -v1;
    for (int it = 0; it < 100; ++it) {
      double mid = 0.5 * (lo + hi);
      if (sturm_count(diag, off, mid) > idx) hi = mid;
      else lo = mid;
    }
    eigs.push_back(0.5 * (lo + hi) / qwell::kElectronVoltJ);
  }
  return eigs;
}

/// Quartic least squares via explicit normal equations solved by Cholesky in
/// long double; an independent route to the Householder QR in the library.
inline std::array<double, 5> normal_eq_quartic(const std::vector<double>& xs,
                                               const std::vector<double>& ys) {
  constexpr int k = 5;
  long double ata[k][k] = {};
  long double atb[k] = {};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    long double pow_cache[2 * k - 1];
    pow_cache[0] = 1.0L;
    for (int j = 1; j < 2 * k - 1; ++j) pow_cache[j] = pow_cache[j - 1] * xs[i];
    for (int r = 0; r < k; ++r) {
      for (int col = 0; col < k; ++col) ata[r][col] += pow_cache[r + col];
      atb[r] += pow_cache[r] * ys[i];
    }
  }
  // Cholesky ata = L L^T
  long double L[k][k] = {};
  for (int i = 0; i < k; ++i)
    for (int j = 0; j <= i; ++j) {
      long double s = ata[i][j];
      for (int t = 0; t < j; ++t) s -= L[i][t] * L[j][t];
      if (i == j) L[i][i] = std::sqrt(s);
      else L[i][j] = s / L[j][j];
    }
  long double y[k];
  for (int i = 0; i < k; ++i) {
    long double s = atb[i];
    for (int t = 0; t < i; ++t) s -= L[i][t] * y[t];
    y[i] = s / L[i][i];
  }
  std::array<double, 5> beta{};
  for (int i = k - 1; i >= 0; --i) {
    long double s = y[i];
    for (int t = i + 1; t < k; ++t) s -= L[t][i] * beta[t];
    beta[i] = static_cast<double>(s / L[i][i]);
  }
  return beta;
}

/// Uniform density on [0,1] smoothed by a Gaussian of variance t:
/// closed form via the normal CDF.
inline double smoothed_uniform(double x, double t) {
  double s = std::sqrt(t);
  auto Phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
  return Phi(x / s) - Phi((x - 1.0) / s);
}

}  // namespace oracle

#endif  // QWELL_TESTS_ORACLES_HPP
