#ifndef QWELL_QUANTUM_STATE_HPP
#define QWELL_QUANTUM_STATE_HPP

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "qwell/eigensolver.hpp"
#include "qwell/errors.hpp"
#include "qwell/piecewise_exp.hpp"
#include "qwell/potentials.hpp"

namespace qwell {

enum class SystemKind { dswp, iswp };
enum class PairChoice { ground, excited };
enum class Side { left, right };
enum class Space { position, momentum };

/// A two-level superposition psi(x,t) = (u_a + sign * u_b e^{-i dE t/hbar}) / sqrt(2),
/// the global phase e^{-i E_a t/hbar} dropped (it cancels in every density).
struct SuperpositionState {
  SystemKind system = SystemKind::dswp;
  PiecewiseExp state_a;  // lower state, normalized
  PiecewiseExp state_b;  // upper state, normalized
  double energy_a_ev = 0.0;
  double energy_b_ev = 0.0;
  double delta_e_ev = 0.0;  // E_b - E_a > 0
  int sign = +1;
  PhysicalConstants constants;

  // geometry hints for grids and quadrature
  double x_lo = 0.0;
  double x_hi = 0.0;
  double gamma_min = 0.0;      // slowest tail decay rate; 0 = compact support
  double k_scale = 0.0;        // dominant wavenumber magnitude
  double support_width = 0.0;  // extent of the wavefunction in x

  double delta_e_si() const { return delta_e_ev * kElectronVoltJ; }
  double omega() const { return delta_e_si() / constants.hbar; }
  double period() const { return 2.0 * M_PI * constants.hbar / delta_e_si(); }
};

/// Left/right superposition of a tunneling pair of the double well.
/// The left state is (u_S + u_A)/sqrt(2); right flips the sign.
inline SuperpositionState make_superposition(const DswpParams& p,
                                             const PhysicalConstants& c,
                                             PairChoice pair, Side side) {
  auto spectrum = solve_spectrum(p, c);
  std::size_t base = (pair == PairChoice::ground) ? 0 : 2;
  if (spectrum.size() < base + 2)
    throw UnknownPair("make_superposition: requested pair not present in spectrum");
  const EigenState& sa = spectrum[base];
  const EigenState& sb = spectrum[base + 1];
  if (sa.parity != Parity::even || sb.parity != Parity::odd)
    throw UnknownPair("make_superposition: pair does not have (even, odd) parities");

  SuperpositionState s;
  s.system = SystemKind::dswp;
  s.state_a = build_wavefunction(sa);
  s.state_b = build_wavefunction(sb);
  s.energy_a_ev = sa.energy_ev;
  s.energy_b_ev = sb.energy_ev;
  s.delta_e_ev = sb.energy_ev - sa.energy_ev;
  s.sign = (side == Side::left) ? +1 : -1;
  s.constants = c;

  Wavenumbers wa = wavenumbers(p, c, sa.energy_ev * kElectronVoltJ);
  Wavenumbers wb = wavenumbers(p, c, sb.energy_ev * kElectronVoltJ);
  s.gamma_min = std::min(wa.gamma, wb.gamma);
  double x_cut = p.l0() + 10.0 / s.gamma_min;
  s.x_lo = -x_cut;
  s.x_hi = x_cut;
  s.k_scale = std::max({wa.gamma, wb.gamma, wa.k0, wb.k0, wa.abs_k1(), wb.abs_k1()});
  s.support_width = 2.0 * x_cut;
  return s;
}

/// ISWP superposition of psi_1 and psi_2. The state evolving from the left
/// side carries the minus sign, psi = (psi_1 - psi_2 e^{-i dE t/hbar})/sqrt(2).
inline SuperpositionState make_superposition(const IswpParams& p,
                                             const PhysicalConstants& c, Side side) {
  IswpState s1 = iswp_state(p, c, 1);
  IswpState s2 = iswp_state(p, c, 2);

  SuperpositionState s;
  s.system = SystemKind::iswp;
  s.state_a = s1.wavefunction;
  s.state_b = s2.wavefunction;
  s.energy_a_ev = s1.energy_ev;
  s.energy_b_ev = s2.energy_ev;
  s.delta_e_ev = s2.energy_ev - s1.energy_ev;
  s.sign = (side == Side::left) ? -1 : +1;
  s.constants = c;

  s.gamma_min = 0.0;
  s.x_lo = 0.0;
  s.x_hi = p.width();
  s.k_scale = 2.0 * M_PI / p.width();
  s.support_width = p.width();
  return s;
}

inline cdouble evolution_phase(const SuperpositionState& s, double t) {
  double a = s.omega() * t;
  return {std::cos(a), -std::sin(a)};
}

inline cdouble psi(const SuperpositionState& s, double x, double t) {
  cdouble ph = evolution_phase(s, t);
  return (s.state_a.value(x) + static_cast<double>(s.sign) * ph * s.state_b.value(x)) / std::sqrt(2.0);
}

inline cdouble psi_derivative(const SuperpositionState& s, double x, double t) {
  cdouble ph = evolution_phase(s, t);
  return (s.state_a.derivative(x) + static_cast<double>(s.sign) * ph * s.state_b.derivative(x)) /
         std::sqrt(2.0);
}

/// psi and d(psi)/dx in one pass
inline std::pair<cdouble, cdouble> psi_pair(const SuperpositionState& s, double x, double t) {
  cdouble ph = static_cast<double>(s.sign) * evolution_phase(s, t);
  auto [va, da] = s.state_a.value_and_derivative(x);
  auto [vb, db] = s.state_b.value_and_derivative(x);
  const double r = 1.0 / std::sqrt(2.0);
  return {(va + ph * vb) * r, (da + ph * db) * r};
}

/// Momentum wavefunction: the same superposition of the per-state
/// closed-form transforms.
inline cdouble phi(const SuperpositionState& s, double k, double t) {
  cdouble ph = evolution_phase(s, t);
  return (s.state_a.fourier(k) + static_cast<double>(s.sign) * ph * s.state_b.fourier(k)) /
         std::sqrt(2.0);
}

inline cdouble phi_derivative(const SuperpositionState& s, double k, double t) {
  cdouble ph = evolution_phase(s, t);
  return (s.state_a.fourier_derivative(k) +
          static_cast<double>(s.sign) * ph * s.state_b.fourier_derivative(k)) /
         std::sqrt(2.0);
}

/// phi and d(phi)/dk in one pass
inline std::pair<cdouble, cdouble> phi_pair(const SuperpositionState& s, double k, double t) {
  cdouble ph = static_cast<double>(s.sign) * evolution_phase(s, t);
  auto [fa, dfa] = s.state_a.fourier_pair(k);
  auto [fb, dfb] = s.state_b.fourier_pair(k);
  const double r = 1.0 / std::sqrt(2.0);
  return {(fa + ph * fb) * r, (dfa + ph * dfb) * r};
}

inline double density_position_at(const SuperpositionState& s, double x, double t) {
  return std::norm(psi(s, x, t));
}

inline double density_momentum_at(const SuperpositionState& s, double k, double t) {
  return std::norm(phi(s, k, t));
}

/// Tabulated density with grid metadata. Scaled display values follow the
/// figure conventions rho * 1e-10 and n * 1e11.
struct DensitySample {
  Space space = Space::position;
  double time_s = 0.0;
  std::vector<double> grid;
  std::vector<double> values;
  double display_scale = 1.0;
};

inline constexpr double kPositionDisplayScale = 1e-10;
inline constexpr double kMomentumDisplayScale = 1e11;

inline std::vector<double> uniform_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

inline std::vector<double> default_position_grid(const SuperpositionState& s, int n = 4001) {
  return uniform_grid(s.x_lo, s.x_hi, n);
}

/// Momentum cut: pointwise decay rule (time-independent envelope
/// |u_a~|^2 + |u_b~|^2 below 1e-14 of its peak) capped by the bandwidth
/// limit of an n-point trapezoid grid, spacing <= 2 pi / (safety * width).
inline double momentum_cut(const SuperpositionState& s, int n = 4001) {
  auto envelope = [&](double k) {
    return std::norm(s.state_a.fourier(k)) + std::norm(s.state_b.fourier(k));
  };
  double peak = 0.0;
  for (int i = 0; i <= 512; ++i) peak = std::max(peak, envelope(i * s.k_scale / 64.0));
  double step = s.k_scale / 4.0;
  double k = s.k_scale;
  int below = 0;
  while (below < 8 && k < 1e5 * s.k_scale) {
    k += step;
    below = (envelope(k) < 1e-14 * peak) ? below + 1 : 0;
  }
  const double safety = 2.0;
  double nyquist = (n - 1) * M_PI / (safety * s.support_width);
  return std::min(k, nyquist);
}

inline std::vector<double> default_momentum_grid(const SuperpositionState& s, int n = 4001) {
  double cut = momentum_cut(s, n);
  return uniform_grid(-cut, cut, n);
}

inline DensitySample density_position(const SuperpositionState& s, double t,
                                      std::span<const double> grid) {
  DensitySample d;
  d.space = Space::position;
  d.time_s = t;
  d.display_scale = kPositionDisplayScale;
  d.grid.assign(grid.begin(), grid.end());
  d.values.resize(d.grid.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < d.grid.size(); ++i) {
    d.values[i] = density_position_at(s, d.grid[i], t);
    peak = std::max(peak, d.values[i]);
  }
  if (d.values.front() > 1e-6 * peak || d.values.back() > 1e-6 * peak)
    throw GridTooNarrow("density_position: boundary density above threshold");
  return d;
}

inline DensitySample density_momentum(const SuperpositionState& s, double t,
                                      std::span<const double> grid) {
  DensitySample d;
  d.space = Space::momentum;
  d.time_s = t;
  d.display_scale = kMomentumDisplayScale;
  d.grid.assign(grid.begin(), grid.end());
  d.values.resize(d.grid.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < d.grid.size(); ++i) {
    d.values[i] = density_momentum_at(s, d.grid[i], t);
    peak = std::max(peak, d.values[i]);
  }
  if (d.values.front() > 1e-6 * peak || d.values.back() > 1e-6 * peak)
    throw GridTooNarrow("density_momentum: boundary density above threshold");
  return d;
}

/// Oscillation frequency between the wells, nu = dE / (2 pi hbar), in GHz.
inline double bohr_frequency_ghz(const SuperpositionState& s) {
  return s.delta_e_si() / (2.0 * M_PI * s.constants.hbar) / kGigahertzHz;
}

}  // namespace qwell

#endif  // QWELL_QUANTUM_STATE_HPP
