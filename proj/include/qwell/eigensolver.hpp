#ifndef QWELL_EIGENSOLVER_HPP
#define QWELL_EIGENSOLVER_HPP

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "qwell/errors.hpp"
#include "qwell/numerics.hpp"
#include "qwell/piecewise_exp.hpp"
#include "qwell/potentials.hpp"

namespace qwell {

enum class Parity { even, odd };

/// Region wavenumbers for a candidate energy E (SI joules).
/// For bound tunneling states -V0 < E < -V1: gamma, k0 > 0 and
/// k1_sq_signed < 0 (decaying barrier interior).
struct Wavenumbers {
  double gamma;         // outer decay, sqrt(-2mE)/hbar
  double k0;            // well oscillation, sqrt(2m(E+V0))/hbar
  double k1_sq_signed;  // 2m(E+V1)/hbar^2, sign kept

  double abs_k1() const { return std::sqrt(-k1_sq_signed); }
};

inline Wavenumbers wavenumbers(const DswpParams& p, const PhysicalConstants& c,
                               double energy_si) {
  double m = c.particle_mass();
  double h2 = c.hbar * c.hbar;
  return Wavenumbers{std::sqrt(-2.0 * m * energy_si) / c.hbar,
                     std::sqrt(2.0 * m * (energy_si + p.v0())) / c.hbar,
                     2.0 * m * (energy_si + p.v1()) / h2};
}

/// Relative mismatch of the logarithmic derivative at the two matching points.
struct MatchResidual {
  double at_l1 = 0.0;
  double at_l0 = 0.0;
};

/// One bound state of the double square well. Coefficients follow the
/// A1 = 1 convention; `norm` is the squared L2 norm of that raw function,
/// so the normalized wavefunction is raw / sqrt(norm).
struct EigenState {
  double energy_ev = 0.0;
  Parity parity = Parity::even;
  double phase = 0.0;  // phi in [0, pi)
  double a1 = 1.0;
  double a2 = 0.0;
  double a3_or_b3 = 0.0;  // A3 (even, cosh) or B3 (odd, sinh)
  double norm = 1.0;
  int node_count = 0;
  MatchResidual residual;
  DswpParams params;
  PhysicalConstants constants;
};

namespace eigdetail {

// phi solving the outer boundary condition k0 tan(phi + k0 l0) = gamma,
// branch reduced to [0, pi)
inline double outer_phase(const Wavenumbers& w, double l0) {
  double phi = std::atan(w.gamma / w.k0) - w.k0 * l0;
  phi = std::fmod(phi, M_PI);
  if (phi < 0.0) phi += M_PI;
  return phi;
}

// raw (A1 = 1) middle and inner amplitudes
inline std::pair<double, double> amplitudes(const Wavenumbers& w, double phi,
                                            Parity parity, double l0, double l1) {
  double a2 = std::exp(-w.gamma * l0) / std::cos(phi + w.k0 * l0);
  double q = w.abs_k1();
  double inner = (parity == Parity::even)
                     ? a2 * std::cos(phi + w.k0 * l1) / std::cosh(q * l1)
                     : -a2 * std::cos(phi + w.k0 * l1) / std::sinh(q * l1);
  return {a2, inner};
}

inline std::pair<double, double> eval_terms(const ExpSegment& s, double x) {
  cdouble v = 0.0, d = 0.0;
  for (const auto& t : s.terms) {
    cdouble e = t.coef * std::exp(t.rate * x);
    v += e;
    d += t.rate * e;
  }
  return {v.real(), d.real()};
}

}  // namespace eigdetail

/// Scalar whose zeros in (-V0, -V1) are the eigenenergies of the given
/// parity. The outer condition fixes phi(E) analytically; the inner
/// matching condition is then written pole-free as
///   even:  |k1| tanh(|k1| L1) cos(theta) + k0 sin(theta)
///   odd :  |k1| coth(|k1| L1) cos(theta) + k0 sin(theta)
/// with theta = atan(gamma/k0) - k0 (L0 - L1). At the tan poles
/// (cos theta = 0) this equals ±k0 != 0, so every sign change brackets a
/// genuine root and the scan needs no pole bookkeeping.
inline double matching_function(const DswpParams& p, const PhysicalConstants& c,
                                Parity parity, double energy_ev) {
  double e = energy_ev * kElectronVoltJ;
  if (!(e > -p.v0() && e < -p.v1()))
    throw OutOfWindow("matching_function: energy outside (-V0, -V1)");
  Wavenumbers w = wavenumbers(p, c, e);
  double q = w.abs_k1();
  double theta = std::atan(w.gamma / w.k0) - w.k0 * (p.l0() - p.l1());
  double inner = (parity == Parity::even) ? q * std::tanh(q * p.l1())
                                          : q / std::tanh(q * p.l1());
  return inner * std::cos(theta) + w.k0 * std::sin(theta);
}

/// Assembles the five-region piecewise wavefunction of a state, normalized
/// to unit L2 norm. Real-valued, continuous, C1 at the matching points.
inline PiecewiseExp build_wavefunction(const EigenState& st) {
  const DswpParams& p = st.params;
  Wavenumbers w = wavenumbers(p, st.constants, st.energy_ev * kElectronVoltJ);
  double q = w.abs_k1();
  double phi = st.phase;
  const cdouble i(0.0, 1.0);
  const double inf = std::numeric_limits<double>::infinity();
  double a1 = st.a1, a2 = st.a2, a3 = st.a3_or_b3;

  cdouble mid_p = 0.5 * a2 * std::exp(i * phi);   // e^{i(phi + k0 x)} piece
  cdouble mid_m = 0.5 * a2 * std::exp(-i * phi);  // conjugate piece
  std::vector<ExpSegment> segs;
  segs.push_back({-inf, -p.l0(), {{a1, w.gamma}}});
  segs.push_back({-p.l0(), -p.l1(), {{mid_p, -i * w.k0}, {mid_m, i * w.k0}}});
  if (st.parity == Parity::even) {
    segs.push_back({-p.l1(), p.l1(), {{0.5 * a3, q}, {0.5 * a3, -q}}});
    segs.push_back({p.l1(), p.l0(), {{mid_p, i * w.k0}, {mid_m, -i * w.k0}}});
    segs.push_back({p.l0(), inf, {{a1, -w.gamma}}});
  } else {
    segs.push_back({-p.l1(), p.l1(), {{0.5 * a3, q}, {-0.5 * a3, -q}}});
    segs.push_back({p.l1(), p.l0(), {{-mid_p, i * w.k0}, {-mid_m, -i * w.k0}}});
    segs.push_back({p.l0(), inf, {{-a1, -w.gamma}}});
  }
  PiecewiseExp u(std::move(segs));
  u.scale(1.0 / std::sqrt(st.norm));
  return u;
}

/// Rescales a square-integrable function so its density integrates to one
/// over [-support_cut, support_cut].
template <class F>
struct Normalized {
  F f;
  double factor;
  double operator()(double x) const { return factor * f(x); }
};

template <class F>
Normalized<std::decay_t<F>> normalize(F&& u, double support_cut) {
  numerics::QuadratureOptions opt;
  opt.abs_tol = 1e-300;
  opt.rel_tol = 1e-13;
  opt.initial_panels = 64;
  auto r = numerics::integrate([&](double x) { double v = u(x); return v * v; },
                               -support_cut, support_cut, opt);
  if (!std::isfinite(r.value) || r.value <= 1e-300 || !r.converged)
    throw NotNormalizable("normalize: squared norm not finite and positive");
  return Normalized<std::decay_t<F>>{std::forward<F>(u), 1.0 / std::sqrt(r.value)};
}

inline PiecewiseExp normalize(PiecewiseExp u, double support_cut) {
  auto scaled = normalize([&u](double x) { return u.value(x); }, support_cut);
  u.scale(scaled.factor);
  return u;
}

struct SpectrumOptions {
  int scan_panels = 2000;
  double root_tol_ev = 1e-12;
};

/// All bound tunneling states (-V0 < E < -V1), sorted by energy.
/// Each parity window is scanned separately with `scan_panels` panels and
/// brackets refined by find_root; states are normalized and carry node
/// counts plus matching residuals. Throws NoStatesFound for an empty window.
inline std::vector<EigenState> solve_spectrum(const DswpParams& p,
                                              const PhysicalConstants& c,
                                              const SpectrumOptions& opt = {}) {
  p.validate();
  c.validate();
  const double ev = kElectronVoltJ;
  double window = p.v0_ev - p.v1_ev;
  double lo = -p.v0_ev + 1e-9 * window;
  double hi = -p.v1_ev - 1e-9 * window;

  std::vector<EigenState> states;
  for (Parity parity : {Parity::even, Parity::odd}) {
    auto f = [&](double e_ev) { return matching_function(p, c, parity, e_ev); };
    double prev_e = lo, prev_f = f(lo);
    for (int j = 1; j <= opt.scan_panels; ++j) {
      double e = lo + (hi - lo) * j / opt.scan_panels;
      double fe = f(e);
      if ((prev_f <= 0.0) != (fe < 0.0)) {
        double root = numerics::find_root(f, numerics::Bracket{prev_e, e, prev_f, fe},
                                          opt.root_tol_ev);
        EigenState st;
        st.energy_ev = root;
        st.parity = parity;
        st.params = p;
        st.constants = c;
        Wavenumbers w = wavenumbers(p, c, root * ev);
        st.phase = eigdetail::outer_phase(w, p.l0());
        auto [a2, a3] = eigdetail::amplitudes(w, st.phase, parity, p.l0(), p.l1());
        st.a2 = a2;
        st.a3_or_b3 = a3;
        // interior nodes: zeros of cos(phi + k0 x) in (l1, l0), mirrored,
        // plus the origin node of odd states
        double wlo = (st.phase + w.k0 * p.l1() - M_PI_2) / M_PI;
        double whi = (st.phase + w.k0 * p.l0() - M_PI_2) / M_PI;
        int crossings = static_cast<int>(std::floor(whi)) - static_cast<int>(std::floor(wlo));
        st.node_count = 2 * crossings + (parity == Parity::odd ? 1 : 0);

        st.norm = 1.0;
        PiecewiseExp raw = build_wavefunction(st);
        double cut = p.l0() + 0.5 * std::log(1e16) / w.gamma;
        numerics::QuadratureOptions qopt;
        qopt.abs_tol = 1e-300;
        qopt.rel_tol = 1e-13;
        qopt.initial_panels = 64;
        auto nr = numerics::integrate([&](double x) { double v = raw.value(x); return v * v; },
                                      -cut, cut, qopt);
        if (!std::isfinite(nr.value) || nr.value <= 0.0)
          throw NotNormalizable("solve_spectrum: state has non-positive norm");
        st.norm = nr.value;

        PiecewiseExp u = build_wavefunction(st);
        auto ld = [](std::pair<double, double> vd) { return vd.second / vd.first; };
        const auto& segs = u.segments();
        double ld_mid1 = ld(eigdetail::eval_terms(segs[3], p.l1()));
        double ld_in1 = ld(eigdetail::eval_terms(segs[2], p.l1()));
        double ld_mid0 = ld(eigdetail::eval_terms(segs[3], p.l0()));
        double ld_out0 = ld(eigdetail::eval_terms(segs[4], p.l0()));
        st.residual.at_l1 = std::fabs(ld_mid1 - ld_in1) / std::max(std::fabs(ld_mid1), std::fabs(ld_in1));
        st.residual.at_l0 = std::fabs(ld_mid0 - ld_out0) / std::max(std::fabs(ld_mid0), std::fabs(ld_out0));

        states.push_back(std::move(st));
      }
      prev_e = e;
      prev_f = fe;
    }
  }
  if (states.empty())
    throw NoStatesFound("solve_spectrum: no bound tunneling states in (-V0, -V1)");
  std::sort(states.begin(), states.end(),
            [](const EigenState& a, const EigenState& b) { return a.energy_ev < b.energy_ev; });
  return states;
}

/// Analytic infinite-square-well eigenstate on (0, L).
struct IswpState {
  int n = 1;
  double energy_ev = 0.0;
  double width_si = 0.0;
  PiecewiseExp wavefunction;
};

inline IswpState iswp_state(const IswpParams& p, const PhysicalConstants& c, int n) {
  if (n < 1) throw InvalidIndex("iswp_state: n must be >= 1");
  p.validate();
  c.validate();
  double L = p.width();
  double a = n * M_PI / L;
  double m = c.particle_mass();
  double energy = c.hbar * c.hbar * M_PI * M_PI * n * n / (2.0 * m * L * L);
  double amp = std::sqrt(2.0 / L);
  const cdouble i(0.0, 1.0);
  // sin(a x) = (e^{iax} - e^{-iax}) / 2i
  std::vector<ExpSegment> segs{
      {0.0, L, {{amp * (-0.5) * i, i * a}, {amp * 0.5 * i, -i * a}}}};
  return IswpState{n, energy / kElectronVoltJ, L, PiecewiseExp(std::move(segs))};
}

}  // namespace qwell

#endif  // QWELL_EIGENSOLVER_HPP
