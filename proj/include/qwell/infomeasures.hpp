#ifndef QWELL_INFOMEASURES_HPP
#define QWELL_INFOMEASURES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "qwell/errors.hpp"
#include "qwell/numerics.hpp"
#include "qwell/quantum_state.hpp"

namespace qwell {

/// 1-D entropic uncertainty bound, S_x + S_k >= 1 + ln(pi).
inline constexpr double kEntropicBound = 1.0 + 1.1447298858494002;  // 1 + ln(pi)
/// 1-D Fisher product bound for real wavefunctions, I_x * I_k >= 4.
inline constexpr double kFisherBound = 4.0;

// ---------------------------------------------------------------------------
// Discrete distributions
// ---------------------------------------------------------------------------

struct DiscreteDist {
  std::vector<double> p;

  void validate() const {
    double sum = 0.0;
    for (double v : p) {
      if (v < 0.0) throw ValidationError("DiscreteDist: negative probability");
      sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
      throw ValidationError("DiscreteDist: probabilities must sum to 1");
  }
};

enum class LogBase { e, two };

/// -sum p log p with the 0 log 0 = 0 convention.
inline double shannon_discrete(const DiscreteDist& d, LogBase base = LogBase::e) {
  d.validate();
  double s = 0.0;
  for (double v : d.p)
    if (v > 0.0) s -= v * std::log(v);
  return base == LogBase::e ? s : s / std::numbers::ln2;
}

/// sum_{i=1}^{N-1} (p_{i+1} - p_i)^2 / p_i; a zero p_i under a nonzero
/// difference is an error rather than an infinite answer.
inline double fisher_discrete(const DiscreteDist& d) {
  d.validate();
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < d.p.size(); ++i) {
    double diff = d.p[i + 1] - d.p[i];
    if (diff == 0.0) continue;
    if (d.p[i] == 0.0)
      throw ZeroProbabilityTerm("fisher_discrete: zero probability under nonzero difference");
    s += diff * diff / d.p[i];
  }
  return s;
}

/// Distance from equiprobability, sum (p_i - 1/N)^2.
inline double disequilibrium_discrete(const DiscreteDist& d) {
  d.validate();
  double n = static_cast<double>(d.p.size());
  double s = 0.0;
  for (double v : d.p) s += (v - 1.0 / n) * (v - 1.0 / n);
  return s;
}

inline double renyi_discrete(const DiscreteDist& d, double a) {
  if (!(a > 0.0) || std::fabs(a - 1.0) < 1e-12)
    throw InvalidOrder("renyi: order must be positive and != 1");
  d.validate();
  double s = 0.0;
  for (double v : d.p)
    if (v > 0.0) s += std::pow(v, a);
  return std::log(s) / (1.0 - a);
}

// LMC complexity variants
inline double lmc_exponential(double s_t, double d_t) { return std::exp(s_t) * d_t; }
inline double lmc_product(double s, double d) { return s * d; }
/// near-equilibrium expansion, C = (2/N) S (S_max - S)
inline double lmc_near_equilibrium(double s, double s_max, std::size_t n) {
  return 2.0 / static_cast<double>(n) * s * (s_max - s);
}

// ---------------------------------------------------------------------------
// Continuous densities
// ---------------------------------------------------------------------------

struct MeasureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int initial_panels = 32;
  double density_floor = 1e-30;  ///< values below contribute zero to 1/f and ln f
  bool check_normalization = true;
  double normalization_tol = 1e-4;
};

namespace imdetail {

template <class F>
void require_normalized(F& f, double lo, double hi, const MeasureOptions& opt) {
  if (!opt.check_normalization) return;
  numerics::QuadratureOptions q{1e-12, 1e-10, opt.initial_panels, 200000, 0.0};
  auto r = numerics::integrate(f, lo, hi, q);
  if (std::fabs(r.value - 1.0) > opt.normalization_tol)
    throw NotNormalized("continuous measure: density does not integrate to 1");
}

inline numerics::QuadratureOptions quad_opts(const MeasureOptions& opt) {
  return numerics::QuadratureOptions{opt.abs_tol, opt.rel_tol, opt.initial_panels, 200000, 0.0};
}

}  // namespace imdetail

/// Differential entropy -int f ln f (nats).
template <class F>
double shannon_continuous(F&& f, double lo, double hi, const MeasureOptions& opt = {}) {
  imdetail::require_normalized(f, lo, hi, opt);
  double floor = opt.density_floor;
  auto r = numerics::integrate(
      [&](double x) {
        double v = f(x);
        return v > floor ? -v * std::log(v) : 0.0;
      },
      lo, hi, imdetail::quad_opts(opt));
  return r.value;
}

/// Fisher information int (f')^2 / f with the density-floor guard.
template <class F, class DF>
double fisher_continuous(F&& f, DF&& df, double lo, double hi, const MeasureOptions& opt = {}) {
  imdetail::require_normalized(f, lo, hi, opt);
  double floor = opt.density_floor;
  auto r = numerics::integrate(
      [&](double x) {
        double v = f(x);
        if (v <= floor) return 0.0;
        double d = df(x);
        return d * d / v;
      },
      lo, hi, imdetail::quad_opts(opt));
  return r.value;
}

/// Disequilibrium int f^2.
template <class F>
double disequilibrium_continuous(F&& f, double lo, double hi, const MeasureOptions& opt = {}) {
  auto r = numerics::integrate([&](double x) { double v = f(x); return v * v; }, lo, hi,
                               imdetail::quad_opts(opt));
  return r.value;
}

/// Renyi entropy H_a = ln(int f^a) / (1 - a), in nats.
template <class F>
double renyi_continuous(F&& f, double a, double lo, double hi, const MeasureOptions& opt = {}) {
  if (!(a > 0.0) || std::fabs(a - 1.0) < 1e-12)
    throw InvalidOrder("renyi: order must be positive and != 1");
  auto r = numerics::integrate(
      [&](double x) {
        double v = f(x);
        return v > 0.0 ? std::pow(v, a) : 0.0;
      },
      lo, hi, imdetail::quad_opts(opt));
  return std::log(r.value) / (1.0 - a);
}

/// First and second moments in both spaces plus the derived widths.
struct MomentSet {
  double mean_x = 0.0;
  double mean_x2 = 0.0;
  double mean_k = 0.0;
  double mean_k2 = 0.0;
  double dx = 0.0;
  double dk = 0.0;
};

namespace imdetail {

inline double width_from(double mean, double mean_sq, const char* what) {
  double var = mean_sq - mean * mean;
  if (var < -1e-10 * std::max(std::fabs(mean_sq), mean * mean))
    throw NegativeVariance(std::string("negative variance in ") + what);
  return std::sqrt(std::max(var, 0.0));
}

}  // namespace imdetail

/// Heisenberg moments by direct quadrature of the two densities.
/// Asserts dx * dk >= 1/2.
template <class FR, class FN>
MomentSet uncertainty_product(FR&& rho, double x_lo, double x_hi, FN&& n, double k_lo,
                              double k_hi, const MeasureOptions& opt = {}) {
  imdetail::require_normalized(rho, x_lo, x_hi, opt);
  imdetail::require_normalized(n, k_lo, k_hi, opt);
  auto q = imdetail::quad_opts(opt);
  double xs = std::max(std::fabs(x_lo), std::fabs(x_hi));
  double ks = std::max(std::fabs(k_lo), std::fabs(k_hi));
  auto mx = numerics::integrate_vec<3>(
      [&](double x) {
        double v = rho(x);
        return std::array<double, 3>{v, x * v, x * x * v};
      },
      x_lo, x_hi, q, {1.0, xs, xs * xs});
  auto mk = numerics::integrate_vec<3>(
      [&](double k) {
        double v = n(k);
        return std::array<double, 3>{v, k * v, k * k * v};
      },
      k_lo, k_hi, q, {1.0, ks, ks * ks});
  MomentSet m;
  m.mean_x = mx[1].value / mx[0].value;
  m.mean_x2 = mx[2].value / mx[0].value;
  m.mean_k = mk[1].value / mk[0].value;
  m.mean_k2 = mk[2].value / mk[0].value;
  m.dx = imdetail::width_from(m.mean_x, m.mean_x2, "position");
  m.dk = imdetail::width_from(m.mean_k, m.mean_k2, "momentum");
  if (m.dx * m.dk < 0.5 * (1.0 - 1e-9))
    throw BoundViolation("uncertainty_product: dx * dk below 1/2");
  return m;
}

/// One-sided de Bruijn check: smooth f with a Gaussian of variance t,
/// estimate dS/dt at 0+ and compare against i_f / 2. Returns the relative
/// error of the estimate.
template <class F>
double debruijn_check(F&& f, double lo, double hi, double i_f, double t_step,
                      const MeasureOptions& opt = {}) {
  if (!(t_step > 0.0)) throw std::invalid_argument("debruijn_check: t_step must be > 0");
  if (!(i_f > 0.0)) throw std::invalid_argument("debruijn_check: i_f must be > 0");
  double sigma = std::sqrt(t_step);
  double width = hi - lo;
  if (sigma < 1e-8 * width)
    throw ConvolutionUnderresolved("debruijn_check: smoothing width below resolvable scale");

  MeasureOptions base = opt;
  base.check_normalization = false;
  double s0 = shannon_continuous(f, lo, hi, base);

  const double zmax = 8.0;
  const double inv_sqrt2pi = 0.3989422804014327;
  auto smoothed = [&](double x) {
    numerics::QuadratureOptions q{1e-14, 1e-11, 16, 20000, 0.0};
    auto r = numerics::integrate(
        [&](double z) { return f(x - sigma * z) * inv_sqrt2pi * std::exp(-0.5 * z * z); },
        -zmax, zmax, q);
    return r.value;
  };
  numerics::QuadratureOptions sq{opt.abs_tol, opt.rel_tol, opt.initial_panels, 200000, 0.0};
  auto s1r = numerics::integrate(
      [&](double x) {
        double v = smoothed(x);
        return v > opt.density_floor ? -v * std::log(v) : 0.0;
      },
      lo - zmax * sigma, hi + zmax * sigma, sq);
  if (!s1r.converged)
    throw ConvolutionUnderresolved("debruijn_check: smoothed entropy quadrature did not converge");
  double estimate = (s1r.value - s0) / t_step;
  return std::fabs(estimate - 0.5 * i_f) / (0.5 * i_f);
}

// ---------------------------------------------------------------------------
// Time series of every measure for a superposition state
// ---------------------------------------------------------------------------

struct RenyiEntry {
  double order = 0.0;
  double position = 0.0;
  double momentum = 0.0;
};

struct MeasureRecord {
  double t_over_T = 0.0;
  double dx = 0.0;
  double dk = 0.0;
  double dx_dk = 0.0;
  double s_x = 0.0, s_k = 0.0, s_t = 0.0;
  double i_x = 0.0, i_k = 0.0, i_t = 0.0;
  double d_x = 0.0, d_k = 0.0, d_t = 0.0;
  double c_t = 0.0;
  double norm_x = 0.0, norm_k = 0.0;  // integral of each density, for audits
  std::vector<RenyiEntry> renyi;
};

struct SeriesOptions {
  std::vector<double> renyi_orders{0.5, 2.0, 3.0};
  double rel_tol = 1e-9;
  double position_tail_factor = 45.0;       ///< decay lengths beyond the well edge
  double momentum_tail_threshold = 1e-12;   ///< pointwise envelope cut for the k domain
  double periods_per_panel = 1.5;           ///< k-space pre-split density
  bool enforce_bounds = true;
};

namespace imdetail {

inline double momentum_measure_cut(const SuperpositionState& s, double threshold) {
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
    below = (envelope(k) < threshold * peak) ? below + 1 : 0;
  }
  return k;
}

struct SeriesDomains {
  double x_lo, x_hi;
  double k_cut;
  int x_panels;
  int k_panels;
};

inline SeriesDomains series_domains(const SuperpositionState& s, const SeriesOptions& opt) {
  SeriesDomains d{};
  if (s.system == SystemKind::iswp) {
    d.x_lo = s.x_lo;
    d.x_hi = s.x_hi;
  } else {
    double edge = s.state_a.finite_hi();
    d.x_lo = -(edge + opt.position_tail_factor / s.gamma_min);
    d.x_hi = edge + opt.position_tail_factor / s.gamma_min;
  }
  d.k_cut = momentum_measure_cut(s, opt.momentum_tail_threshold);
  double xw = d.x_hi - d.x_lo;
  d.x_panels = std::max(32, static_cast<int>(std::ceil(xw * s.k_scale / M_PI)));
  double period = 2.0 * M_PI / s.support_width;
  d.k_panels = std::max(64, static_cast<int>(std::ceil(2.0 * d.k_cut / period / opt.periods_per_panel)));
  return d;
}

}  // namespace imdetail

/// All measures at one instant; domains and panel hints precomputed once per
/// series. Position-space pass also supplies the momentum moments through
/// int |dpsi/dx|^2 and int Im(psi* dpsi/dx), which converge far faster than
/// k-space moment integrals.
inline MeasureRecord measure_record(const SuperpositionState& s, double t, double t_over_T,
                                    const imdetail::SeriesDomains& dom,
                                    const SeriesOptions& opt = {}) {
  constexpr double kFloor = 1e-30;
  const double w = dom.x_hi - dom.x_lo;
  const double kbar = s.k_scale;

  numerics::QuadratureOptions xq{1e-300, opt.rel_tol, dom.x_panels, 400000, 0.0};
  std::array<double, 10> xscales{1.0,        w,         w * w, 50.0, 4 * kbar * kbar,
                                 1.0 / w,    std::sqrt(w), 1.0 / (w * w), kbar * kbar,
                                 0.5 * kbar};
  auto xr = numerics::integrate_vec<10>(
      [&](double x) {
        auto [v, d] = psi_pair(s, x, t);
        double rho = std::norm(v);
        double drho = 2.0 * (v.real() * d.real() + v.imag() * d.imag());
        double slog = rho > kFloor ? -rho * std::log(rho) : 0.0;
        double fish = rho > kFloor ? drho * drho / rho : 0.0;
        double half = std::sqrt(rho);
        double grad2 = std::norm(d);
        double curr = v.real() * d.imag() - v.imag() * d.real();
        return std::array<double, 10>{rho,        x * rho, x * x * rho, slog, fish,
                                      rho * rho,  half,    rho * rho * rho, grad2, curr};
      },
      dom.x_lo, dom.x_hi, xq, xscales);

  numerics::QuadratureOptions kq{1e-300, opt.rel_tol, dom.k_panels, 400000, 0.0};
  double nbar = 1.0 / kbar;
  std::array<double, 6> kscales{1.0, 50.0, 4.0 * w * w, nbar, std::sqrt(kbar), nbar * nbar};
  auto kr = numerics::integrate_vec<6>(
      [&](double k) {
        auto [v, d] = phi_pair(s, k, t);
        double n = std::norm(v);
        double dn = 2.0 * (v.real() * d.real() + v.imag() * d.imag());
        double slog = n > kFloor ? -n * std::log(n) : 0.0;
        double fish = n > kFloor ? dn * dn / n : 0.0;
        return std::array<double, 6>{n, slog, fish, n * n, std::sqrt(n), n * n * n};
      },
      -dom.k_cut, dom.k_cut, kq, kscales);

  MeasureRecord r;
  r.t_over_T = t_over_T;
  r.norm_x = xr[0].value;
  r.norm_k = kr[0].value;

  double mean_x = xr[1].value / xr[0].value;
  double mean_x2 = xr[2].value / xr[0].value;
  double mean_k = xr[9].value / xr[0].value;
  double mean_k2 = xr[8].value / xr[0].value;
  r.dx = imdetail::width_from(mean_x, mean_x2, "position");
  r.dk = imdetail::width_from(mean_k, mean_k2, "momentum");
  r.dx_dk = r.dx * r.dk;

  r.s_x = xr[3].value;
  r.s_k = kr[1].value;
  r.s_t = r.s_x + r.s_k;
  r.i_x = xr[4].value;
  r.i_k = kr[2].value;
  r.i_t = r.i_x * r.i_k;
  r.d_x = xr[5].value;
  r.d_k = kr[3].value;
  r.d_t = r.d_x * r.d_k;
  r.c_t = lmc_exponential(r.s_t, r.d_t);

  MeasureOptions scalar;
  scalar.check_normalization = false;
  scalar.rel_tol = opt.rel_tol;
  for (double a : opt.renyi_orders) {
    RenyiEntry e;
    e.order = a;
    if (a == 0.5) {
      e.position = 2.0 * std::log(xr[6].value);
      e.momentum = 2.0 * std::log(kr[4].value);
    } else if (a == 2.0) {
      e.position = -std::log(xr[5].value);
      e.momentum = -std::log(kr[3].value);
    } else if (a == 3.0) {
      e.position = -0.5 * std::log(xr[7].value);
      e.momentum = -0.5 * std::log(kr[5].value);
    } else {
      scalar.initial_panels = dom.x_panels;
      e.position = renyi_continuous([&](double x) { return density_position_at(s, x, t); }, a,
                                    dom.x_lo, dom.x_hi, scalar);
      scalar.initial_panels = dom.k_panels;
      e.momentum = renyi_continuous([&](double k) { return density_momentum_at(s, k, t); }, a,
                                    -dom.k_cut, dom.k_cut, scalar);
    }
    r.renyi.push_back(e);
  }

  if (opt.enforce_bounds) {
    auto fail = [&](const char* what) {
      throw BoundViolation(std::string("measure_record: ") + what + " violated at t/T = " +
                           std::to_string(t_over_T));
    };
    if (!(r.s_t >= kEntropicBound)) fail("entropic uncertainty S_T >= 1 + ln(pi)");
    if (!(r.i_t >= kFisherBound)) fail("Fisher product I_T >= 4");
    if (!(r.dx_dk >= 0.5)) fail("Heisenberg dx*dk >= 1/2");
    if (!(r.i_x * r.dx * r.dx >= 1.0)) fail("Cramer-Rao in position");
    if (!(r.i_k * r.dk * r.dk >= 1.0)) fail("Cramer-Rao in momentum");
  }
  return r;
}

/// Measures at n_times instants spanning one full period, t = j T / (n_times-1).
inline std::vector<MeasureRecord> measure_series(const SuperpositionState& s, int n_times,
                                                 const SeriesOptions& opt = {}) {
  if (n_times < 8) throw std::invalid_argument("measure_series: n_times must be >= 8");
  for (double a : opt.renyi_orders)
    if (!(a > 0.0) || std::fabs(a - 1.0) < 1e-12)
      throw InvalidOrder("measure_series: invalid Renyi order");
  auto dom = imdetail::series_domains(s, opt);
  double T = s.period();
  std::vector<MeasureRecord> out;
  out.reserve(n_times);
  for (int j = 0; j < n_times; ++j) {
    double frac = static_cast<double>(j) / (n_times - 1);
    out.push_back(measure_record(s, frac * T, frac, dom, opt));
  }
  return out;
}

/// Moments of a superposition by the position-space route (used by the
/// series internally; exposed for cross-checks against uncertainty_product).
inline MomentSet state_moments(const SuperpositionState& s, double t,
                               const SeriesOptions& opt = {}) {
  auto dom = imdetail::series_domains(s, opt);
  numerics::QuadratureOptions xq{1e-300, opt.rel_tol, dom.x_panels, 400000, 0.0};
  const double w = dom.x_hi - dom.x_lo;
  const double kbar = s.k_scale;
  auto xr = numerics::integrate_vec<5>(
      [&](double x) {
        auto [v, d] = psi_pair(s, x, t);
        double rho = std::norm(v);
        return std::array<double, 5>{rho, x * rho, x * x * rho, std::norm(d),
                                     v.real() * d.imag() - v.imag() * d.real()};
      },
      dom.x_lo, dom.x_hi, xq, {1.0, w, w * w, kbar * kbar, 0.5 * kbar});
  MomentSet m;
  m.mean_x = xr[1].value / xr[0].value;
  m.mean_x2 = xr[2].value / xr[0].value;
  m.mean_k = xr[4].value / xr[0].value;
  m.mean_k2 = xr[3].value / xr[0].value;
  m.dx = imdetail::width_from(m.mean_x, m.mean_x2, "position");
  m.dk = imdetail::width_from(m.mean_k, m.mean_k2, "momentum");
  return m;
}

/// Quartic fits of the quarter-period series: exp(S_T) against a quartic in
/// wt and ln(I_T) against a quartic in wt, matching the fitted forms
/// S_T = ln(quartic) and I_T = exp(quartic).
struct MeasureFits {
  numerics::PolyFit s_t;  // fit of exp(S_T)
  numerics::PolyFit i_t;  // fit of ln(I_T)
};

inline MeasureFits fit_measures(std::span<const MeasureRecord> series) {
  std::vector<double> wt, es, li;
  for (const auto& r : series) {
    double x = 2.0 * M_PI * r.t_over_T;  // omega t
    if (x <= 0.5 * M_PI + 1e-12) {
      wt.push_back(x);
      es.push_back(std::exp(r.s_t));
      li.push_back(std::log(r.i_t));
    }
  }
  if (wt.size() < 6 || wt.front() > 1e-12 || wt.back() < 0.5 * M_PI - 0.1)
    throw std::invalid_argument("fit_measures: series must cover 0 <= wt <= pi/2");
  MeasureFits f;
  f.s_t = numerics::fit_quartic(wt, es);
  f.i_t = numerics::fit_quartic(wt, li);
  return f;
}

}  // namespace qwell

#endif  // QWELL_INFOMEASURES_HPP
