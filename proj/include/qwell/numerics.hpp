#ifndef QWELL_NUMERICS_HPP
#define QWELL_NUMERICS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "qwell/errors.hpp"

namespace qwell::numerics {

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

/// A sign-change enclosure for a continuous function.
/// Invariants: lo < hi and f_lo * f_hi <= 0.
struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  double f_lo = 0.0;
  double f_hi = 0.0;

  bool valid() const {
    return lo < hi && std::isfinite(f_lo) && std::isfinite(f_hi) &&
           ((f_lo <= 0.0 && f_hi >= 0.0) || (f_lo >= 0.0 && f_hi <= 0.0));
  }
};

/// Evaluates f at both ends and packs a Bracket.
template <class F>
Bracket make_bracket(F&& f, double lo, double hi) {
  return Bracket{lo, hi, f(lo), f(hi)};
}

/// Finds a root of f inside a valid bracket.
///
/// Secant steps accelerated by the enclosure, with a forced bisection
/// whenever the width has not halved over the two preceding iterations, so
/// the bracket width provably reaches `tol` in at most
/// 2*log2(width/tol) + O(1) iterations. Transcendental matching functions
/// with steep branches are exactly the inputs this safeguard is for.
///
/// Returns the bracket endpoint with the smaller |f| once width <= tol.
/// Throws NoSignChange for an invalid bracket, MaxIterations if 200
/// iterations cannot shrink the bracket to `tol`.
template <class F>
double find_root(F&& f, Bracket br, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("find_root: tol must be > 0");
  if (!br.valid()) throw NoSignChange("find_root: bracket does not enclose a sign change");
  if (br.f_lo == 0.0) return br.lo;
  if (br.f_hi == 0.0) return br.hi;

  double a = br.lo, fa = br.f_lo;
  double b = br.hi, fb = br.f_hi;
  // most recent two evaluations, used for the secant model
  double x1 = a, fx1 = fa, x2 = b, fx2 = fb;
  double width_two_ago = b - a;

  const int max_iter = 200;
  for (int iter = 0; iter < max_iter; ++iter) {
    double width = b - a;
    if (width <= tol) return std::fabs(fa) <= std::fabs(fb) ? a : b;

    bool force_bisect = (iter >= 2) && (width > 0.5 * width_two_ago);
    width_two_ago = (iter % 2 == 0) ? width : width_two_ago;

    double t;
    if (!force_bisect && fx1 != fx2) {
      t = x2 - fx2 * (x2 - x1) / (fx2 - fx1);
      // keep strictly interior; reject stagnating steps
      double margin = 0.01 * width;
      if (!(t > a + margin && t < b - margin)) t = 0.5 * (a + b);
    } else {
      t = 0.5 * (a + b);
    }

    double ft = f(t);
    x1 = x2; fx1 = fx2;
    x2 = t;  fx2 = ft;
    if (ft == 0.0) return t;
    if ((ft < 0.0) == (fa < 0.0)) {
      a = t; fa = ft;
    } else {
      b = t; fb = ft;
    }
  }
  throw MaxIterations("find_root: tolerance not reached in 200 iterations");
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod quadrature
// ---------------------------------------------------------------------------

struct QuadratureResult {
  double value = 0.0;
  double est_error = 0.0;
  long evaluations = 0;
  bool converged = true;  ///< false = ToleranceNotMet; value is the best estimate
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-12;
  int initial_panels = 1;     ///< pre-split count; use the integrand's oscillation scale
  long max_panels = 200000;
  double tail_threshold = 1e-10;  ///< integrate_line: max allowed |f| at the cut
};

namespace detail {

// 15-point Kronrod nodes/weights with embedded 7-point Gauss (QUADPACK dqk15).
inline constexpr std::array<double, 8> kKronrodX = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
inline constexpr std::array<double, 8> kKronrodW = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr std::array<double, 4> kGaussW = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

template <std::size_t N>
struct Panel {
  double a, b;
  std::array<double, N> value;
  std::array<double, N> err;
  double priority;
};

// One GK15 pass over [a,b] for an array-valued integrand.
template <std::size_t N, class F>
Panel<N> gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::array<double, N> k15{}, g7{};
  std::array<double, N> fc = f(c);
  for (std::size_t i = 0; i < N; ++i) {
    k15[i] = kKronrodW[7] * fc[i];
    g7[i] = kGaussW[3] * fc[i];
  }
  for (int j = 0; j < 7; ++j) {
    std::array<double, N> fp = f(c + h * kKronrodX[j]);
    std::array<double, N> fm = f(c - h * kKronrodX[j]);
    for (std::size_t i = 0; i < N; ++i) {
      double s = fp[i] + fm[i];
      k15[i] += kKronrodW[j] * s;
      if (j % 2 == 1) g7[i] += kGaussW[(j - 1) / 2] * s;
    }
  }
  Panel<N> p{a, b, {}, {}, 0.0};
  for (std::size_t i = 0; i < N; ++i) {
    p.value[i] = k15[i] * h;
    p.err[i] = std::fabs((k15[i] - g7[i]) * h);
  }
  return p;
}

}  // namespace detail

/// Adaptive quadrature of an array-valued integrand over [a, b].
/// Component i converges when its error satisfies
/// max(abs_tol, rel_tol * max(|estimate_i|, scales_i)); panels are refined
/// where the worst component violates its budget. `scales` supplies the
/// natural magnitude of components whose integral may be near zero.
template <std::size_t N, class F>
std::array<QuadratureResult, N> integrate_vec(F&& f, double a, double b,
                                              const QuadratureOptions& opt = {},
                                              const std::array<double, N>& scales = {}) {
  if (!(a < b)) throw std::invalid_argument("integrate: requires a < b");
  long evals = 0;
  auto wrapped = [&](double x) {
    ++evals;
    return f(x);
  };

  std::array<double, N> total{}, toterr{};
  auto budget = [&](std::size_t i) {
    return std::max(opt.abs_tol,
                    opt.rel_tol * std::max(std::fabs(total[i]), scales[i]));
  };
  auto prio = [&](const detail::Panel<N>& p) {
    double worst = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      worst = std::max(worst, p.err[i] / std::max(budget(i), 1e-300));
    return worst;
  };

  auto cmp = [](const detail::Panel<N>& l, const detail::Panel<N>& r) {
    return l.priority < r.priority;
  };
  std::priority_queue<detail::Panel<N>, std::vector<detail::Panel<N>>, decltype(cmp)> heap(cmp);

  int m = std::max(1, opt.initial_panels);
  const long max_panels = std::max(opt.max_panels, 2L * m);
  for (int j = 0; j < m; ++j) {
    double pa = a + (b - a) * j / m;
    double pb = a + (b - a) * (j + 1) / m;
    auto p = detail::gk15<N>(wrapped, pa, pb);
    for (std::size_t i = 0; i < N; ++i) {
      total[i] += p.value[i];
      toterr[i] += p.err[i];
    }
    heap.push(p);
  }
  // refresh priorities against the full-interval estimates
  {
    std::vector<detail::Panel<N>> tmp;
    tmp.reserve(heap.size());
    while (!heap.empty()) { tmp.push_back(heap.top()); heap.pop(); }
    for (auto& p : tmp) { p.priority = prio(p); heap.push(p); }
  }

  long panels = m;
  bool converged = true;
  while (true) {
    bool ok = true;
    for (std::size_t i = 0; i < N; ++i)
      if (toterr[i] > budget(i)) { ok = false; break; }
    if (ok) break;
    if (panels >= max_panels || heap.empty()) {
      converged = false;
      break;
    }
    detail::Panel<N> worst = heap.top();
    heap.pop();
    double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {  // cannot split further
      converged = false;
      break;
    }
    auto left = detail::gk15<N>(wrapped, worst.a, mid);
    auto right = detail::gk15<N>(wrapped, mid, worst.b);
    for (std::size_t i = 0; i < N; ++i) {
      total[i] += left.value[i] + right.value[i] - worst.value[i];
      toterr[i] += left.err[i] + right.err[i] - worst.err[i];
    }
    left.priority = prio(left);
    right.priority = prio(right);
    heap.push(left);
    heap.push(right);
    ++panels;
  }

  std::array<QuadratureResult, N> out;
  for (std::size_t i = 0; i < N; ++i)
    out[i] = QuadratureResult{total[i], std::max(toterr[i], 0.0), evals, converged};
  return out;
}

/// Adaptive quadrature of a scalar integrand over [a, b].
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
  auto r = integrate_vec<1>([&](double x) { return std::array<double, 1>{f(x)}; }, a, b, opt);
  return r[0];
}

template <class F>
QuadratureResult integrate(F&& f, double a, double b, double tol) {
  QuadratureOptions opt;
  opt.abs_tol = tol;
  return integrate(std::forward<F>(f), a, b, opt);
}

/// Integral over the whole real line by symmetric truncation at ±tail_cut.
/// The integrand must have decayed below opt.tail_threshold at the cut;
/// otherwise TailNotNegligible is thrown rather than silently dropping mass.
template <class F>
QuadratureResult integrate_line(F&& f, double tail_cut, const QuadratureOptions& opt = {}) {
  if (!(tail_cut > 0.0)) throw std::invalid_argument("integrate_line: tail_cut must be > 0");
  double edge = std::max(std::fabs(f(tail_cut)), std::fabs(f(-tail_cut)));
  if (!(edge <= opt.tail_threshold))
    throw TailNotNegligible("integrate_line: |f(±tail_cut)| above threshold");
  return integrate(std::forward<F>(f), -tail_cut, tail_cut, opt);
}

template <class F>
QuadratureResult integrate_line(F&& f, double tail_cut, double tol) {
  QuadratureOptions opt;
  opt.abs_tol = tol;
  return integrate_line(std::forward<F>(f), tail_cut, opt);
}

// ---------------------------------------------------------------------------
// Least squares
// ---------------------------------------------------------------------------

/// Quartic least-squares fit: coefficients alpha0..alpha4, residual rmse,
/// and the x interval the fit was made on.
struct PolyFit {
  std::array<double, 5> coefficients{};
  double rmse = 0.0;
  double domain_lo = 0.0;
  double domain_hi = 0.0;

  double operator()(double x) const {
    double y = coefficients[4];
    for (int j = 3; j >= 0; --j) y = y * x + coefficients[j];
    return y;
  }
};

/// Least-squares quartic through (xs, ys) via Householder QR on the
/// column-scaled Vandermonde matrix. Requires >= 6 samples, xs strictly
/// increasing, and >= 5 distinct abscissae (else RankDeficient).
inline PolyFit fit_quartic(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size();
  if (n != ys.size()) throw std::invalid_argument("fit_quartic: size mismatch");
  if (n < 6) throw std::invalid_argument("fit_quartic: need at least 6 samples");
  std::size_t distinct = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (xs[i] < xs[i - 1])
      throw std::invalid_argument("fit_quartic: xs must be increasing");
    if (xs[i] > xs[i - 1]) ++distinct;
  }
  if (distinct < 5) throw RankDeficient("fit_quartic: fewer than 5 distinct abscissae");

  constexpr int kCols = 5;
  std::vector<std::array<double, kCols>> A(n);
  std::vector<double> rhs(ys.begin(), ys.end());
  for (std::size_t i = 0; i < n; ++i) {
    double p = 1.0;
    for (int j = 0; j < kCols; ++j) {
      A[i][j] = p;
      p *= xs[i];
    }
  }
  // column scaling for conditioning
  std::array<double, kCols> scale{};
  for (int j = 0; j < kCols; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s = std::max(s, std::fabs(A[i][j]));
    scale[j] = (s > 0.0) ? s : 1.0;
    for (std::size_t i = 0; i < n; ++i) A[i][j] /= scale[j];
  }

  std::array<double, kCols> rdiag{};
  for (int j = 0; j < kCols; ++j) {
    double nrm = 0.0;
    for (std::size_t i = j; i < n; ++i) nrm += A[i][j] * A[i][j];
    nrm = std::sqrt(nrm);
    if (nrm < 1e-10) throw RankDeficient("fit_quartic: rank-deficient design matrix");
    if (A[j][j] < 0) nrm = -nrm;
    for (std::size_t i = j; i < n; ++i) A[i][j] /= nrm;
    A[j][j] += 1.0;
    for (int k = j + 1; k < kCols; ++k) {
      double s = 0.0;
      for (std::size_t i = j; i < n; ++i) s += A[i][j] * A[i][k];
      s = -s / A[j][j];
      for (std::size_t i = j; i < n; ++i) A[i][k] += s * A[i][j];
    }
    double s = 0.0;
    for (std::size_t i = j; i < n; ++i) s += A[i][j] * rhs[i];
    s = -s / A[j][j];
    for (std::size_t i = j; i < n; ++i) rhs[i] += s * A[i][j];
    rdiag[j] = -nrm;
  }

  PolyFit fit;
  for (int j = kCols - 1; j >= 0; --j) {
    double s = rhs[j];
    for (int k = j + 1; k < kCols; ++k) s -= A[j][k] * fit.coefficients[k] * scale[k];
    fit.coefficients[j] = s / rdiag[j] / scale[j];
  }

  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = fit(xs[i]) - ys[i];
    ss += r * r;
  }
  fit.rmse = std::sqrt(ss / static_cast<double>(n));
  fit.domain_lo = xs.front();
  fit.domain_hi = xs.back();
  return fit;
}

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

/// Symmetric difference quotient, O(h^2) accurate for C^3 functions.
template <class F>
double central_diff(F&& f, double x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("central_diff: h must be > 0");
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Trapezoid sum over tabulated samples (uniform or not).
inline double trapezoid(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("trapezoid: need matching arrays of size >= 2");
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i)
    s += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  return s;
}

}  // namespace qwell::numerics

#endif  // QWELL_NUMERICS_HPP
