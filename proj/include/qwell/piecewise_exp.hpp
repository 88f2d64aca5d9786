#ifndef QWELL_PIECEWISE_EXP_HPP
#define QWELL_PIECEWISE_EXP_HPP

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

namespace qwell {

using cdouble = std::complex<double>;

/// One complex-exponential term: coef * exp(rate * x).
/// Real trig/hyperbolic/exponential pieces are sums of these, which makes
/// segment Fourier integrals against exp(-ikx) elementary.
struct ExpTerm {
  cdouble coef;
  cdouble rate;
};

/// A run of terms valid on [lo, hi]; lo may be -inf and hi +inf provided the
/// terms decay in that direction.
struct ExpSegment {
  double lo;
  double hi;
  std::vector<ExpTerm> terms;
};

namespace pwdetail {

// (e^u - 1) / u, stable for small |u|
inline cdouble expm1_over(cdouble u) {
  if (std::abs(u) < 0.25) {
    cdouble sum = 1.0, term = 1.0;
    for (int n = 2; n <= 18; ++n) {
      term *= u / static_cast<double>(n);
      sum += term;
    }
    return sum;
  }
  return (std::exp(u) - 1.0) / u;
}

// int_0^1 s e^{u s} ds = (e^u (u - 1) + 1) / u^2, stable for small |u|
inline cdouble expm1_moment(cdouble u) {
  if (std::abs(u) < 0.25) {
    cdouble sum = 0.5, term = 1.0;
    double fact = 1.0;
    for (int n = 1; n <= 18; ++n) {
      term *= u;
      fact *= static_cast<double>(n);
      sum += term / (fact * static_cast<double>(n + 2));
    }
    return sum;
  }
  return (std::exp(u) * (u - 1.0) + 1.0) / (u * u);
}

// int_lo^hi e^{w x} dx with optional infinite ends (decaying direction only)
inline cdouble exp_integral(cdouble w, double lo, double hi) {
  if (std::isinf(lo)) return std::exp(w * hi) / w;   // requires Re w > 0
  if (std::isinf(hi)) return -std::exp(w * lo) / w;  // requires Re w < 0
  double len = hi - lo;
  return std::exp(w * lo) * len * expm1_over(w * len);
}

// int_lo^hi x e^{w x} dx with the same end conventions
inline cdouble exp_moment(cdouble w, double lo, double hi) {
  if (std::isinf(lo)) return std::exp(w * hi) * (hi / w - 1.0 / (w * w));
  if (std::isinf(hi)) return -std::exp(w * lo) * (lo / w - 1.0 / (w * w));
  double len = hi - lo;
  return std::exp(w * lo) * len * (lo * expm1_over(w * len) + len * expm1_moment(w * len));
}

}  // namespace pwdetail

/// A real-valued function assembled from complex-exponential segments.
/// Supplies pointwise values, analytic derivatives, and the closed-form
/// Fourier transform (1/sqrt(2*pi)) * int f(x) exp(-ikx) dx together with
/// its k-derivative. Zero outside all segments.
class PiecewiseExp {
 public:
  PiecewiseExp() = default;
  explicit PiecewiseExp(std::vector<ExpSegment> segments) : segments_(std::move(segments)) {}

  const std::vector<ExpSegment>& segments() const { return segments_; }

  double value(double x) const {
    const ExpSegment* s = find(x);
    if (!s) return 0.0;
    cdouble v = 0.0;
    for (const auto& t : s->terms) v += t.coef * std::exp(t.rate * x);
    return v.real();
  }

  double derivative(double x) const {
    const ExpSegment* s = find(x);
    if (!s) return 0.0;
    cdouble v = 0.0;
    for (const auto& t : s->terms) v += t.coef * t.rate * std::exp(t.rate * x);
    return v.real();
  }

  /// value and derivative sharing the exponential evaluations
  std::pair<double, double> value_and_derivative(double x) const {
    const ExpSegment* s = find(x);
    if (!s) return {0.0, 0.0};
    cdouble v = 0.0, d = 0.0;
    for (const auto& t : s->terms) {
      cdouble e = t.coef * std::exp(t.rate * x);
      v += e;
      d += t.rate * e;
    }
    return {v.real(), d.real()};
  }

  cdouble fourier(double k) const {
    cdouble sum = 0.0;
    for (const auto& s : segments_)
      for (const auto& t : s.terms)
        sum += t.coef * pwdetail::exp_integral(t.rate - cdouble(0.0, k), s.lo, s.hi);
    return sum * kInvSqrt2Pi;
  }

  /// d/dk of fourier(k)
  cdouble fourier_derivative(double k) const {
    cdouble sum = 0.0;
    for (const auto& s : segments_)
      for (const auto& t : s.terms)
        sum += t.coef * pwdetail::exp_moment(t.rate - cdouble(0.0, k), s.lo, s.hi);
    return sum * cdouble(0.0, -1.0) * kInvSqrt2Pi;
  }

  /// transform and its k-derivative in one pass
  std::pair<cdouble, cdouble> fourier_pair(double k) const {
    cdouble f = 0.0, df = 0.0;
    for (const auto& s : segments_)
      for (const auto& t : s.terms) {
        cdouble w = t.rate - cdouble(0.0, k);
        f += t.coef * pwdetail::exp_integral(w, s.lo, s.hi);
        df += t.coef * pwdetail::exp_moment(w, s.lo, s.hi);
      }
    return {f * kInvSqrt2Pi, df * cdouble(0.0, -1.0) * kInvSqrt2Pi};
  }

  void scale(double factor) {
    for (auto& s : segments_)
      for (auto& t : s.terms) t.coef *= factor;
  }

  /// smallest finite segment edge (tails excluded)
  double finite_lo() const {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& s : segments_) {
      if (!std::isinf(s.lo)) v = std::min(v, s.lo);
      if (!std::isinf(s.hi)) v = std::min(v, s.hi);
    }
    return v;
  }

  double finite_hi() const {
    double v = -std::numeric_limits<double>::infinity();
    for (const auto& s : segments_) {
      if (!std::isinf(s.lo)) v = std::max(v, s.lo);
      if (!std::isinf(s.hi)) v = std::max(v, s.hi);
    }
    return v;
  }

 private:
  const ExpSegment* find(double x) const {
    for (const auto& s : segments_)
      if (x >= s.lo && x <= s.hi) return &s;
    return nullptr;
  }

  static constexpr double kInvSqrt2Pi = 0.3989422804014327;  // 1/sqrt(2 pi)

  std::vector<ExpSegment> segments_;
};

}  // namespace qwell

#endif  // QWELL_PIECEWISE_EXP_HPP
