#pragma once

// Extended-range numbers: a double mantissa and a 64-bit binary exponent.
// Peak functions are assembled from obstacles thousands of annuli deep, far
// below the smallest normal double, while every quantity that is actually
// compared stays a ratio of comparable scales.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>

namespace peakpoint {

using Complex = std::complex<double>;

namespace detail {

inline int clamp_exponent(std::int64_t e) {
  constexpr std::int64_t kLimit = 1 << 20;
  return static_cast<int>(std::clamp<std::int64_t>(e, -kLimit, kLimit));
}

}  // namespace detail

/// value = mantissa * 2^exponent, with mantissa in [0.5, 1) or exactly 0.
struct ScaledReal {
  double mantissa = 0.0;
  std::int64_t exponent = 0;

  static ScaledReal from(double x) {
    ScaledReal r;
    if (x == 0.0 || !std::isfinite(x)) {
      r.mantissa = x;
      return r;
    }
    int e = 0;
    r.mantissa = std::frexp(x, &e);
    r.exponent = e;
    return r;
  }

  /// 2^l for real l.
  static ScaledReal from_log2(double l) {
    const double whole = std::floor(l);
    ScaledReal r = from(std::exp2(l - whole));
    r.exponent += static_cast<std::int64_t>(whole);
    return r;
  }

  double to_double() const {
    return std::ldexp(mantissa, detail::clamp_exponent(exponent));
  }

  bool is_zero() const { return mantissa == 0.0; }

  double log2() const {
    if (mantissa <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log2(mantissa) + static_cast<double>(exponent);
  }

  friend ScaledReal operator*(const ScaledReal& a, const ScaledReal& b) {
    ScaledReal r = from(a.mantissa * b.mantissa);
    if (!r.is_zero()) r.exponent += a.exponent + b.exponent;
    return r;
  }

  friend ScaledReal operator*(const ScaledReal& a, double k) {
    ScaledReal r = from(a.mantissa * k);
    if (!r.is_zero()) r.exponent += a.exponent;
    return r;
  }

  friend ScaledReal operator/(const ScaledReal& a, const ScaledReal& b) {
    ScaledReal r = from(a.mantissa / b.mantissa);
    if (!r.is_zero()) r.exponent += a.exponent - b.exponent;
    return r;
  }

  friend bool operator<(const ScaledReal& a, const ScaledReal& b) {
    return ratio(a, b) < 1.0;
  }

  /// a / b as a plain double (saturates to 0 or inf).
  friend double ratio(const ScaledReal& a, const ScaledReal& b) {
    if (a.is_zero()) return 0.0;
    return std::ldexp(a.mantissa / b.mantissa,
                      detail::clamp_exponent(a.exponent - b.exponent));
  }
};

/// base^n for nonnegative integer n by repeated squaring; exact whenever
/// base is a power of two.
inline ScaledReal scaled_pow(double base, std::int64_t n) {
  ScaledReal result = ScaledReal::from(1.0);
  ScaledReal b = ScaledReal::from(base);
  while (n > 0) {
    if (n & 1) result = result * b;
    b = b * b;
    n >>= 1;
  }
  return result;
}

/// value = mantissa * 2^exponent, max(|re|, |im|) of the mantissa in [0.5, 1).
struct ScaledComplex {
  Complex mantissa{0.0, 0.0};
  std::int64_t exponent = 0;

  static ScaledComplex from(Complex z) {
    ScaledComplex r;
    const double m = std::max(std::abs(z.real()), std::abs(z.imag()));
    if (m == 0.0 || !std::isfinite(m)) {
      r.mantissa = z;
      return r;
    }
    int e = 0;
    std::frexp(m, &e);
    r.mantissa = Complex(std::ldexp(z.real(), -e), std::ldexp(z.imag(), -e));
    r.exponent = e;
    return r;
  }

  static ScaledComplex from(const ScaledReal& s, Complex direction) {
    ScaledComplex r = from(direction * s.mantissa);
    if (!r.is_zero()) r.exponent += s.exponent;
    return r;
  }

  bool is_zero() const { return mantissa == Complex(0.0, 0.0); }

  Complex to_complex() const {
    const int e = detail::clamp_exponent(exponent);
    return {std::ldexp(mantissa.real(), e), std::ldexp(mantissa.imag(), e)};
  }

  ScaledReal abs() const {
    ScaledReal r = ScaledReal::from(std::abs(mantissa));
    if (!r.is_zero()) r.exponent += exponent;
    return r;
  }

  /// True when to_complex() loses nothing to underflow or overflow.
  bool representable() const {
    return is_zero() || (exponent > -1000 && exponent < 1000);
  }

  friend ScaledComplex operator-(const ScaledComplex& a, const ScaledComplex& b) {
    if (a.is_zero()) return from(-b.mantissa * 1.0).shifted(b.exponent);
    if (b.is_zero()) return a;
    const std::int64_t e = std::max(a.exponent, b.exponent);
    const Complex am = scale_down(a.mantissa, e - a.exponent);
    const Complex bm = scale_down(b.mantissa, e - b.exponent);
    return from(am - bm).shifted(e);
  }

  friend ScaledComplex operator+(const ScaledComplex& a, const ScaledComplex& b) {
    ScaledComplex nb = b;
    nb.mantissa = -nb.mantissa;
    return a - nb;
  }

  friend ScaledComplex operator*(const ScaledComplex& a, Complex k) {
    return from(a.mantissa * k).shifted(a.exponent);
  }

  /// a / s as a plain complex (components saturate to 0 or inf).
  friend Complex ratio(const ScaledComplex& a, const ScaledReal& s) {
    if (a.is_zero()) return {0.0, 0.0};
    const int e = detail::clamp_exponent(a.exponent - s.exponent);
    const Complex q = a.mantissa / s.mantissa;
    return {std::ldexp(q.real(), e), std::ldexp(q.imag(), e)};
  }

  /// a / b as a plain complex.
  friend Complex ratio(const ScaledComplex& a, const ScaledComplex& b) {
    if (a.is_zero()) return {0.0, 0.0};
    const int e = detail::clamp_exponent(a.exponent - b.exponent);
    const Complex q = a.mantissa / b.mantissa;
    return {std::ldexp(q.real(), e), std::ldexp(q.imag(), e)};
  }

 private:
  ScaledComplex shifted(std::int64_t by) const {
    ScaledComplex r = *this;
    if (!r.is_zero()) r.exponent += by;
    return r;
  }

  static Complex scale_down(Complex z, std::int64_t by) {
    const int e = detail::clamp_exponent(-by);
    return {std::ldexp(z.real(), e), std::ldexp(z.imag(), e)};
  }
};

/// Decimal scientific rendering with 17 significant digits; handles
/// magnitudes outside the double range.
inline std::string format_scaled(const ScaledReal& x) {
  char buf[64];
  if (x.is_zero()) return "0.0000000000000000e+00";
  if (x.exponent > -1000 && x.exponent < 1000) {
    std::snprintf(buf, sizeof buf, "%.16e", x.to_double());
    return buf;
  }
  const double l10 = std::log10(std::abs(x.mantissa)) +
                     static_cast<double>(x.exponent) * std::log10(2.0);
  double whole = std::floor(l10);
  double mant = std::pow(10.0, l10 - whole);
  if (mant >= 10.0) {
    mant /= 10.0;
    whole += 1.0;
  }
  if (x.mantissa < 0) mant = -mant;
  std::snprintf(buf, sizeof buf, "%.16fe%+lld", mant,
                static_cast<long long>(whole));
  return buf;
}

}  // namespace peakpoint
