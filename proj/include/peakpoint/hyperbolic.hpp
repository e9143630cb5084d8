#pragma once

// Moebius and Poincare functions of the unit disk.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "peakpoint/scaled.hpp"

namespace peakpoint {

/// A point of the open unit disk.
class DiskPoint {
 public:
  explicit DiskPoint(Complex value) : value_(value) {
    if (!(std::abs(value) < 1.0))
      throw std::domain_error("DiskPoint: |z| >= 1");
  }
  Complex value() const { return value_; }

 private:
  Complex value_;
};

namespace detail {

// 1 - m(a,b)^2 = (1-|a|^2)(1-|b|^2)/|1 - conj(a) b|^2, free of cancellation.
inline double one_minus_mobius_sq(Complex a, Complex b) {
  const double ra = std::abs(a);
  const double rb = std::abs(b);
  const double den = std::norm(1.0 - std::conj(a) * b);
  return (1.0 - ra) * (1.0 + ra) * (1.0 - rb) * (1.0 + rb) / den;
}

}  // namespace detail

inline double mobius(DiskPoint p1, DiskPoint p2) {
  const Complex a = p1.value();
  const Complex b = p2.value();
  return std::abs(a - b) / std::abs(1.0 - std::conj(a) * b);
}

inline double mobius(Complex a, Complex b) { return mobius(DiskPoint(a), DiskPoint(b)); }

/// p = atanh(m), evaluated through 1-m so near-boundary pairs stay accurate.
inline double poincare(DiskPoint p1, DiskPoint p2) {
  const double m = mobius(p1, p2);
  if (m < 0.5) return std::atanh(m);
  const double one_minus_m = detail::one_minus_mobius_sq(p1.value(), p2.value()) / (1.0 + m);
  return 0.5 * (std::log1p(m) - std::log(one_minus_m));
}

inline double poincare(Complex a, Complex b) { return poincare(DiskPoint(a), DiskPoint(b)); }

/// m(a, 1 - g) and p(a, 1 - g) for points 1 - g near the unit circle:
/// 1 - |1-g|^2 = 2 Re g - |g|^2 keeps its digits when g is tiny.
inline double one_minus_mobius_sq_gap(Complex a, Complex g) {
  const double ra = std::abs(a);
  const double inner = 2.0 * g.real() - std::norm(g);
  if (!(ra < 1.0) || !(inner > 0.0)) throw std::domain_error("point outside the open disk");
  const Complex b = 1.0 - g;
  return (1.0 - ra) * (1.0 + ra) * inner / std::norm(1.0 - std::conj(a) * b);
}

inline double mobius_gap(Complex a, Complex g) {
  return std::sqrt(std::max(0.0, 1.0 - one_minus_mobius_sq_gap(a, g)));
}

inline double poincare_gap(Complex a, Complex g) {
  const double q = one_minus_mobius_sq_gap(a, g);
  const double m = std::sqrt(std::max(0.0, 1.0 - q));
  if (m < 0.5) return std::atanh(m);
  return 0.5 * (std::log1p(m) - std::log(q / (1.0 + m)));
}

/// p(1 - g1, 1 - g2) when both points hug the circle: 1 - conj(a) b = conj(g1) + g2 - conj(g1) g2.
inline double poincare_gaps(Complex g1, Complex g2) {
  const double i1 = 2.0 * g1.real() - std::norm(g1);
  const double i2 = 2.0 * g2.real() - std::norm(g2);
  if (!(i1 > 0.0) || !(i2 > 0.0)) throw std::domain_error("point outside the open disk");
  const Complex den = std::conj(g1) + g2 - std::conj(g1) * g2;
  const double q = i1 * i2 / std::norm(den);
  const double m = std::sqrt(std::max(0.0, 1.0 - q));
  if (m < 0.5) return std::atanh(m);
  return 0.5 * (std::log1p(m) - std::log(q / (1.0 + m)));
}

/// z -> e^{i theta} (z - a) / (1 - conj(a) z)
class DiskAutomorphism {
 public:
  DiskAutomorphism(DiskPoint a, double theta)
      : a_(a.value()), rotation_(std::polar(1.0, theta)) {}

  Complex operator()(Complex z) const {
    return rotation_ * (z - a_) / (1.0 - std::conj(a_) * z);
  }

  DiskPoint operator()(DiskPoint z) const { return DiskPoint((*this)(z.value())); }

  Complex center() const { return a_; }

 private:
  Complex a_;
  Complex rotation_;
};

inline DiskAutomorphism disk_automorphism(DiskPoint a, double theta) {
  return DiskAutomorphism(a, theta);
}

}  // namespace peakpoint
