#pragma once

// Analytic capacity: exact values for disks and segments, enclosing-disk
// bounds for unions, and a sup-norm constrained optimizer over test functions
// holomorphic off the obstacles and vanishing at infinity.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "peakpoint/domain.hpp"
#include "peakpoint/rng.hpp"

namespace peakpoint {

/// One summand of a test function.
///   pole:      coeff / (z - center)
///   joukowski: coeff * phi((z - center) / half)^(-power), phi(u) = u + sqrt(u-1) sqrt(u+1),
///              where [center - half, center + half] is a segment.
struct TestTerm {
  enum class Kind { pole, joukowski };
  Kind kind = Kind::pole;
  Complex center{};
  Complex half{};
  int power = 1;
  Complex coeff{};

  static TestTerm pole(Complex c, Complex coeff) {
    return {Kind::pole, c, {}, 1, coeff};
  }
  static TestTerm joukowski(Complex a, Complex b, int power, Complex coeff) {
    return {Kind::joukowski, 0.5 * (a + b), 0.5 * (b - a), power, coeff};
  }

  Complex basis(Complex z) const {
    if (kind == Kind::pole) return 1.0 / (z - center);
    const Complex u = (z - center) / half;
    const Complex phi = u + std::sqrt(u - 1.0) * std::sqrt(u + 1.0);
    return std::pow(1.0 / phi, power);
  }

  Complex operator()(Complex z) const { return coeff * basis(z); }

  /// lim z * term(z) as z -> infinity; phi(u) ~ 2u.
  Complex derivative_at_infinity() const {
    if (kind == Kind::pole) return coeff;
    return power == 1 ? coeff * half / 2.0 : Complex{};
  }
};

/// f = sum of terms; f(infinity) = 0 by form.
struct TestFunction {
  std::vector<TestTerm> terms;

  Complex operator()(Complex z) const {
    Complex s{};
    for (const auto& t : terms) s += t(z);
    return s;
  }

  Complex derivative_at_infinity() const {
    Complex s{};
    for (const auto& t : terms) s += t.derivative_at_infinity();
    return s;
  }

  /// g with g(shift + k z) = f(z); g'(inf) = k f'(inf).
  TestFunction transformed(Complex k, Complex shift) const {
    TestFunction g;
    for (auto t : terms) {
      t.center = shift + k * t.center;
      if (t.kind == TestTerm::Kind::pole)
        t.coeff *= k;
      else
        t.half *= k;
      g.terms.push_back(t);
    }
    return g;
  }

  TestFunction scaled(Complex c) const {
    TestFunction g = *this;
    for (auto& t : g.terms) t.coeff *= c;
    return g;
  }
};

struct CapacityBound {
  double lower = 0.0;
  double upper = 0.0;
  bool exact = false;
  std::optional<TestFunction> witness;
};

/// Ahlfors function rho / (z - c) of a closed disk.
class AhlforsDisk {
 public:
  explicit AhlforsDisk(const Obstacle& disk) : center_(disk.center), radius_(disk.radius) {
    if (disk.kind != ObstacleKind::disk)
      throw std::invalid_argument("AhlforsDisk: obstacle is not a disk");
  }

  Complex operator()(Complex z) const {
    if (std::abs(z - center_) < radius_)
      throw std::domain_error("AhlforsDisk: evaluation inside the obstacle");
    return radius_ / (z - center_);
  }

  double derivative_at_infinity() const { return radius_; }

  TestFunction as_test_function() const {
    return {{TestTerm::pole(center_, radius_)}};
  }

 private:
  Complex center_;
  double radius_;
};

inline AhlforsDisk ahlfors_disk(const Obstacle& disk) { return AhlforsDisk(disk); }

/// Joukowski extremal function of a segment; |f| = 1 on the segment, f'(inf) = L/4.
inline TestFunction ahlfors_segment(const Obstacle& seg) {
  const Complex h = 0.5 * (seg.b - seg.a);
  return {{TestTerm::joukowski(seg.a, seg.b, 1, std::conj(h) / std::abs(h))}};
}

inline CapacityBound capacity_exact(const Obstacle& o) {
  CapacityBound c;
  c.exact = true;
  if (o.kind == ObstacleKind::disk) {
    c.lower = c.upper = o.radius;
    c.witness = ahlfors_disk(o).as_test_function();
  } else {
    c.lower = c.upper = o.length() / 4.0;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Enclosing disks

namespace detail {

inline double farthest(const std::vector<Obstacle>& obs, Complex p) {
  double m = 0.0;
  for (const auto& o : obs) m = std::max(m, o.max_distance(p));
  return m;
}

template <class F>
double golden_min(F&& f, double lo, double hi, int iters, double* arg = nullptr) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  if (arg) *arg = f1 <= f2 ? x1 : x2;
  return std::min(f1, f2);
}

}  // namespace detail

/// Radius of a (near) smallest disk containing every obstacle. Any center
/// yields a valid enclosing radius, so inexact minimization only loosens it.
inline double enclosing_radius(const std::vector<Obstacle>& obs) {
  if (obs.empty()) return 0.0;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& o : obs) {
    if (o.kind == ObstacleKind::disk) {
      x0 = std::min(x0, o.center.real() - o.radius);
      x1 = std::max(x1, o.center.real() + o.radius);
      y0 = std::min(y0, o.center.imag() - o.radius);
      y1 = std::max(y1, o.center.imag() + o.radius);
    } else {
      for (Complex e : {o.a, o.b}) {
        x0 = std::min(x0, e.real());
        x1 = std::max(x1, e.real());
        y0 = std::min(y0, e.imag());
        y1 = std::max(y1, e.imag());
      }
    }
  }
  auto inner = [&](double x) {
    return detail::golden_min([&](double y) { return detail::farthest(obs, {x, y}); }, y0, y1,
                              80);
  };
  double bx = 0.0;
  detail::golden_min(inner, x0, x1, 80, &bx);
  double by = 0.0;
  detail::golden_min([&](double y) { return detail::farthest(obs, {bx, y}); }, y0, y1, 80, &by);
  return detail::farthest(obs, {bx, by});
}

/// lower = largest single-obstacle capacity (monotonicity), upper = enclosing radius.
inline CapacityBound capacity_bounds(const std::vector<Obstacle>& obs) {
  if (obs.empty()) return {0.0, 0.0, true, std::nullopt};
  if (obs.size() == 1) return capacity_exact(obs[0]);
  CapacityBound c;
  for (const auto& o : obs) c.lower = std::max(c.lower, capacity_exact(o).lower);
  c.upper = std::max(c.lower, enclosing_radius(obs));
  return c;
}

// ---------------------------------------------------------------------------
// Numeric extremal problem

/// Boundary samples where the sup-norm constraint is imposed: `per_obstacle`
/// points on each circle, or Chebyshev points on both sides of each segment.
inline std::vector<Complex> contour_samples(const std::vector<Obstacle>& obs, int per_obstacle) {
  std::vector<Complex> pts;
  for (const auto& o : obs) {
    if (o.kind == ObstacleKind::disk) {
      for (int i = 0; i < per_obstacle; ++i)
        pts.push_back(o.center + std::polar(o.radius, 2.0 * std::numbers::pi * i / per_obstacle));
    } else {
      const Complex mid = 0.5 * (o.a + o.b);
      const Complex half = 0.5 * (o.b - o.a);
      const Complex normal = Complex(0.0, 1.0) * half / std::abs(half);
      const double offset = 1e-9 * o.length();
      const int per_side = per_obstacle / 2;
      for (int k = 0; k < per_side; ++k) {
        const double x = std::cos(std::numbers::pi * (k + 0.5) / per_side);
        const Complex p = mid + x * half;
        pts.push_back(p + offset * normal);
        pts.push_back(p - offset * normal);
      }
    }
  }
  return pts;
}

inline double sampled_sup(const TestFunction& f, const std::vector<Complex>& pts) {
  double m = 0.0;
  for (const auto& z : pts) m = std::max(m, std::abs(f(z)));
  return m;
}

/// sup |f| on a contour `density` times denser than the optimizer's.
inline double validate_witness(const TestFunction& f, const std::vector<Obstacle>& obs,
                               int density = 4) {
  return sampled_sup(f, contour_samples(obs, 256 * density));
}

namespace detail {

/// Basis with real derivative at infinity: disk -> rho/(z-c); segment -> phi^-k
/// rotated so that the k = 1 term has f'(inf) = L/4 > 0.
inline std::vector<TestTerm> capacity_basis(const std::vector<Obstacle>& obs) {
  std::vector<TestTerm> basis;
  for (const auto& o : obs) {
    if (o.kind == ObstacleKind::disk) {
      basis.push_back(TestTerm::pole(o.center, o.radius));
    } else {
      const Complex h = 0.5 * (o.b - o.a);
      for (int k = 1; k <= 3; ++k)
        basis.push_back(TestTerm::joukowski(o.a, o.b, k, std::conj(h) / std::abs(h)));
    }
  }
  return basis;
}

}  // namespace detail

/// Maximizes Re f'(inf) over combinations of the fixed basis subject to
/// max |f| <= 1 on the contour samples. `budget` counts sweeps; each sweep
/// tries +-1, +-i steps on every coefficient plus four seeded random
/// directions, rescaling infeasible candidates by their sampled sup. The
/// step halves after a sweep without progress.
inline CapacityBound capacity_lower_numeric(const std::vector<Obstacle>& obs, int budget = 200,
                                            std::uint64_t seed = 0) {
  if (obs.empty()) throw std::invalid_argument("capacity_lower_numeric: empty obstacle list");
  CapacityBound out;
  out.upper = obs.size() == 1 ? capacity_exact(obs[0]).upper : enclosing_radius(obs);
  const auto basis = detail::capacity_basis(obs);
  const std::size_t nb = basis.size();
  TestFunction zero;
  for (auto t : basis) {
    t.coeff = 0.0;
    zero.terms.push_back(t);
  }
  out.witness = zero;
  if (budget <= 0) return out;

  const auto pts = contour_samples(obs, 256);
  const std::size_t np = pts.size();
  std::vector<Complex> B(np * nb);
  std::vector<double> d(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    d[i] = basis[i].derivative_at_infinity().real();
    for (std::size_t s = 0; s < np; ++s) B[s * nb + i] = basis[i](pts[s]);
  }

  std::vector<Complex> x(nb), fx(np), cand(np), dir(nb);
  double obj = 0.0;
  RandomStream rng(seed, "capacity-directions");

  // Evaluates x + dir at every sample, rescales to the unit sup and accepts on improvement.
  auto try_dir = [&]() {
    double gain = 0.0;
    for (std::size_t i = 0; i < nb; ++i) gain += (dir[i] * d[i]).real();
    double sup = 0.0;
    for (std::size_t s = 0; s < np; ++s) {
      Complex v = fx[s];
      for (std::size_t i = 0; i < nb; ++i)
        if (dir[i] != Complex{}) v += dir[i] * B[s * nb + i];
      cand[s] = v;
      sup = std::max(sup, std::abs(v));
    }
    const double scale = sup > 1.0 ? 1.0 / sup : 1.0;
    const double value = scale * (obj + gain);
    if (!(value > obj * (1.0 + 1e-15) + 1e-300)) return false;
    for (std::size_t i = 0; i < nb; ++i) x[i] = scale * (x[i] + dir[i]);
    for (std::size_t s = 0; s < np; ++s) fx[s] = scale * cand[s];
    obj = value;
    return true;
  };

  const Complex units[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  double step = 1.0;
  for (int sweep = 0; sweep < budget && step > 1e-12; ++sweep) {
    bool improved = false;
    for (std::size_t i = 0; i < nb; ++i) {
      for (const Complex u : units) {
        std::fill(dir.begin(), dir.end(), Complex{});
        dir[i] = step * u;
        improved |= try_dir();
      }
    }
    for (int k = 0; k < 4; ++k) {
      for (auto& v : dir) v = step * Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
      improved |= try_dir();
    }
    if (!improved) step *= 0.5;
  }

  TestFunction f;
  for (std::size_t i = 0; i < nb; ++i) {
    TestTerm t = basis[i];
    t.coeff *= x[i];
    f.terms.push_back(t);
  }
  const Complex dinf = f.derivative_at_infinity();
  if (std::abs(dinf) > 0.0) f = f.scaled(std::conj(dinf) / std::abs(dinf));
  const double sup = validate_witness(f, obs);
  if (sup > 1.0) f = f.scaled(1.0 / sup);
  out.lower = std::min(out.upper, f.derivative_at_infinity().real());
  out.witness = f;
  return out;
}

}  // namespace peakpoint
