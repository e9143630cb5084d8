#pragma once

// Planar domains Omega = (ambient disk) \ (obstacles U {zeta}) and the
// annulus decomposition A_n(zeta, a) = {a^{n+1} <= |z - zeta| <= a^n}.
//
// Internally every obstacle is kept relative to zeta. Generated obstacles are
// described in annulus-normalized coordinates (z - zeta) / a^n so that
// arbitrarily deep annuli remain representable.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "peakpoint/errors.hpp"
#include "peakpoint/rng.hpp"
#include "peakpoint/scaled.hpp"

namespace peakpoint {

enum class ObstacleKind { disk, segment };

inline const char* to_string(ObstacleKind k) {
  return k == ObstacleKind::disk ? "disk" : "segment";
}

/// A closed disk or a closed segment.
struct Obstacle {
  ObstacleKind kind = ObstacleKind::disk;
  Complex center{};  // disk center, or segment midpoint
  double radius = 0.0;
  Complex a{}, b{};  // segment endpoints

  static Obstacle disk(Complex c, double r) {
    if (!(r > 0.0) || !std::isfinite(r))
      throw std::invalid_argument("disk obstacle needs a positive radius");
    Obstacle o;
    o.kind = ObstacleKind::disk;
    o.center = c;
    o.radius = r;
    return o;
  }

  static Obstacle segment(Complex p, Complex q) {
    if (p == q) throw std::invalid_argument("segment obstacle needs distinct endpoints");
    Obstacle o;
    o.kind = ObstacleKind::segment;
    o.a = p;
    o.b = q;
    o.center = 0.5 * (p + q);
    return o;
  }

  double length() const { return std::abs(b - a); }

  double area() const {
    return kind == ObstacleKind::disk ? std::numbers::pi * radius * radius : 0.0;
  }

  double distance(Complex z) const {
    if (kind == ObstacleKind::disk) return std::max(0.0, std::abs(z - center) - radius);
    const Complex d = b - a;
    const double t = std::clamp(std::real((z - a) * std::conj(d)) / std::norm(d), 0.0, 1.0);
    return std::abs(z - (a + t * d));
  }

  double max_distance(Complex z) const {
    if (kind == ObstacleKind::disk) return std::abs(z - center) + radius;
    return std::max(std::abs(z - a), std::abs(z - b));
  }

  bool contains(Complex z) const {
    if (kind == ObstacleKind::disk) return std::abs(z - center) <= radius;
    return distance(z) <= 1e-14 * length();
  }

  Obstacle translated(Complex by) const {
    Obstacle o = *this;
    o.center += by;
    o.a += by;
    o.b += by;
    return o;
  }

  /// Image under z -> k z.
  Obstacle scaled(double k) const {
    Obstacle o = *this;
    o.center *= k;
    o.radius *= k;
    o.a *= k;
    o.b *= k;
    return o;
  }
};

/// True when the two obstacles share interior points (tangent disks do not).
inline bool overlap(const Obstacle& p, const Obstacle& q) {
  if (p.kind == ObstacleKind::disk && q.kind == ObstacleKind::disk)
    return std::abs(p.center - q.center) < p.radius + q.radius;
  if (p.kind == ObstacleKind::disk) return q.distance(p.center) < p.radius;
  if (q.kind == ObstacleKind::disk) return p.distance(q.center) < q.radius;
  // two segments
  auto cross = [](Complex u, Complex v) { return u.real() * v.imag() - u.imag() * v.real(); };
  const double d1 = cross(q.b - q.a, p.a - q.a);
  const double d2 = cross(q.b - q.a, p.b - q.a);
  const double d3 = cross(p.b - p.a, q.a - p.a);
  const double d4 = cross(p.b - p.a, q.b - p.a);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  return p.distance(q.a) == 0.0 || p.distance(q.b) == 0.0 || q.distance(p.a) == 0.0 ||
         q.distance(p.b) == 0.0;
}

struct Ambient {
  Complex center{0.0, 0.0};
  double radius = 1.0;
};

/// Per-annulus obstacle law r_n = C a^{beta n}, placed concentrically in
/// A_n(zeta, a) along the positive real direction.
struct GeneratorRule {
  ObstacleKind kind = ObstacleKind::disk;
  double C = 0.5;
  double beta = 1.0;
  int horizon = 100;
};

class DomainSpec {
 public:
  static DomainSpec with_obstacles(Ambient ambient, Complex zeta, double ratio_a,
                                   std::vector<Obstacle> obstacles) {
    DomainSpec d(ambient, zeta, ratio_a);
    d.relative_.reserve(obstacles.size());
    for (const auto& o : obstacles) d.relative_.push_back(o.translated(-zeta));
    d.obstacles_ = std::move(obstacles);
    d.horizon_ = explicit_horizon(ratio_a);
    d.validate_explicit();
    return d;
  }

  static DomainSpec with_generator(Ambient ambient, Complex zeta, double ratio_a,
                                   GeneratorRule rule) {
    DomainSpec d(ambient, zeta, ratio_a);
    if (!(rule.C > 0.0) || !std::isfinite(rule.C))
      throw std::invalid_argument("generator C must be positive");
    if (!(rule.beta >= 1.0) || !std::isfinite(rule.beta))
      throw std::invalid_argument("generator beta must be >= 1");
    if (rule.horizon < 1) throw std::invalid_argument("generator horizon must be >= 1");
    d.generator_ = rule;
    d.horizon_ = rule.horizon;
    d.validate_generator();
    return d;
  }

  /// Same domain description with a different annulus ratio (revalidated).
  DomainSpec with_ratio(double ratio_a) const {
    if (generator_) return with_generator(ambient_, zeta_, ratio_a, *generator_);
    return with_obstacles(ambient_, zeta_, ratio_a, obstacles_);
  }

  const Ambient& ambient() const { return ambient_; }
  Complex zeta() const { return zeta_; }
  double ratio_a() const { return ratio_a_; }
  int horizon() const { return horizon_; }
  bool is_generated() const { return generator_.has_value(); }
  const std::optional<GeneratorRule>& generator() const { return generator_; }
  const std::vector<Obstacle>& obstacles() const { return obstacles_; }
  /// Explicit obstacles translated so that zeta is the origin.
  const std::vector<Obstacle>& relative_obstacles() const { return relative_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// a^n
  ScaledReal annulus_scale(std::int64_t n) const { return scaled_pow(ratio_a_, n); }

  /// Size (disk radius or segment half-length) of generated obstacle n,
  /// divided by a^n, after clipping to the annulus.
  ScaledReal generated_size(std::int64_t n) const {
    const GeneratorRule& g = *generator_;
    const ScaledReal law =
        ScaledReal::from_log2((g.beta - 1.0) * static_cast<double>(n) * std::log2(ratio_a_)) *
        g.C;
    const ScaledReal cap = ScaledReal::from(max_generated_size());
    return cap < law ? cap : law;
  }

  /// Unclipped size law C a^{(beta-1) n}.
  double generated_law(std::int64_t n) const {
    const GeneratorRule& g = *generator_;
    return g.C * std::pow(ratio_a_, (g.beta - 1.0) * static_cast<double>(n));
  }

  /// Largest admissible normalized size: the obstacle then touches both circles.
  double max_generated_size() const { return 0.5 * (1.0 - ratio_a_); }

  /// Normalized center of generated obstacle n, (z - zeta) / a^n.
  double generated_center() const { return 0.5 * (1.0 + ratio_a_); }

  /// Generated obstacle n in coordinates (z - zeta) / a^n; nullopt when it
  /// cannot be resolved in double precision at that scale.
  std::optional<Obstacle> generated_normalized(std::int64_t n) const {
    const double s = generated_size(n).to_double();
    if (!(s > std::numeric_limits<double>::min())) return std::nullopt;
    const double c = generated_center();
    if (generator_->kind == ObstacleKind::disk) return Obstacle::disk({c, 0.0}, s);
    if (c - s == c + s) return std::nullopt;
    return Obstacle::segment({c - s, 0.0}, {c + s, 0.0});
  }

 private:
  DomainSpec(Ambient ambient, Complex zeta, double ratio_a)
      : ambient_(ambient), zeta_(zeta), ratio_a_(ratio_a) {
    if (!(ambient.radius > 0.0) || !std::isfinite(ambient.radius))
      throw std::invalid_argument("ambient radius must be positive");
    if (!(ratio_a > 0.0 && ratio_a < 1.0))
      throw std::invalid_argument("ratio_a must lie in (0, 1)");
    if (std::abs(zeta - ambient.center) > ambient.radius * (1.0 + 1e-12))
      throw std::invalid_argument("zeta must lie in the closed ambient disk");
  }

  static int explicit_horizon(double a) {
    return static_cast<int>(std::floor(std::log(1e-290) / std::log(a))) - 1;
  }

  void validate_explicit() {
    for (std::size_t i = 0; i < obstacles_.size(); ++i) {
      const Obstacle& o = obstacles_[i];
      const std::string tag = "obstacle " + std::to_string(i);
      if (o.max_distance(ambient_.center) > ambient_.radius)
        throw std::invalid_argument(tag + " leaves the ambient disk");
      if (!(relative_[i].distance({0.0, 0.0}) > 0.0))
        throw std::invalid_argument(tag + " contains zeta");
      for (std::size_t j = 0; j < i; ++j)
        if (overlap(o, obstacles_[j]))
          throw std::invalid_argument(tag + " overlaps obstacle " + std::to_string(j));
    }
  }

  void validate_generator() {
    const GeneratorRule& g = *generator_;
    int clipped = 0;
    for (int n = 1; n <= g.horizon; ++n) {
      if (generated_law(n) > max_generated_size())
        ++clipped;
      else
        break;
    }
    if (clipped > 0)
      warnings_.push_back("generator size clipped to the annulus width at annuli 1.." +
                          std::to_string(clipped));
    const double dist = std::abs(zeta_ - ambient_.center);
    for (int n = 1; n <= g.horizon; ++n) {
      const double an = std::pow(ratio_a_, n);
      if (dist + an <= ambient_.radius) break;
      const auto o = generated_normalized(n);
      if (o && o->scaled(an).translated(zeta_).max_distance(ambient_.center) > ambient_.radius)
        throw std::invalid_argument("generated obstacle " + std::to_string(n) +
                                    " leaves the ambient disk");
    }
  }

  Ambient ambient_;
  Complex zeta_;
  double ratio_a_;
  int horizon_ = 0;
  std::vector<Obstacle> obstacles_;
  std::vector<Obstacle> relative_;
  std::optional<GeneratorRule> generator_;
  std::vector<std::string> warnings_;
};

// ---------------------------------------------------------------------------
// Membership

namespace detail {

inline bool inside_ambient_offset(const DomainSpec& d, const ScaledComplex& w) {
  const Complex off = d.zeta() - d.ambient().center;
  const double R = d.ambient().radius;
  if (w.representable()) return std::abs(off + w.to_complex()) < R;
  // |w| is far below double resolution of zeta itself.
  const double margin = R * R - std::norm(off);
  if (margin > 0.0) return true;
  return std::real(std::conj(off) * w.mantissa) < 0.0;
}

/// Annulus index k with a^{k+1} <= |w| <= a^k (up to rounding).
inline std::int64_t annulus_index(const DomainSpec& d, const ScaledReal& radius) {
  return static_cast<std::int64_t>(std::floor(radius.log2() / std::log2(d.ratio_a())));
}

}  // namespace detail

/// Membership of zeta + w, for an offset w from zeta.
inline bool contains_offset(const DomainSpec& d, const ScaledComplex& w) {
  if (w.is_zero()) return false;
  if (!detail::inside_ambient_offset(d, w)) return false;
  if (d.is_generated()) {
    const std::int64_t k = detail::annulus_index(d, w.abs());
    for (std::int64_t n = std::max<std::int64_t>(1, k - 1);
         n <= std::min<std::int64_t>(d.horizon(), k + 1); ++n) {
      const auto o = d.generated_normalized(n);
      if (o && o->contains(ratio(w, d.annulus_scale(n)))) return false;
    }
    return true;
  }
  if (!w.representable()) return true;
  const Complex z = w.to_complex();
  for (const auto& o : d.relative_obstacles())
    if (o.contains(z)) return false;
  return true;
}

inline bool contains_offset(const DomainSpec& d, Complex w) {
  return contains_offset(d, ScaledComplex::from(w));
}

/// z in Omega: inside the open ambient disk, not zeta, in no closed obstacle.
inline bool contains(const DomainSpec& d, Complex z) {
  return contains_offset(d, ScaledComplex::from(z - d.zeta()));
}

// ---------------------------------------------------------------------------
// Annuli

/// Obstacles of one annulus in coordinates (z - zeta) / a^n.
struct AnnulusContent {
  int n = 0;
  std::vector<Obstacle> inside;   // contained in A_n
  std::vector<Obstacle> partial;  // meeting A_n without being contained
  bool exterior = false;          // A_n leaves the ambient disk
  double exterior_lower = 0.0;    // capacity lower bound of that exterior part
  bool negligible = false;        // a generated obstacle too small to represent
};

namespace detail {

inline void check_horizon(const DomainSpec& d, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("annulus index must be nonnegative");
  if (n > d.horizon()) throw HorizonExceeded(static_cast<int>(n), d.horizon());
}

}  // namespace detail

inline AnnulusContent annulus_content(const DomainSpec& d, int n) {
  detail::check_horizon(d, n);
  AnnulusContent out;
  out.n = n;
  const double a = d.ratio_a();
  const double dist = std::abs(d.zeta() - d.ambient().center);
  const double R = d.ambient().radius;
  const ScaledReal scale = d.annulus_scale(n);
  const double an = scale.to_double();
  const double margin = R - dist;
  if (margin <= 0.0 || ScaledReal::from(margin) < scale) {
    out.exterior = true;
    const double start = std::max(a, ratio(ScaledReal::from(margin), scale));
    out.exterior_lower = std::max(0.0, 1.0 - start) / 4.0;
  }
  if (d.is_generated()) {
    if (n >= 1) {
      if (auto o = d.generated_normalized(n))
        out.inside.push_back(*o);
      else
        out.negligible = true;
    }
    return out;
  }
  const double inner = an * a;
  for (const auto& o : d.relative_obstacles()) {
    const double lo = o.distance({0.0, 0.0});
    const double hi = o.max_distance({0.0, 0.0});
    if (!(lo < an && hi > inner)) continue;
    const Obstacle normalized = o.scaled(1.0 / an);
    if (lo >= inner && hi <= an)
      out.inside.push_back(normalized);
    else
      out.partial.push_back(normalized);
  }
  return out;
}

/// Obstacles whose closure meets A_n(zeta, a), in absolute coordinates.
inline std::vector<Obstacle> annulus_obstacles(const DomainSpec& d, int n) {
  detail::check_horizon(d, n);
  std::vector<Obstacle> out;
  if (d.is_generated()) {
    if (n < 1) return out;
    const ScaledReal size = d.generated_size(n) * d.annulus_scale(n);
    const double s = size.to_double();
    if (!(s > std::numeric_limits<double>::min()))
      throw PipelineError("domain", "obstacle " + std::to_string(n) +
                                        " is not representable in double precision");
    const double an = d.annulus_scale(n).to_double();
    return {d.generated_normalized(n)->scaled(an).translated(d.zeta())};
  }
  const double an = std::pow(d.ratio_a(), n);
  const double inner = an * d.ratio_a();
  for (std::size_t i = 0; i < d.obstacles().size(); ++i) {
    const Obstacle& rel = d.relative_obstacles()[i];
    if (rel.distance({0.0, 0.0}) < an && rel.max_distance({0.0, 0.0}) > inner)
      out.push_back(d.obstacles()[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Areas

/// Area of the intersection of two disks with radii r1, r2 and center distance dist.
inline double lens_area(double r1, double r2, double dist) {
  if (dist >= r1 + r2) return 0.0;
  const double rmin = std::min(r1, r2);
  if (dist <= std::abs(r1 - r2)) return std::numbers::pi * rmin * rmin;
  const double c1 = std::clamp((dist * dist + r1 * r1 - r2 * r2) / (2.0 * dist * r1), -1.0, 1.0);
  const double c2 = std::clamp((dist * dist + r2 * r2 - r1 * r1) / (2.0 * dist * r2), -1.0, 1.0);
  const double k = (-dist + r1 + r2) * (dist + r1 - r2) * (dist - r1 + r2) * (dist + r1 + r2);
  return r1 * r1 * std::acos(c1) + r2 * r2 * std::acos(c2) - 0.5 * std::sqrt(std::max(0.0, k));
}

struct AreaEstimate {
  double area = 0.0;        // total estimate of L(D(zeta, r) \ Omega)
  double exact_part = 0.0;  // closed-form contributions
  double sampled_part = 0.0;
  double sampled_sigma = 0.0;  // one standard deviation of the sampled part
  int partial_obstacles = 0;
};

/// L(D(zeta, r) \ Omega): closed forms for obstacles inside D(zeta, r) and for
/// the part outside the ambient disk; stratified sampling for obstacles cut by
/// the circle |z - zeta| = r.
inline AreaEstimate complement_area(const DomainSpec& d, double r, RandomStream& sampler,
                                    int samples = 100000) {
  if (!(r > 0.0) || r > d.ambient().radius)
    throw std::invalid_argument("complement_area: radius must lie in (0, ambient radius]");
  AreaEstimate est;
  const double dist = std::abs(d.zeta() - d.ambient().center);
  est.exact_part += std::numbers::pi * r * r - lens_area(r, d.ambient().radius, dist);

  std::vector<Obstacle> partial;
  auto account = [&](const Obstacle& rel) {
    if (rel.kind != ObstacleKind::disk) return;
    if (rel.max_distance({0.0, 0.0}) <= r)
      est.exact_part += rel.area();
    else if (rel.distance({0.0, 0.0}) < r)
      partial.push_back(rel);
  };
  if (d.is_generated()) {
    if (d.generator()->kind == ObstacleKind::disk) {
      for (int n = 1; n <= d.horizon(); ++n) {
        const ScaledReal an = d.annulus_scale(n);
        const ScaledReal size = d.generated_size(n) * an;
        const double outer = (an * (d.generated_center())).to_double() + size.to_double();
        const double inner = (an * (d.generated_center())).to_double() - size.to_double();
        if (inner >= r) continue;
        if (outer <= r) {
          const double s = size.to_double();
          est.exact_part += std::numbers::pi * s * s;
        } else {
          const double an_d = an.to_double();
          partial.push_back(d.generated_normalized(n)->scaled(an_d));
        }
      }
    }
  } else {
    for (const auto& o : d.relative_obstacles()) account(o);
  }

  est.partial_obstacles = static_cast<int>(partial.size());
  if (!partial.empty()) {
    const int k = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(samples)))));
    long hits = 0;
    const long total = static_cast<long>(k) * k;
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        const double u = (i + sampler.uniform()) / k;
        const double v = (j + sampler.uniform()) / k;
        const Complex z = disk_point({0.0, 0.0}, r, u, v);
        for (const auto& o : partial)
          if (o.contains(z)) {
            ++hits;
            break;
          }
      }
    }
    const double p = static_cast<double>(hits) / static_cast<double>(total);
    const double disk = std::numbers::pi * r * r;
    est.sampled_part = disk * p;
    est.sampled_sigma = disk * std::sqrt(p * (1.0 - p) / static_cast<double>(total));
  }
  est.area = est.exact_part + est.sampled_part;
  return est;
}

// ---------------------------------------------------------------------------
// Sample grid

struct GridOptions {
  int depth = 48;      // deepest annulus index sampled
  int angular = 64;    // points per circle
  int radial = 8;      // circles per annulus
  int boundary = 512;  // points on the ambient circle
  double boundary_offset = 1e-6;
};

/// Points of Omega as offsets from zeta: `angular` x `radial` points in every
/// annulus from the one enclosing the ambient disk down to `depth`, plus points
/// just inside the ambient circle. Obstacle hits are rejected.
inline std::vector<Complex> sample_grid(const DomainSpec& d, const GridOptions& opt = {}) {
  std::vector<Complex> pts;
  const double a = d.ratio_a();
  const double reach = std::abs(d.zeta() - d.ambient().center) + d.ambient().radius;
  const int n_min = reach > 1.0 ? -static_cast<int>(std::ceil(std::log(reach) / -std::log(a))) : 0;
  for (int n = n_min; n <= opt.depth; ++n) {
    const double inner = std::pow(a, n + 1);
    for (int l = 0; l < opt.radial; ++l) {
      const double rho = inner * std::pow(a, -(l + 0.5) / opt.radial);
      for (int i = 0; i < opt.angular; ++i) {
        const Complex w = std::polar(rho, 2.0 * std::numbers::pi * i / opt.angular);
        if (contains_offset(d, w)) pts.push_back(w);
      }
    }
  }
  const double rb = d.ambient().radius - opt.boundary_offset;
  for (int i = 0; i < opt.boundary; ++i) {
    const Complex z = d.ambient().center + std::polar(rb, 2.0 * std::numbers::pi * i / opt.boundary);
    const Complex w = z - d.zeta();
    if (contains_offset(d, w)) pts.push_back(w);
  }
  return pts;
}

}  // namespace peakpoint
