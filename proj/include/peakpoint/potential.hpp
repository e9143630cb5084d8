#pragma once

// Newton potentials M(z) = int dmu(w) / |w - z| of measures made of atoms and
// constant-density disk patches, the disk averages used to control them near
// zeta, and the measure criterion |f(zeta)| <= int |f| dmu.

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "peakpoint/domain.hpp"
#include "peakpoint/errors.hpp"
#include "peakpoint/rng.hpp"
#include "peakpoint/scaled.hpp"

namespace peakpoint {

struct Atom {
  Complex at;
  double mass = 0.0;
};

struct Patch {
  Complex center;
  double radius = 0.0;
  double density = 0.0;

  double mass() const { return density * std::numbers::pi * radius * radius; }
};

struct Measure {
  std::vector<Atom> atoms;
  std::vector<Patch> patches;

  double total_mass() const {
    double m = 0.0;
    for (const auto& a : atoms) m += a.mass;
    for (const auto& p : patches) m += p.mass();
    return m;
  }

  double mass_at(Complex z) const {
    double m = 0.0;
    for (const auto& a : atoms)
      if (a.at == z) m += a.mass;
    return m;
  }

  void validate() const {
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (!(atoms[i].mass > 0.0) || !std::isfinite(atoms[i].mass))
        throw std::invalid_argument("atom " + std::to_string(i) + ": mass must be positive");
      for (std::size_t j = 0; j < i; ++j)
        if (atoms[i].at == atoms[j].at)
          throw std::invalid_argument("atom " + std::to_string(i) + " repeats atom " +
                                      std::to_string(j));
    }
    for (std::size_t i = 0; i < patches.size(); ++i) {
      if (!(patches[i].radius > 0.0))
        throw std::invalid_argument("patch " + std::to_string(i) + ": radius must be positive");
      if (!(patches[i].density >= 0.0) || !std::isfinite(patches[i].density))
        throw std::invalid_argument("patch " + std::to_string(i) + ": density must be >= 0");
    }
    const double m = total_mass();
    if (!(m > 0.0) || !std::isfinite(m))
      throw std::invalid_argument("measure: total mass must be finite and positive");
  }

  /// Concatenation mu1 + mu2.
  friend Measure operator+(const Measure& a, const Measure& b) {
    Measure m = a;
    m.atoms.insert(m.atoms.end(), b.atoms.begin(), b.atoms.end());
    m.patches.insert(m.patches.end(), b.patches.begin(), b.patches.end());
    return m;
  }
};

namespace detail {

template <class F>
double integrate(F&& f, double lo, double hi, double tol = 1e-13) {
  return boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, lo, hi, 12, tol);
}

}  // namespace detail

/// int_{D(c, rho)} dA(w) / |w - z| by adaptive quadrature, in polar coordinates
/// about z: the radial integral of (1/t) t dt is the chord length.
inline double patch_kernel_quadrature(Complex center, double rho, Complex z) {
  const double d = std::abs(z - center);
  if (d == 0.0) return 2.0 * std::numbers::pi * rho;
  if (d <= rho) {
    return 4.0 * detail::integrate(
                     [&](double th) {
                       const double s = std::sin(th);
                       return std::sqrt(std::max(0.0, (rho - d * s) * (rho + d * s)));
                     },
                     0.0, 0.5 * std::numbers::pi);
  }
  // chord 2 sqrt(rho^2 - d^2 sin^2 phi) for |sin phi| < rho/d; sin phi = (rho/d) sin psi
  const double k = rho / d;
  return 4.0 * (rho * rho / d) *
         detail::integrate(
             [&](double psi) {
               const double c = std::cos(psi), s = std::sin(psi);
               return c * c / std::sqrt(std::max(0.0, (1.0 - k * s) * (1.0 + k * s)));
             },
             0.0, 0.5 * std::numbers::pi);
}

/// Same integral in closed form: the angular integrals above are complete elliptic
/// integrals, 4 rho E(d/rho) inside and 4 d (E(k) - (1 - k^2) K(k)), k = rho/d, outside.
inline double patch_kernel_integral(Complex center, double rho, Complex z) {
  const double d = std::abs(z - center);
  if (d == 0.0) return 2.0 * std::numbers::pi * rho;
  if (d <= rho) return 4.0 * rho * std::comp_ellint_2(d / rho);
  const double k = rho / d;
  return 4.0 * d * (std::comp_ellint_2(k) - (1.0 - k) * (1.0 + k) * std::comp_ellint_1(k));
}

/// M(z); +infinity exactly at atoms.
inline double newton_potential(const Measure& mu, Complex z) {
  double m = 0.0;
  for (const auto& a : mu.atoms) {
    if (a.at == z) return std::numeric_limits<double>::infinity();
    m += a.mass / std::abs(a.at - z);
  }
  for (const auto& p : mu.patches)
    if (p.density > 0.0) m += p.density * patch_kernel_integral(p.center, p.radius, z);
  return m;
}

struct PotentialProfile {
  std::vector<Complex> points;
  std::vector<double> values;
  std::vector<bool> infinite;
};

inline PotentialProfile potential_profile(const Measure& mu, const std::vector<Complex>& pts) {
  PotentialProfile p;
  p.points = pts;
  for (const auto& z : pts) {
    const double v = newton_potential(mu, z);
    p.values.push_back(v);
    p.infinite.push_back(std::isinf(v));
  }
  return p;
}

/// F_r(eta) = (1/(pi r^2)) int_{D(zeta,r)} |z - zeta| / |z - eta| dA(z), always <= 2.
/// Polar coordinates about eta; along each ray the integrand is
/// sqrt((t + b)^2 + q^2) with the antiderivative (u S + q^2 asinh(u/q)) / 2.
inline double f_r_average(Complex zeta, double r, Complex eta) {
  if (!(r > 0.0)) throw std::invalid_argument("f_r_average: r must be positive");
  const double D = std::abs(eta - zeta);
  auto prim = [](double u, double q) {
    const double S = std::hypot(u, q);
    return 0.5 * (u * S + (q > 0.0 ? q * q * std::asinh(u / q) : 0.0));
  };
  double integral;
  if (D < r) {
    // phi measured from the direction towards zeta: b = -D cos phi, q = D sin phi
    integral = 2.0 * detail::integrate(
                         [&](double phi) {
                           const double q = D * std::sin(phi);
                           const double w = std::sqrt(std::max(0.0, (r - q) * (r + q)));
                           return prim(w, q) - prim(-D * std::cos(phi), q);
                         },
                         0.0, std::numbers::pi);
  } else {
    // chord through D(zeta, r): u in [-w, w]; sin phi = (r/D) sin psi
    const double k = r / D;
    integral = 2.0 * detail::integrate(
                         [&](double psi) {
                           const double s = std::sin(psi), c = std::cos(psi);
                           const double q = r * s;
                           const double w = r * c;
                           const double inner = w * r + (q > 0.0 ? q * q * std::asinh(w / q) : 0.0);
                           const double cos_phi = std::sqrt(std::max(0.0, (1.0 - k * s) * (1.0 + k * s)));
                           return inner * k * c / cos_phi;
                         },
                         0.0, 0.5 * std::numbers::pi);
  }
  return integral / (std::numbers::pi * r * r);
}

namespace detail {

/// (1/(pi r^2)) int_{D(zeta,r)} |w - zeta| K_p(w) dA(w), K_p the patch kernel integral;
/// polar coordinates about zeta, split at the radii where circles meet the patch.
inline double patch_average(const Patch& p, Complex zeta, double r) {
  const double d = std::abs(p.center - zeta);
  std::vector<double> cuts{0.0};
  for (double c : {d - p.radius, d + p.radius})
    if (c > 0.0 && c < r) cuts.push_back(c);
  cuts.push_back(r);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += integrate(
        [&](double rho) {
          if (rho == 0.0) return 0.0;
          // angles where the circle |w - zeta| = rho crosses the patch boundary
          std::vector<double> th{-std::numbers::pi, std::numbers::pi};
          if (d > 0.0) {
            const double c = (rho * rho + d * d - p.radius * p.radius) / (2.0 * rho * d);
            if (std::abs(c) < 1.0) {
              th.push_back(-std::acos(c));
              th.push_back(std::acos(c));
            }
          }
          std::sort(th.begin(), th.end());
          const double base = d > 0.0 ? std::arg(p.center - zeta) : 0.0;
          double s = 0.0;
          for (std::size_t j = 0; j + 1 < th.size(); ++j)
            s += integrate(
                [&](double t) {
                  return patch_kernel_integral(p.center, p.radius,
                                               zeta + std::polar(rho, base + t));
                },
                th[j], th[j + 1], 1e-10);
          return rho * rho * s;
        },
        cuts[i], cuts[i + 1], 1e-10);
  return p.density * total / (std::numbers::pi * r * r);
}

}  // namespace detail

/// (1/(pi r^2)) int_{D(zeta,r)} |w - zeta| M(w) dA(w) for each r. Atoms enter through
/// Fubini as m F_r(w); patches by direct quadrature of their potential.
inline std::vector<double> averaged_potential(const Measure& mu, Complex zeta,
                                              const std::vector<double>& radii) {
  std::vector<double> out;
  for (double r : radii) {
    double v = 0.0;
    for (const auto& a : mu.atoms) v += a.mass * f_r_average(zeta, r, a.at);
    for (const auto& p : mu.patches)
      if (p.density > 0.0) v += detail::patch_average(p, zeta, r);
    out.push_back(v);
  }
  return out;
}

/// Fraction of D(zeta, r) where |w - zeta| M(w) > eps, per radius (stratified sampling).
inline std::vector<double> zero_density_set(const Measure& mu, Complex zeta, double eps,
                                            const std::vector<double>& radii,
                                            RandomStream& sampler, int samples = 4096) {
  if (mu.mass_at(zeta) > 0.0)
    throw std::invalid_argument("zero_density_set: measure has an atom at zeta");
  std::vector<double> out;
  const int k = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(samples)))));
  for (double r : radii) {
    long hits = 0;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        const Complex w = disk_point(zeta, r, (i + sampler.uniform()) / k, (j + sampler.uniform()) / k);
        if (std::abs(w - zeta) * newton_potential(mu, w) > eps) ++hits;
      }
    out.push_back(static_cast<double>(hits) / (static_cast<double>(k) * k));
  }
  return out;
}

/// |f(eta) - f(zeta)| <= 2 ||f|| M(eta) |eta - zeta|
inline double modulus_bound(double f_sup, const Measure& mu, Complex zeta, Complex eta) {
  if (eta == zeta) return 0.0;
  const double M = newton_potential(mu, eta);
  if (std::isinf(M)) throw std::invalid_argument("modulus_bound: eta is an atom");
  return 2.0 * f_sup * M * std::abs(eta - zeta);
}

/// min(1, 34 (|zeta - eta1| M(eta1) + |zeta - eta2| M(eta2)))
inline double cstar_upper_34(const Measure& mu, Complex zeta, Complex eta1, Complex eta2) {
  auto term = [&](Complex eta) {
    return eta == zeta ? 0.0 : std::abs(zeta - eta) * newton_potential(mu, eta);
  };
  return std::min(1.0, 34.0 * (term(eta1) + term(eta2)));
}

struct CauchySequence {
  std::vector<Complex> points;
  std::vector<double> products;  // |zeta - eta_n| M(eta_n) <= 2^-n
  std::vector<double> radii;
};

/// eta_n in D(zeta, r_n) \ Pi(2^-n), inside the domain, r_n = r0 2^-n with
/// r0 half the ambient radius; found by rejection sampling.
inline CauchySequence cauchy_sequence(const Measure& mu, const DomainSpec& domain,
                                      RandomStream& sampler, int count = 20,
                                      int budget = 100000) {
  const Complex zeta = domain.zeta();
  if (mu.mass_at(zeta) > 0.0)
    throw std::invalid_argument("cauchy_sequence: measure has an atom at zeta");
  CauchySequence seq;
  const double r0 = 0.5 * domain.ambient().radius;
  for (int n = 1; n <= count; ++n) {
    const double rn = std::ldexp(r0, -n);
    const double target = std::ldexp(1.0, -n);
    bool found = false;
    for (int tries = 0; tries < budget && !found; ++tries) {
      const Complex w = disk_point(zeta, rn, sampler.uniform(), sampler.uniform());
      if (!contains(domain, w)) continue;
      const double prod = std::abs(w - zeta) * newton_potential(mu, w);
      if (prod <= target) {
        seq.points.push_back(w);
        seq.products.push_back(prod);
        seq.radii.push_back(rn);
        found = true;
      }
    }
    if (!found)
      throw PipelineError("potential",
                          "sampling budget exhausted at n = " + std::to_string(n));
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Measure criterion

/// A bounded holomorphic function on the domain, evaluable in absolute coordinates.
struct NamedFunction {
  std::string name;
  std::string provenance;  // coordinate-mobius, ahlfors, peak, peak-power
  std::function<Complex(Complex)> f;
};

/// int |f| dmu: atom sums plus polar Gauss-Kronrod over each patch.
inline double integrate_modulus(const Measure& mu, const std::function<Complex(Complex)>& f) {
  double v = 0.0;
  for (const auto& a : mu.atoms) v += a.mass * std::abs(f(a.at));
  for (const auto& p : mu.patches) {
    if (!(p.density > 0.0)) continue;
    v += p.density * detail::integrate(
                         [&](double rho) {
                           return rho * detail::integrate(
                                            [&](double th) {
                                              return std::abs(f(p.center + std::polar(rho, th)));
                                            },
                                            0.0, 2.0 * std::numbers::pi, 1e-10);
                         },
                         0.0, p.radius, 1e-10);
  }
  return v;
}

struct FalsifierResult {
  bool violated = false;
  std::string name;       // first violating function
  double at_zeta = 0.0;   // |f(zeta)|
  double integral = 0.0;  // int |f| dmu
  double margin = 0.0;    // |f(zeta)| - int |f| dmu
  std::size_t checked = 0;
  std::vector<std::string> warnings;
};

namespace detail {

/// {|f(zeta)|, int |f| dmu}, or nothing (with a warning) when undefined.
inline std::optional<std::pair<double, double>> falsifier_sides(const Measure& mu, Complex zeta,
                                                                const NamedFunction& t,
                                                                std::vector<std::string>& warnings) {
  double lhs = 0.0, rhs = 0.0;
  try {
    lhs = std::abs(t.f(zeta));
    rhs = integrate_modulus(mu, t.f);
  } catch (const std::exception& e) {
    warnings.push_back(t.name + " skipped: " + e.what());
    return std::nullopt;
  }
  if (!std::isfinite(lhs) || !std::isfinite(rhs)) {
    warnings.push_back(t.name + " skipped: not finite on the measure");
    return std::nullopt;
  }
  return std::pair{lhs, rhs};
}

}  // namespace detail

/// First f with |f(zeta)| > int |f| dmu + 1e-10, else "consistent with the family".
inline FalsifierResult measure_criterion_falsify(const Measure& mu, Complex zeta,
                                                 const std::vector<NamedFunction>& tests) {
  FalsifierResult res;
  for (const auto& t : tests) {
    const auto sides = detail::falsifier_sides(mu, zeta, t, res.warnings);
    if (!sides) continue;
    ++res.checked;
    const auto [lhs, rhs] = *sides;
    if (lhs > rhs + 1e-10) {
      res.violated = true;
      res.name = t.name;
      res.at_zeta = lhs;
      res.integral = rhs;
      res.margin = lhs - rhs;
      return res;
    }
  }
  return res;
}

/// The member with the largest |f(zeta)| - int |f| dmu; `violated` iff that exceeds 1e-10.
inline FalsifierResult strongest_violation(const Measure& mu, Complex zeta,
                                           const std::vector<NamedFunction>& tests) {
  FalsifierResult best;
  best.margin = -INFINITY;
  for (const auto& t : tests) {
    const auto sides = detail::falsifier_sides(mu, zeta, t, best.warnings);
    if (!sides) continue;
    ++best.checked;
    const auto [lhs, rhs] = *sides;
    if (lhs - rhs > best.margin) {
      best.name = t.name;
      best.at_zeta = lhs;
      best.integral = rhs;
      best.margin = lhs - rhs;
    }
  }
  best.violated = best.margin > 1e-10;
  return best;
}

}  // namespace peakpoint
