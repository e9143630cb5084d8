#pragma once

// The superlinear functional Q(x, y) = -inf for y <= 0, 0 for y > 0 on R^2,
// the subspace M = {(x, 0)} with l(x, 0) = x, and the failure of every linear
// extension L = l on M to dominate Q.

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace peakpoint::hb {

/// Extended reals in {-inf} u R, with 0 * (-inf) = 0 and x + (-inf) = -inf.
inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

inline double ext_mul(double c, double q) { return c == 0.0 ? 0.0 : c * q; }
inline double ext_add(double a, double b) { return (a == neg_inf || b == neg_inf) ? neg_inf : a + b; }

struct Vec2 {
  double x = 0.0, y = 0.0;
};

inline double Q(Vec2 v) { return v.y <= 0.0 ? neg_inf : 0.0; }
inline double ell(Vec2 v) { return v.x; }  // on M only

enum class Sign { pos, zero, neg };

inline const char* to_string(Sign s) {
  return s == Sign::pos ? "y>0" : s == Sign::zero ? "y=0" : "y<0";
}

struct CaseResult {
  std::string name;
  bool passed = false;
  bool flagged = false;  // depends on the unstated 0 * (-inf) convention
  std::string detail;
};

struct SuperlinearReport {
  std::vector<CaseResult> homogeneity;  // symbolic: c > 0 with each sign of y, and c = 0
  std::vector<CaseResult> additivity;   // 9 sign patterns
  std::size_t samples_checked = 0;
  std::size_t samples_failed = 0;
  std::size_t samples_under_flag = 0;  // c = 0 samples, covered by the flagged case
  std::size_t flagged_cases = 0;
  bool all_passed = false;  // every non-flagged case and sample
};

namespace detail {

inline double rep_y(Sign s, double scale) {
  return s == Sign::pos ? scale : s == Sign::zero ? 0.0 : -scale;
}

}  // namespace detail

inline SuperlinearReport check_superlinear(const std::vector<std::pair<Vec2, double>>& scalings,
                                           const std::vector<std::pair<Vec2, Vec2>>& sums) {
  SuperlinearReport rep;
  const Sign signs[] = {Sign::pos, Sign::zero, Sign::neg};

  // Q(cv) = c Q(v): for c > 0 the sign of y is kept, so both sides agree
  for (Sign s : signs) {
    CaseResult c{std::string("c>0, ") + to_string(s), true, false, ""};
    for (double cc : {0.5, 1.0, 3.0})
      for (double mag : {0.25, 1.0, 7.0}) {
        const Vec2 v{1.0, detail::rep_y(s, mag)};
        if (Q({cc * v.x, cc * v.y}) != ext_mul(cc, Q(v))) c.passed = false;
      }
    c.detail = s == Sign::pos ? "both sides 0" : "both sides -inf";
    rep.homogeneity.push_back(c);
  }
  {
    // Q(0) = -inf while 0 * Q(v) = 0 under the convention
    CaseResult c{"c=0", false, true,
                 "Q(0,0) = -inf but 0*Q(v) = 0 with 0*(-inf) = 0; the axiom needs a convention"};
    rep.homogeneity.push_back(c);
    ++rep.flagged_cases;
  }

  // Q(v1 + v2) >= Q(v1) + Q(v2): the right side is -inf unless both y > 0,
  // and then y1 + y2 > 0 gives 0 >= 0
  for (Sign s1 : signs)
    for (Sign s2 : signs) {
      CaseResult c{std::string(to_string(s1)) + ", " + to_string(s2), true, false, ""};
      for (double m1 : {0.5, 1.0, 4.0})
        for (double m2 : {0.5, 1.0, 4.0}) {
          const Vec2 a{1.0, detail::rep_y(s1, m1)}, b{-2.0, detail::rep_y(s2, m2)};
          if (!(Q({a.x + b.x, a.y + b.y}) >= ext_add(Q(a), Q(b)))) c.passed = false;
        }
      c.detail = (s1 == Sign::pos && s2 == Sign::pos) ? "0 >= 0" : "right side -inf";
      rep.additivity.push_back(c);
    }

  for (const auto& [v, c] : scalings) {
    if (c == 0.0) {
      ++rep.samples_under_flag;
      continue;
    }
    ++rep.samples_checked;
    if (c < 0.0 || Q({c * v.x, c * v.y}) != ext_mul(c, Q(v))) ++rep.samples_failed;
  }
  for (const auto& [a, b] : sums) {
    ++rep.samples_checked;
    if (!(Q({a.x + b.x, a.y + b.y}) >= ext_add(Q(a), Q(b)))) ++rep.samples_failed;
  }

  rep.all_passed = rep.samples_failed == 0;
  for (const auto& c : rep.homogeneity)
    if (!c.flagged && !c.passed) rep.all_passed = false;
  for (const auto& c : rep.additivity)
    if (!c.passed) rep.all_passed = false;
  return rep;
}

/// l >= Q on M: Q(x, 0) = -inf for every x.
inline bool ell_dominates_on_M(const std::vector<double>& xs) {
  for (double x : xs)
    if (!(ell({x, 0.0}) >= Q({x, 0.0}))) return false;
  return true;
}

struct Witness {
  double beta = 0.0;
  Vec2 point;         // (-beta - 1, 1)
  double L = 0.0;     // alpha x + beta y with alpha = 1
  double Qv = 0.0;    // Q(point) = 0
  bool exact = false; // L == -1 in floating point
};

struct InfeasibilityReport {
  double alpha = 1.0;  // forced by L(1, 0) = l(1, 0) = 1
  std::string alpha_reason;
  std::vector<Witness> witnesses;
  std::string parametric;
  bool all_refuted = false;
};

inline InfeasibilityReport extension_infeasible(const std::vector<double>& beta_grid) {
  InfeasibilityReport rep;
  rep.alpha = ell({1.0, 0.0});
  rep.alpha_reason = "L(x,0) = alpha x must equal l(x,0) = x, so alpha = L(1,0) = 1";
  rep.parametric =
      "for every real beta, L(-beta-1, 1) = -(beta+1) + beta = -1 < 0 = Q(-beta-1, 1)";
  rep.all_refuted = true;
  for (double b : beta_grid) {
    Witness w;
    w.beta = b;
    w.point = {-b - 1.0, 1.0};
    w.L = rep.alpha * w.point.x + b * w.point.y;
    w.Qv = Q(w.point);
    w.exact = w.L == -1.0;
    if (!(w.L < w.Qv)) rep.all_refuted = false;
    rep.witnesses.push_back(w);
  }
  return rep;
}

}  // namespace peakpoint::hb
