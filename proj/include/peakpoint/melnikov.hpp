#pragma once

// Melnikov series sum_n gamma(A_n(zeta,a) \ Omega) / a^n with lower/upper
// bounds per term, three-way classification and the Lebesgue density test.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "peakpoint/capacity.hpp"
#include "peakpoint/domain.hpp"
#include "peakpoint/report.hpp"
#include "peakpoint/rng.hpp"

namespace peakpoint {

enum class Classification { peak_divergent, nonpeak_convergent_heuristic, inconclusive };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::peak_divergent:
      return "PEAK_DIVERGENT";
    case Classification::nonpeak_convergent_heuristic:
      return "NONPEAK_CONVERGENT_HEURISTIC";
    default:
      return "INCONCLUSIVE";
  }
}

struct SeriesTerm {
  int n = 0;
  double lower = 0.0;  // lower bound of gamma(A_n \ Omega) / a^n
  double upper = 0.0;
  bool exact = false;
};

struct SeriesReport {
  double ratio_a = 0.0;
  int horizon = 0;
  std::vector<SeriesTerm> terms;
  std::vector<double> sum_lower;
  std::vector<double> sum_upper;
  Classification classification = Classification::inconclusive;
  std::string evidence;
  double threshold = 0.0;
  std::optional<double> closed_form_term;  // constant term of a beta = 1 generator
  std::optional<double> closed_form_sum;   // sum of the unclipped generator law
  std::optional<double> upper_total;       // upper bound of the whole series
  std::vector<std::string> warnings;
};

/// Term bounds for one annulus, in units of a^n.
inline SeriesTerm series_term(const DomainSpec& d, int n) {
  SeriesTerm t;
  t.n = n;
  const AnnulusContent c = annulus_content(d, n);
  if (c.negligible) {
    // generated obstacle below double resolution at its own scale
    const double s = d.generated_size(n).to_double();
    t.lower = t.upper = d.generator()->kind == ObstacleKind::disk ? s : s / 2.0;
    t.exact = true;
  } else {
    std::vector<Obstacle> all = c.inside;
    all.insert(all.end(), c.partial.begin(), c.partial.end());
    const CapacityBound b = capacity_bounds(all);
    // a cut obstacle only contributes its part inside A_n: no lower bound from it
    t.lower = c.partial.empty() ? b.lower : capacity_bounds(c.inside).lower;
    t.upper = b.upper;
    t.exact = b.exact && c.partial.empty();
  }
  if (c.exterior) {
    t.lower = std::max(t.lower, c.exterior_lower);
    t.upper = 1.0;
    t.exact = false;
  }
  t.upper = std::min(t.upper, 1.0);
  t.lower = std::min(t.lower, t.upper);
  return t;
}

inline SeriesReport series_terms(const DomainSpec& d, int N) {
  SeriesReport r;
  r.ratio_a = d.ratio_a();
  r.horizon = N;
  r.warnings = d.warnings();
  double lo = 0.0, hi = 0.0;
  for (int n = 1; n <= N; ++n) {
    const SeriesTerm t = series_term(d, n);
    lo += t.lower;
    hi += t.upper;
    r.terms.push_back(t);
    r.sum_lower.push_back(lo);
    r.sum_upper.push_back(hi);
  }
  return r;
}

inline SeriesReport classify(const DomainSpec& d, int N, double threshold = 10.0) {
  SeriesReport r = series_terms(d, N);
  r.threshold = threshold;
  const double lower = r.sum_lower.empty() ? 0.0 : r.sum_lower.back();
  const double upper = r.sum_upper.empty() ? 0.0 : r.sum_upper.back();
  const double dist = std::abs(d.zeta() - d.ambient().center);
  const bool interior = dist < d.ambient().radius;
  const double a = d.ratio_a();
  const std::string lower_txt = "lower partial sum " + format_double(lower) + " at N=" +
                                std::to_string(N);

  if (auto g = d.generator()) {
    const double kind_factor = g->kind == ObstacleKind::disk ? 1.0 : 0.5;
    if (g->beta == 1.0) {
      r.closed_form_term = kind_factor * std::min(g->C, d.max_generated_size());
    } else {
      const double q = std::pow(a, g->beta - 1.0);
      r.closed_form_sum = kind_factor * g->C * q / (1.0 - q);
      if (interior) {
        // terms past N are bounded by the law; the exterior part ends once a^n < R - dist
        const double tail = kind_factor * g->C * std::pow(q, N + 1) / (1.0 - q);
        if (std::pow(a, N + 1) < d.ambient().radius - dist) r.upper_total = upper + tail;
      }
    }
  } else if (interior && N == d.horizon()) {
    r.upper_total = upper;
  } else if (interior && upper == 0.0) {
    // obstacles lie inside A_1..A_N only if they reach within a^N of zeta
    double gap = INFINITY;
    for (const auto& o : d.relative_obstacles()) gap = std::min(gap, o.distance({0.0, 0.0}));
    if (gap > std::pow(a, N + 1) && std::pow(a, N + 1) < d.ambient().radius - dist)
      r.upper_total = 0.0;
  }

  if (lower >= threshold) {
    r.classification = Classification::peak_divergent;
    r.evidence = lower_txt + " >= threshold " + format_double(threshold);
  } else if (r.closed_form_term && *r.closed_form_term > 0.0) {
    r.classification = Classification::peak_divergent;
    r.evidence = "generator law with beta = 1: every term equals " +
                 format_double(*r.closed_form_term) + " > 0, so the series diverges; " + lower_txt;
  } else if (d.is_generated() && r.closed_form_sum && r.upper_total) {
    r.classification = Classification::nonpeak_convergent_heuristic;
    r.evidence = "generator law sum C q/(1-q) = " + format_double(*r.closed_form_sum) +
                 " with q = a^(beta-1); series upper bound " + format_double(*r.upper_total) +
                 " (heuristic: convergence suggests a representing measure, not proved here)";
  } else if (!d.is_generated() && r.upper_total && *r.upper_total == 0.0) {
    r.classification = Classification::nonpeak_convergent_heuristic;
    r.evidence = "every term vanishes: zeta is an isolated boundary point (heuristic label)";
  } else {
    r.classification = Classification::inconclusive;
    r.evidence = lower_txt + " below threshold " + format_double(threshold) +
                 "; finitely many terms cannot certify divergence";
  }
  return r;
}

inline CsvTable series_csv(const SeriesReport& r) {
  CsvTable t;
  t.header = {"n", "term_lower", "term_upper", "sum_lower", "sum_upper", "exact"};
  for (std::size_t i = 0; i < r.terms.size(); ++i) {
    const auto& s = r.terms[i];
    t.add_row({std::to_string(s.n), format_double(s.lower), format_double(s.upper),
               format_double(r.sum_lower[i]), format_double(r.sum_upper[i]),
               s.exact ? "1" : "0"});
  }
  return t;
}

struct DensityResult {
  std::vector<double> radii;
  std::vector<double> estimates;  // L(D(zeta,r) \ Omega) / (pi r^2)
  bool positive_limsup = false;
};

/// Area density of the complement at zeta along decreasing radii. The limsup
/// is declared positive when the largest estimate over the smallest quarter of
/// the radii exceeds 0.01.
inline DensityResult density_test(const DomainSpec& d, const std::vector<double>& radii,
                                  RandomStream& sampler, int samples = 100000) {
  DensityResult out;
  out.radii = radii;
  for (double r : radii) {
    const AreaEstimate e = complement_area(d, r, sampler, samples);
    out.estimates.push_back(e.area / (std::numbers::pi * r * r));
  }
  const std::size_t q = (radii.size() + 3) / 4;
  double best = 0.0;
  for (std::size_t i = radii.size() - q; i < radii.size(); ++i)
    best = std::max(best, out.estimates[i]);
  out.positive_limsup = !radii.empty() && best > 0.01;
  return out;
}

}  // namespace peakpoint
