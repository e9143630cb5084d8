#pragma once

// Caratheodory distances through explicit test families, blow-up certificates
// along sequences tending to zeta, and the chain of equivalent conditions run
// end to end on one domain.

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "peakpoint/capacity.hpp"
#include "peakpoint/domain.hpp"
#include "peakpoint/errors.hpp"
#include "peakpoint/hyperbolic.hpp"
#include "peakpoint/melnikov.hpp"
#include "peakpoint/peakfn.hpp"
#include "peakpoint/potential.hpp"
#include "peakpoint/report.hpp"

namespace peakpoint {

using TestFamily = std::vector<NamedFunction>;

/// Coordinate maps of the ambient disk, Ahlfors witnesses of the obstacles
/// (generated ones up to annulus `generated_annuli`), and h^k, k = 1..max_power.
inline TestFamily default_test_family(const DomainSpec& d, const PeakFunction* peak = nullptr,
                                      int max_power = 64, int generated_annuli = 8) {
  TestFamily fam;
  const Complex c = d.ambient().center;
  const double R = d.ambient().radius;
  fam.push_back({"coordinate", "coordinate-mobius", [c, R](Complex z) { return (z - c) / R; }});
  const Complex u0 = (d.zeta() - c) / R;
  if (std::abs(u0) < 1.0) {
    const DiskAutomorphism phi(DiskPoint(u0), 0.0);
    fam.push_back({"coordinate-mobius-zeta", "coordinate-mobius",
                   [c, R, phi](Complex z) { return phi((z - c) / R); }});
  }

  auto add_witness = [&fam](const Obstacle& o, const std::string& name) {
    TestFunction f = o.kind == ObstacleKind::disk ? ahlfors_disk(o).as_test_function()
                                                  : ahlfors_segment(o);
    fam.push_back({name, "ahlfors", [f](Complex z) { return f(z); }});
  };
  if (d.is_generated()) {
    for (int n = 1; n <= std::min(generated_annuli, d.horizon()); ++n) {
      const auto obs = annulus_obstacles(d, n);
      for (std::size_t i = 0; i < obs.size(); ++i)
        add_witness(obs[i], "ahlfors-annulus-" + std::to_string(n) +
                                (obs.size() > 1 ? "-" + std::to_string(i) : ""));
    }
  } else {
    for (std::size_t i = 0; i < d.obstacles().size(); ++i)
      add_witness(d.obstacles()[i], "ahlfors-obstacle-" + std::to_string(i));
  }

  if (peak) {
    const Complex zeta = d.zeta();
    const auto pf = std::make_shared<const PeakFunction>(*peak);
    fam.push_back({"peak", "peak", [pf, zeta](Complex z) { return (*pf)(z - zeta); }});
    for (int k = 2; k <= max_power; ++k)
      fam.push_back({"peak^" + std::to_string(k), "peak-power", [pf, zeta, k](Complex z) {
                       return std::pow((*pf)(z - zeta), k);
                     }});
  }
  return fam;
}

/// Largest |f| over the points for each member (absolute coordinates).
inline std::vector<double> family_sup(const TestFamily& fam, const std::vector<Complex>& pts) {
  std::vector<double> out;
  for (const auto& m : fam) {
    double s = 0.0;
    for (const auto& z : pts) s = std::max(s, std::abs(m.f(z)));
    out.push_back(s);
  }
  return out;
}

struct DistanceBound {
  double value = 0.0;
  std::string member;  // maximizer
};

namespace detail {

template <class Metric>
DistanceBound family_max(const DomainSpec& d, Complex z1, Complex z2, const TestFamily& fam,
                         Metric metric) {
  if (fam.empty()) throw std::invalid_argument("empty test family");
  if (!contains(d, z1) || !contains(d, z2))
    throw std::invalid_argument("distance bounds need both points in the domain");
  DistanceBound b;
  b.member = fam.front().name;
  for (const auto& m : fam) {
    const Complex f1 = m.f(z1), f2 = m.f(z2);
    if (!(std::abs(f1) < 1.0) || !(std::abs(f2) < 1.0))
      throw PipelineError("cdist", "test function " + m.name + " leaves the unit disk");
    const double v = metric(f1, f2);
    if (v > b.value) {
      b.value = v;
      b.member = m.name;
    }
  }
  return b;
}

}  // namespace detail

/// max over the family of m(f(z1), f(z2)) <= c*(z1, z2)
inline DistanceBound cstar_lower_detail(const DomainSpec& d, Complex z1, Complex z2,
                                        const TestFamily& fam) {
  return detail::family_max(d, z1, z2, fam, [](Complex a, Complex b) { return mobius(a, b); });
}

inline double cstar_lower(const DomainSpec& d, Complex z1, Complex z2, const TestFamily& fam) {
  return cstar_lower_detail(d, z1, z2, fam).value;
}

/// max over the family of p(f(z1), f(z2)) <= c(z1, z2)
inline double c_lower(const DomainSpec& d, Complex z1, Complex z2, const TestFamily& fam) {
  return detail::family_max(d, z1, z2, fam, [](Complex a, Complex b) { return poincare(a, b); })
      .value;
}

// ---------------------------------------------------------------------------

enum class Verdict { none, diverges, not_cauchy, cauchy_upper };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::diverges:
      return "DIVERGES";
    case Verdict::not_cauchy:
      return "NOT_CAUCHY";
    case Verdict::cauchy_upper:
      return "CAUCHY_UPPER";
    default:
      return "NONE";
  }
}

struct BlowupCertificate {
  Complex zeta{};
  Complex z0{};
  std::string witness;
  std::vector<ScaledComplex> sequence;  // z_nu - zeta
  std::vector<Complex> h_values;
  std::vector<double> values;  // p(h(z0), h(z_nu)), or tail upper bounds for c*
  std::vector<double> thresholds;
  std::vector<int> tail_index;  // per threshold: first index from which all values exceed it, or -1
  Verdict verdict = Verdict::none;
};

/// First index i with values[j] > T for all j >= i, or -1.
inline int tail_above(const std::vector<double>& v, double T) {
  int idx = -1;
  for (int i = static_cast<int>(v.size()) - 1; i >= 0 && v[i] > T; --i) idx = i;
  return idx;
}

struct NotCauchyEvidence {
  std::vector<int> first;        // nu
  std::vector<double> distance;  // lower bound of c(z_nu, z_2nu)
  double minimum = 0.0;
};

/// c(z_nu, z_2nu) >= p(h(z_nu), h(z_2nu)) for nu from a quarter to half of the sequence.
inline NotCauchyEvidence not_cauchy_evidence(const PeakFunction& peak,
                                             const std::vector<ScaledComplex>& seq) {
  NotCauchyEvidence e;
  e.minimum = INFINITY;
  const int n = static_cast<int>(seq.size());
  for (int nu = std::max(1, n / 4); 2 * nu <= n; ++nu) {
    const double v = poincare_gaps(peak.gap(seq[nu - 1]), peak.gap(seq[2 * nu - 1]));
    e.first.push_back(nu);
    e.distance.push_back(v);
    e.minimum = std::min(e.minimum, v);
  }
  if (e.first.empty()) e.minimum = 0.0;
  return e;
}

/// p(h(z0), h(z_nu)) along the sequence; DIVERGES when every threshold is
/// eventually exceeded for good (up to the sequence length), else NOT_CAUCHY when
/// the pairs (z_nu, z_2nu) stay more than 0.1 apart.
inline BlowupCertificate blowup_certificate(const DomainSpec& d, Complex z0,
                                            const std::vector<ScaledComplex>& sequence,
                                            const PeakFunction& peak,
                                            const PeakCertificate* verified,
                                            const std::vector<double>& thresholds) {
  if (!verified) throw PipelineError("cdist", "blowup_certificate needs a verified peak function");
  if (!contains(d, z0)) throw std::invalid_argument("blowup_certificate: z0 outside the domain");
  BlowupCertificate c;
  c.zeta = d.zeta();
  c.z0 = z0;
  c.witness = "peak";
  c.sequence = sequence;
  c.thresholds = thresholds;
  const Complex g0 = peak.gap(ScaledComplex::from(z0 - d.zeta()));
  for (const auto& w : sequence) {
    const Complex g = peak.gap(w);
    c.h_values.push_back(1.0 - g);
    c.values.push_back(g == g0 ? 0.0 : poincare_gaps(g0, g));
  }
  bool all = !thresholds.empty() && !sequence.empty();
  for (double T : thresholds) {
    c.tail_index.push_back(tail_above(c.values, T));
    if (c.tail_index.back() < 0) all = false;
  }
  if (all)
    c.verdict = Verdict::diverges;
  else if (!thresholds.empty() && sequence.size() >= 2 &&
           not_cauchy_evidence(peak, sequence).minimum > 0.1)
    c.verdict = Verdict::not_cauchy;
  return c;
}

/// Columns nu, dist, h_re, h_im, p.
inline CsvTable certificate_csv(const BlowupCertificate& c) {
  CsvTable t;
  t.header = {"nu", "dist", "h_re", "h_im", "p"};
  for (std::size_t i = 0; i < c.sequence.size(); ++i)
    t.add_row({std::to_string(i + 1), format_scaled(c.sequence[i].abs()),
               format_double(c.h_values[i].real()), format_double(c.h_values[i].imag()),
               format_double(c.values[i])});
  return t;
}

/// values[k] bounds c* over every pair eta_m, eta_n with k < m < n (1-based),
/// so the tail diameters are non-increasing. CAUCHY_UPPER when each sits under
/// the certified envelope 34 (2^-(k+1) + 2^-(k+2)) and the last is below 1e-3.
inline BlowupCertificate cauchy_upper_certificate(const DomainSpec& d, const Measure& mu,
                                                  const CauchySequence& seq) {
  BlowupCertificate c;
  c.zeta = d.zeta();
  c.z0 = seq.points.empty() ? d.zeta() : seq.points.front();
  c.witness = "upper-34";
  const std::size_t n = seq.points.size();
  std::vector<double> pair_max(n, 0.0);  // max over partners j > i
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      pair_max[i] = std::max(pair_max[i], cstar_upper_34(mu, d.zeta(), seq.points[i], seq.points[j]));
  for (std::size_t k = 0; k + 1 < n; ++k) {
    c.sequence.push_back(ScaledComplex::from(seq.points[k] - d.zeta()));
    c.h_values.push_back({});
    c.values.push_back(*std::max_element(pair_max.begin() + static_cast<std::ptrdiff_t>(k), pair_max.end()));
  }
  bool enveloped = c.values.size() >= 2;
  for (std::size_t k = 0; k < c.values.size(); ++k) {
    const int m = static_cast<int>(k) + 1;
    if (c.values[k] > 34.0 * (std::ldexp(1.0, -m) + std::ldexp(1.0, -m - 1))) enveloped = false;
  }
  if (enveloped && c.values.back() < 1e-3) c.verdict = Verdict::cauchy_upper;
  return c;
}

// ---------------------------------------------------------------------------

struct ConditionEvidence {
  std::string condition;
  std::string status;  // evidenced, not evidenced, not exercised
  std::string evidence;
};

struct HarnessOptions {
  int series_terms = 100;
  double threshold = 10.0;
  std::vector<double> thresholds{1.0, 2.0, 5.0};
  std::optional<Measure> measure;
  std::uint64_t seed = 0;
};

struct EquivalenceReport {
  std::string branch;  // positive, negative, inconclusive
  SeriesReport series;
  std::vector<ConditionEvidence> conditions;
  std::optional<PeakFunction> peak;
  std::optional<PeakCertificate> peak_certificate;
  std::optional<BlowupCertificate> blowup;
  std::optional<NotCauchyEvidence> not_cauchy;
  std::optional<BlowupCertificate> cauchy_upper;
  std::optional<double> consistency_gap;  // min over pairs of upper - lower (heuristic)
};

/// Ambient center when it lies in the domain, else the first grid point.
inline Complex default_z0(const DomainSpec& d, const std::vector<Complex>& grid) {
  if (contains(d, d.ambient().center) && d.ambient().center != d.zeta()) return d.ambient().center;
  for (const auto& w : grid)
    if (contains(d, w + d.zeta())) return w + d.zeta();
  throw PipelineError("cdist", "no base point z0 in the domain");
}

inline EquivalenceReport equivalence_harness(const DomainSpec& d, const HarnessOptions& opt = {}) {
  EquivalenceReport rep;
  rep.series = classify(d, opt.series_terms, opt.threshold);
  auto add = [&rep](std::string cond, std::string status, std::string ev) {
    rep.conditions.push_back({std::move(cond), std::move(status), std::move(ev)});
  };

  if (rep.series.classification == Classification::peak_divergent) {
    rep.branch = "positive";
    add("Melnikov series diverges", "evidenced", rep.series.evidence);
    const auto grid = sample_grid(d);
    const auto fam = curtis_family(d, rep.series, grid);
    rep.peak = bishop_select(fam, grid);
    const auto seq = radial_sequence(d, rep.peak->selected.back().annulus);
    rep.peak_certificate = verify_peak(*rep.peak, d, grid, seq);
    const auto& pc = *rep.peak_certificate;
    add("zeta is a peak point", "evidenced",
        "F_N(zeta) = 1 - s^(N+1), s^(N+1) = " +
            format_double(std::pow(rep.peak->s, rep.peak->N + 1)) +
            ", max |F_N| on " + std::to_string(pc.grid_points) + " grid points = " +
            format_double(pc.max_grid_modulus) + ", N = " + std::to_string(rep.peak->N));
    const bool seven = pc.tail_decreasing;
    add("f(z_nu) -> 1 along a sequence", seven ? "evidenced" : "not evidenced",
        "1 - |F_N(z_nu)| decreasing on the tail, last value " + format_double(pc.gaps.back()) +
            " at nu = " + std::to_string(seq.size()));

    const Complex z0 = default_z0(d, grid);
    rep.blowup = blowup_certificate(d, z0, seq, *rep.peak, &pc, opt.thresholds);
    const auto& b = *rep.blowup;
    std::string ev = "p(h(z0), h(z_nu)) reaches " + format_double(b.values.back()) + " at nu = " +
                     std::to_string(b.values.size());
    for (std::size_t i = 0; i < b.thresholds.size(); ++i)
      ev += "; exceeds " + format_double(b.thresholds[i]) + " from nu = " +
            std::to_string(b.tail_index[i] + 1);
    add("c(z0, z_nu) -> infinity", b.verdict == Verdict::diverges ? "evidenced" : "not evidenced",
        ev + " (up to horizon)");

    rep.not_cauchy = not_cauchy_evidence(*rep.peak, seq);
    add("the sequence is not c-Cauchy", rep.not_cauchy->minimum > 0.1 ? "evidenced" : "not evidenced",
        "min over nu of c(z_nu, z_2nu) >= " + format_double(rep.not_cauchy->minimum) +
            " (horizon-bounded)");
    return rep;
  }

  if (rep.series.classification == Classification::nonpeak_convergent_heuristic) {
    rep.branch = "negative";
    add("Melnikov series diverges", "not evidenced", rep.series.evidence);
  } else {
    rep.branch = "inconclusive";
    add("Melnikov series diverges", "not evidenced", rep.series.evidence);
  }
  if (!opt.measure) {
    add("c* upper-bound route", "not exercised", "no measure supplied");
    return rep;
  }
  RandomStream rng(opt.seed, "cdist/cauchy");
  const auto seq = cauchy_sequence(*opt.measure, d, rng);
  rep.cauchy_upper = cauchy_upper_certificate(d, *opt.measure, seq);
  const auto& cu = *rep.cauchy_upper;
  add("c* upper-bound route",
      cu.verdict == Verdict::cauchy_upper ? "evidenced" : "not evidenced",
      "sup of 34(|zeta-eta_m| M(eta_m) + |zeta-eta_n| M(eta_n)) over m, n > k falls to " +
          format_double(cu.values.back()) + " at k = " + std::to_string(cu.values.size()) +
          " (heuristic: the measure is supplied, not certified)");

  // test-family lower bounds against the 34-constant upper bounds on the same pairs
  const TestFamily fam = default_test_family(d);
  double gap = INFINITY;
  for (std::size_t i = 0; i + 1 < seq.points.size(); ++i)
    gap = std::min(gap, cstar_upper_34(*opt.measure, d.zeta(), seq.points[i], seq.points[i + 1]) -
                            cstar_lower(d, seq.points[i], seq.points[i + 1], fam));
  rep.consistency_gap = gap;
  add("c* lower bounds below the upper bounds", gap >= 0.0 ? "evidenced" : "not evidenced",
      "min(upper - lower) = " + format_double(gap) + " (heuristic)");
  return rep;
}

}  // namespace peakpoint
