#pragma once

// Weak peak function at zeta. Capacity witnesses f_j of annuli are turned into
// h_j = 1 - (z - zeta) f_j / f_j'(inf), which equal 1 at zeta and stay bounded
// by R = 1 + 2/alpha; a subsequence is then selected so that
// h = (1 - s) sum_{j>=0} s^j h_j (h_0 = 1) has |h| < 1 on the domain.
//
// Member j lives in coordinates t = (z - zeta) / a^j, so members thousands of
// annuli deep evaluate as ordinary doubles.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "peakpoint/capacity.hpp"
#include "peakpoint/domain.hpp"
#include "peakpoint/errors.hpp"
#include "peakpoint/melnikov.hpp"
#include "peakpoint/report.hpp"
#include "peakpoint/scaled.hpp"

namespace peakpoint {

struct CurtisMember {
  int annulus = 0;
  ScaledReal scale;      // a^annulus
  TestFunction witness;  // f_j in normalized coordinates
  Complex derivative;    // achieved f_j'(inf), normalized
  double capacity_ratio = 0.0;  // gamma(A_j \ Omega) / a^j of the witness obstacle
  std::string provenance;

  /// g_j at normalized t; g_j(0) = 0 and g_j(inf) = 1.
  Complex g(Complex t) const {
    if (!(std::abs(t) < 1e150)) return {1.0, 0.0};
    return t * witness(t) / derivative;
  }

  Complex h(Complex t) const {
    if (!(std::abs(t) < 1e150)) return {0.0, 0.0};
    return 1.0 - g(t);
  }

  Complex h_at(const ScaledComplex& w) const { return h(ratio(w, scale)); }
  Complex g_at(const ScaledComplex& w) const { return g(ratio(w, scale)); }
};

struct CurtisFamily {
  double alpha = 0.0;
  double bound_R = 0.0;
  std::vector<CurtisMember> members;  // increasing annulus index
  double sampled_sup = 0.0;           // max sampled |h_j| over all members
};

namespace detail {

/// Numeric witness of the segment [-1, 1], computed once.
inline const TestFunction& canonical_segment_witness() {
  static const TestFunction w = [] {
    const auto c = capacity_lower_numeric({Obstacle::segment({-1.0, 0.0}, {1.0, 0.0})}, 200, 0);
    return *c.witness;
  }();
  return w;
}

inline std::pair<TestFunction, std::string> member_witness(const Obstacle& o) {
  if (o.kind == ObstacleKind::disk)
    return {ahlfors_disk(o).as_test_function(), "ahlfors-disk"};
  const Complex half = 0.5 * (o.b - o.a);
  return {canonical_segment_witness().transformed(half, 0.5 * (o.a + o.b)), "segment-numeric"};
}

/// Points near the witness obstacle of a member plus both bounding circles,
/// in normalized coordinates.
inline std::vector<Complex> local_samples(const Obstacle& o, double a) {
  std::vector<Complex> pts;
  if (o.kind == ObstacleKind::disk) {
    for (int i = 0; i < 64; ++i)
      pts.push_back(o.center +
                    std::polar(o.radius * (1.0 + 1e-9), 2.0 * std::numbers::pi * i / 64));
  } else {
    const Complex half = 0.5 * (o.b - o.a);
    const Complex normal = Complex(0.0, 1.0) * half / std::abs(half);
    for (int k = 0; k < 32; ++k) {
      const Complex p = o.center + std::cos(std::numbers::pi * (k + 0.5) / 32) * half;
      pts.push_back(p + 1e-6 * std::abs(half) * normal);
      pts.push_back(p - 1e-6 * std::abs(half) * normal);
    }
    pts.push_back(o.a - 1e-6 * half);
    pts.push_back(o.b + 1e-6 * half);
  }
  for (double rho : {1.0, a})
    for (int i = 0; i < 64; ++i) pts.push_back(std::polar(rho, 2.0 * std::numbers::pi * (i + 0.5) / 64));
  return pts;
}

}  // namespace detail

/// Members are the annuli whose best single obstacle has capacity ratio
/// >= alpha = max observed ratio / 2, scanned over 1..horizon.
inline CurtisFamily curtis_family(const DomainSpec& d, const SeriesReport& report,
                                  const std::vector<Complex>& grid, int max_members = 0,
                                  int grid_depth = GridOptions{}.depth) {
  if (report.classification != Classification::peak_divergent)
    throw PipelineError("peakfn", "curtis_family needs a PEAK_DIVERGENT report");
  double best = 0.0;
  for (const auto& t : report.terms) {
    const auto c = annulus_content(d, t.n);
    for (const auto& o : c.inside) best = std::max(best, capacity_exact(o).lower);
    if (c.negligible) best = std::max(best, series_term(d, t.n).lower);
  }
  CurtisFamily fam;
  fam.alpha = 0.5 * best;
  if (!(fam.alpha > 0.0))
    throw PipelineError("peakfn", "insufficient family: no obstacle admits a witness");
  fam.bound_R = 1.0 + 2.0 / fam.alpha;

  const double a = d.ratio_a();
  for (int j = 1; j <= d.horizon(); ++j) {
    if (max_members > 0 && static_cast<int>(fam.members.size()) >= max_members) break;
    const auto c = annulus_content(d, j);
    const Obstacle* pick = nullptr;
    double cap = 0.0;
    for (const auto& o : c.inside) {
      const double g = capacity_exact(o).lower;
      if (g > cap) {
        cap = g;
        pick = &o;
      }
    }
    if (!pick || cap < fam.alpha) continue;
    auto [witness, provenance] = detail::member_witness(*pick);
    CurtisMember m;
    m.annulus = j;
    m.scale = d.annulus_scale(j);
    m.witness = std::move(witness);
    m.derivative = m.witness.derivative_at_infinity();
    m.capacity_ratio = cap;
    m.provenance = provenance;

    double sup = 0.0;
    Complex worst{};
    auto check = [&](const ScaledComplex& w) {
      const double v = std::abs(m.h_at(w));
      if (v > sup) {
        sup = v;
        worst = ratio(w, m.scale);
      }
    };
    for (const Complex& t : detail::local_samples(*pick, a)) {
      const ScaledComplex w = ScaledComplex::from(m.scale, t);
      if (contains_offset(d, w)) check(w);
    }
    // deeper members are tiny on the grid: |t| >= a^(j - depth - 1) there
    if (j <= grid_depth + 8)
      for (const Complex& w : grid) check(ScaledComplex::from(w));
    if (sup > fam.bound_R + 1e-6)
      throw PipelineError("peakfn", "inadmissible witness at annulus " + std::to_string(j) +
                                        ": |h| = " + format_double(sup) + " at t = (" +
                                        format_double(worst.real()) + ", " +
                                        format_double(worst.imag()) + ")");
    fam.sampled_sup = std::max(fam.sampled_sup, sup);
    fam.members.push_back(std::move(m));
  }
  if (fam.members.size() < 3)
    throw PipelineError("peakfn", "insufficient family: " + std::to_string(fam.members.size()) +
                                      " members qualify");
  return fam;
}

// ---------------------------------------------------------------------------

struct PeakFunction {
  double s = 0.0;
  double r = 0.5;
  double R = 0.0;
  double alpha = 0.0;
  int N = 0;                           // F_N = (1-s) sum_{j=0}^N s^j h_j
  std::vector<double> epsilons;        // eps_0 .. eps_N
  std::vector<CurtisMember> selected;  // h_1 .. h_N
  std::vector<int> w_sizes;            // |W_nu| on the grid, nu = 1 .. N-1

  double delta() const { return -(R - 1.0 + s * (r - R)); }

  /// 1 - F_M at zeta + w, computed as (1-s) sum s^j g_j + s^(M+1) without cancellation.
  Complex gap(const ScaledComplex& w, int M = -1) const {
    if (M < 0 || M > N) M = N;
    Complex acc{};
    double sj = 1.0;
    for (int j = 1; j <= M; ++j) {
      sj *= s;
      acc += sj * selected[j - 1].g_at(w);
    }
    return (1.0 - s) * acc + std::pow(s, M + 1);
  }

  Complex operator()(const ScaledComplex& w, int M = -1) const { return 1.0 - gap(w, M); }
  Complex operator()(Complex w) const { return (*this)(ScaledComplex::from(w)); }

  /// F_N(zeta) = 1 - s^(N+1)
  double value_at_zeta() const { return -std::expm1((N + 1) * std::log(s)); }
};

/// Midpoint of the admissible interval ((R-1)/(R-r), 1).
inline double bishop_s(double R, double r) { return 0.5 * ((R - 1.0) / (R - r) + 1.0); }

inline double selection_epsilon(double s, double delta, int nu) {
  const double q = std::pow(s, nu + 1);
  return 0.5 * delta * q / (1.0 - q);
}

/// eps_{nu-1}(1 - s^nu) + s^nu (R - 1 + s(r - R)); negative for a valid schedule.
inline double selection_inequality(const PeakFunction& pf, int nu) {
  const double sn = std::pow(pf.s, nu);
  return pf.epsilons[nu - 1] * (1.0 - sn) + sn * (pf.R - 1.0 + pf.s * (pf.r - pf.R));
}

/// (1-s)[(1+eps_{nu-1})(1-s^nu)/(1-s) + R s^nu + r s^(nu+1)/(1-s)]: bound on |h|
/// at points entering W_nu.
inline double proof_bound(const PeakFunction& pf, int nu) {
  const double sn = std::pow(pf.s, nu);
  return (1.0 + pf.epsilons[nu - 1]) * (1.0 - sn) + (1.0 - pf.s) * pf.R * sn + pf.r * sn * pf.s;
}

inline PeakFunction bishop_select(const CurtisFamily& fam, const std::vector<Complex>& grid,
                                  double r_param = 0.5, double tail_tol = 1e-9) {
  if (!(r_param > 0.0 && r_param < 1.0))
    throw std::invalid_argument("bishop_select: r must lie in (0, 1)");
  PeakFunction pf;
  pf.R = fam.bound_R;
  pf.r = r_param;
  pf.alpha = fam.alpha;
  pf.s = bishop_s(pf.R, r_param);
  const double delta = pf.delta();
  // smallest N with R s^(N+1) <= tail_tol
  pf.N = std::max(1, static_cast<int>(std::ceil(std::log(tail_tol / pf.R) / std::log(pf.s))) - 1);
  while (pf.R * std::pow(pf.s, pf.N + 1) > tail_tol) ++pf.N;
  while (pf.N > 1 && pf.R * std::pow(pf.s, pf.N) <= tail_tol) --pf.N;
  for (int nu = 0; nu <= pf.N; ++nu) pf.epsilons.push_back(selection_epsilon(pf.s, delta, nu));

  std::vector<ScaledComplex> pts;
  pts.reserve(grid.size());
  for (const auto& w : grid) pts.push_back(ScaledComplex::from(w));
  std::vector<double> running(pts.size(), 0.0);
  auto absorb = [&](const CurtisMember& m) {
    for (std::size_t i = 0; i < pts.size(); ++i)
      running[i] = std::max(running[i], std::abs(m.h_at(pts[i])));
  };

  const double small = r_param * (1.0 - 1e-3);
  pf.selected.push_back(fam.members.front());
  absorb(fam.members.front());
  std::size_t cursor = 1;
  std::vector<std::size_t> W;
  for (int nu = 1; nu < pf.N; ++nu) {
    W.clear();
    const double level = 1.0 + pf.epsilons[nu];
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (running[i] >= level) W.push_back(i);
    pf.w_sizes.push_back(static_cast<int>(W.size()));
    // W only grows, so a member rejected once stays rejected
    bool found = false;
    for (; cursor < fam.members.size(); ++cursor) {
      const CurtisMember& m = fam.members[cursor];
      bool ok = true;
      for (std::size_t i : W)
        if (std::abs(m.h_at(pts[i])) > small) {
          ok = false;
          break;
        }
      if (ok) {
        found = true;
        break;
      }
    }
    if (!found)
      throw PipelineError("peakfn", "family exhausted at nu = " + std::to_string(nu) + " (" +
                                        std::to_string(fam.members.size()) + " members)");
    pf.selected.push_back(fam.members[cursor]);
    absorb(fam.members[cursor]);
    ++cursor;
  }
  return pf;
}

// ---------------------------------------------------------------------------

struct PeakCertificate {
  double max_grid_modulus = 0.0;
  Complex argmax{};
  std::size_t grid_points = 0;
  double value_at_zeta = 0.0;   // F_N evaluated at zeta
  double expected_at_zeta = 0.0;  // 1 - s^(N+1)
  double worst_selection_margin = 0.0;  // max over nu of the selection inequality
  double worst_proof_bound = 0.0;       // max over nu of proof_bound
  std::vector<ScaledComplex> sequence;
  std::vector<Complex> values;  // F_N(z_nu)
  std::vector<double> gaps;     // 1 - |F_N(z_nu)|
  bool tail_decreasing = false;
};

/// Offsets i a^nu (1+a)/2 from zeta, nu = 1..count: the middle circle of each
/// annulus, a quarter turn away from the generated obstacles. Points that hit
/// an explicit obstacle are turned further until they lie in the domain.
inline std::vector<ScaledComplex> radial_sequence(const DomainSpec& d, int count) {
  std::vector<ScaledComplex> seq;
  const double a = d.ratio_a();
  for (int nu = 1; nu <= count; ++nu) {
    const ScaledReal rad = d.annulus_scale(nu) * (0.5 * (1.0 + a));
    bool placed = false;
    for (int k = 0; k < 64 && !placed; ++k) {
      const double theta = 0.5 * std::numbers::pi + (k % 2 ? -1.0 : 1.0) * ((k + 1) / 2) * 0.049;
      const ScaledComplex w = ScaledComplex::from(rad, std::polar(1.0, theta));
      if (contains_offset(d, w)) {
        seq.push_back(w);
        placed = true;
      }
    }
    if (!placed)
      throw PipelineError("peakfn", "no sequence point in annulus " + std::to_string(nu));
  }
  return seq;
}

/// Tail = second half of the sequence.
inline bool decreasing_tail(const std::vector<double>& v) {
  if (v.size() < 2) return false;
  for (std::size_t i = v.size() / 2 + 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

inline PeakCertificate verify_peak(const PeakFunction& pf, const DomainSpec& d,
                                   const std::vector<Complex>& grid,
                                   const std::vector<ScaledComplex>& sequence) {
  PeakCertificate c;
  c.grid_points = grid.size();
  for (const auto& w : grid) {
    const double v = std::abs(pf(w));
    if (v > c.max_grid_modulus) {
      c.max_grid_modulus = v;
      c.argmax = w + d.zeta();
    }
  }
  if (!(c.max_grid_modulus < 1.0))
    throw PipelineError("peakfn", "peak violation: |F_N| = " + format_double(c.max_grid_modulus) +
                                      " at (" + format_double(c.argmax.real()) + ", " +
                                      format_double(c.argmax.imag()) + ")");
  c.value_at_zeta = pf(ScaledComplex{}).real();
  c.expected_at_zeta = pf.value_at_zeta();
  c.worst_selection_margin = -INFINITY;
  c.worst_proof_bound = -INFINITY;
  for (int nu = 1; nu <= pf.N; ++nu) {
    c.worst_selection_margin = std::max(c.worst_selection_margin, selection_inequality(pf, nu));
    c.worst_proof_bound = std::max(c.worst_proof_bound, proof_bound(pf, nu));
  }
  c.sequence = sequence;
  for (const auto& w : sequence) {
    const Complex g = pf.gap(w);
    c.values.push_back(1.0 - g);
    // 1 - |1 - g| = (2 Re g - |g|^2) / (1 + |1 - g|)
    c.gaps.push_back((2.0 * g.real() - std::norm(g)) / (1.0 + std::abs(1.0 - g)));
  }
  c.tail_decreasing = decreasing_tail(c.gaps);
  return c;
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

inline nlohmann::ordered_json complex_json(Complex z) { return {z.real(), z.imag()}; }

inline Complex json_complex(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

inline nlohmann::ordered_json witness_json(const TestFunction& f) {
  nlohmann::ordered_json terms = nlohmann::ordered_json::array();
  for (const auto& t : f.terms) {
    nlohmann::ordered_json e;
    if (t.kind == TestTerm::Kind::pole) {
      e["kind"] = "pole";
      e["center"] = complex_json(t.center);
    } else {
      e["kind"] = "joukowski";
      e["center"] = complex_json(t.center);
      e["half"] = complex_json(t.half);
      e["power"] = t.power;
    }
    e["coeff"] = complex_json(t.coeff);
    terms.push_back(e);
  }
  return terms;
}

inline TestFunction json_witness(const nlohmann::json& j) {
  TestFunction f;
  for (const auto& e : j) {
    TestTerm t;
    t.kind = e.at("kind") == "pole" ? TestTerm::Kind::pole : TestTerm::Kind::joukowski;
    t.center = json_complex(e.at("center"));
    if (t.kind == TestTerm::Kind::joukowski) {
      t.half = json_complex(e.at("half"));
      t.power = e.at("power").get<int>();
    }
    t.coeff = json_complex(e.at("coeff"));
    f.terms.push_back(t);
  }
  return f;
}

}  // namespace detail

/// Enough to re-evaluate F_N anywhere: per member its annulus, witness terms in
/// normalized coordinates and weight (1-s) s^j.
inline nlohmann::ordered_json peak_to_json(const PeakFunction& pf, double ratio_a, Complex zeta) {
  nlohmann::ordered_json j;
  j["zeta"] = detail::complex_json(zeta);
  j["ratio_a"] = ratio_a;
  j["s"] = pf.s;
  j["r"] = pf.r;
  j["R"] = pf.R;
  j["alpha"] = pf.alpha;
  j["N"] = pf.N;
  j["value_at_zeta"] = pf.value_at_zeta();
  nlohmann::ordered_json members = nlohmann::ordered_json::array();
  double sj = 1.0;
  for (const auto& m : pf.selected) {
    sj *= pf.s;
    nlohmann::ordered_json e;
    e["annulus"] = m.annulus;
    e["weight"] = (1.0 - pf.s) * sj;
    e["provenance"] = m.provenance;
    e["derivative"] = detail::complex_json(m.derivative);
    e["witness"] = detail::witness_json(m.witness);
    members.push_back(e);
  }
  j["members"] = members;
  j["epsilons"] = pf.epsilons;
  return j;
}

inline PeakFunction peak_from_json(const nlohmann::json& j) {
  PeakFunction pf;
  pf.s = j.at("s").get<double>();
  pf.r = j.at("r").get<double>();
  pf.R = j.at("R").get<double>();
  pf.alpha = j.at("alpha").get<double>();
  pf.N = j.at("N").get<int>();
  pf.epsilons = j.at("epsilons").get<std::vector<double>>();
  const double a = j.at("ratio_a").get<double>();
  for (const auto& e : j.at("members")) {
    CurtisMember m;
    m.annulus = e.at("annulus").get<int>();
    m.scale = scaled_pow(a, m.annulus);
    m.provenance = e.at("provenance").get<std::string>();
    m.derivative = detail::json_complex(e.at("derivative"));
    m.witness = detail::json_witness(e.at("witness"));
    pf.selected.push_back(std::move(m));
  }
  if (static_cast<int>(pf.selected.size()) != pf.N)
    throw ParseError("$.members", "expected N members");
  return pf;
}

}  // namespace peakpoint
