#pragma once

// Subcommand drivers behind the peakpoint executable. Every artifact is
// written atomically under the output directory; identical configurations
// give byte-identical files.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "peakpoint/cdist.hpp"
#include "peakpoint/hb_counterexample.hpp"
#include "peakpoint/io.hpp"
#include "peakpoint/melnikov.hpp"
#include "peakpoint/peakfn.hpp"
#include "peakpoint/potential.hpp"
#include "peakpoint/report.hpp"

namespace peakpoint::cli {

namespace fs = std::filesystem;

struct RunConfig {
  std::string subcommand;
  std::string domain;
  std::string measure;
  std::optional<Complex> point;  // replaces zeta
  std::optional<double> ratio;
  int horizon = 100;
  double threshold = 10.0;
  std::uint64_t seed = 0;
  fs::path out = ".";
};

enum ExitCode { ok = 0, invariant_failed = 1, parse_failed = 2, pipeline_failed = 3 };

/// A bundled name ("roadrunner_divergent") or a file path.
inline fs::path resolve(const std::string& spec, const char* kind) {
  fs::path p(spec);
  if (fs::exists(p)) return p;
#ifdef PEAKPOINT_DATA_DIR
  fs::path bundled = fs::path(PEAKPOINT_DATA_DIR) / kind / (spec + ".json");
  if (fs::exists(bundled)) return bundled;
#endif
  throw ParseError("$", std::string("no such ") + kind + " file: " + spec);
}

inline DomainSpec load_domain(const RunConfig& cfg) {
  if (cfg.domain.empty()) throw ParseError("--domain", "required");
  DomainSpec d = io::load_domain(resolve(cfg.domain, "domains"));
  if (cfg.point) {
    d = d.is_generated() ? DomainSpec::with_generator(d.ambient(), *cfg.point, d.ratio_a(), *d.generator())
                         : DomainSpec::with_obstacles(d.ambient(), *cfg.point, d.ratio_a(), d.obstacles());
  }
  if (cfg.ratio) d = d.with_ratio(*cfg.ratio);
  return d;
}

inline std::string fmt_complex(Complex z) {
  return "(" + format_double(z.real()) + ", " + format_double(z.imag()) + ")";
}

inline std::string series_text(const SeriesReport& r) {
  std::ostringstream o;
  o << "classification: " << to_string(r.classification) << "\n";
  o << "evidence: " << r.evidence << "\n";
  o << "ratio_a: " << format_double(r.ratio_a) << "\n";
  o << "terms: " << r.terms.size() << "\n";
  o << "threshold: " << format_double(r.threshold) << "\n";
  o << "sum_lower: " << format_double(r.sum_lower.empty() ? 0.0 : r.sum_lower.back()) << "\n";
  o << "sum_upper: " << format_double(r.sum_upper.empty() ? 0.0 : r.sum_upper.back()) << "\n";
  if (r.closed_form_term) o << "closed_form_term: " << format_double(*r.closed_form_term) << "\n";
  if (r.closed_form_sum) o << "closed_form_sum: " << format_double(*r.closed_form_sum) << "\n";
  if (r.upper_total) o << "upper_total: " << format_double(*r.upper_total) << "\n";
  for (const auto& w : r.warnings) o << "warning: " << w << "\n";
  return o.str();
}

struct PeakRun {
  SeriesReport series;
  std::vector<Complex> grid;
  PeakFunction peak;
  PeakCertificate certificate;
};

inline PeakRun build_peak(const DomainSpec& d, const RunConfig& cfg) {
  PeakRun run;
  run.series = classify(d, std::min(cfg.horizon, d.horizon()), cfg.threshold);
  run.grid = sample_grid(d);
  const auto fam = curtis_family(d, run.series, run.grid);
  run.peak = bishop_select(fam, run.grid);
  const auto seq = radial_sequence(d, run.peak.selected.back().annulus);
  run.certificate = verify_peak(run.peak, d, run.grid, seq);
  return run;
}

inline std::string certificate_text(const PeakRun& run) {
  const auto& c = run.certificate;
  const auto& pf = run.peak;
  std::ostringstream o;
  o << "N: " << pf.N << "\n";
  o << "s: " << format_double(pf.s) << "\n";
  o << "R: " << format_double(pf.R) << "\n";
  o << "alpha: " << format_double(pf.alpha) << "\n";
  o << "grid_points: " << c.grid_points << "\n";
  o << "max_grid_modulus: " << format_double(c.max_grid_modulus) << "\n";
  o << "argmax: " << fmt_complex(c.argmax) << "\n";
  o << "value_at_zeta: " << format_double(c.value_at_zeta) << "\n";
  o << "one_minus_value_at_zeta: " << format_double(std::pow(pf.s, pf.N + 1)) << "\n";
  o << "worst_selection_margin: " << format_double(c.worst_selection_margin) << "\n";
  o << "worst_proof_bound: " << format_double(c.worst_proof_bound) << "\n";
  o << "sequence_length: " << c.sequence.size() << "\n";
  o << "tail_decreasing: " << (c.tail_decreasing ? "true" : "false") << "\n";
  return o.str();
}

inline int cmd_classify(const RunConfig& cfg, std::ostream& out, bool text) {
  const DomainSpec d = load_domain(cfg);
  const SeriesReport r = classify(d, std::min(cfg.horizon, d.horizon()), cfg.threshold);
  atomic_write(cfg.out / "terms.csv", series_csv(r).str());
  if (text) {
    const std::string t = series_text(r);
    atomic_write(cfg.out / "classify.txt", t);
    out << t;
  } else {
    out << "terms.csv: " << r.terms.size() << " rows\n";
  }
  return ok;
}

inline int cmd_peak(const RunConfig& cfg, std::ostream& out) {
  const DomainSpec d = load_domain(cfg);
  const PeakRun run = build_peak(d, cfg);
  atomic_write(cfg.out / "peak.json", peak_to_json(run.peak, d.ratio_a(), d.zeta()).dump(1) + "\n");
  const std::string t = certificate_text(run);
  atomic_write(cfg.out / "peak_certificate.txt", t);
  out << t;
  const bool hard = run.certificate.max_grid_modulus < 1.0 && run.certificate.worst_selection_margin < 0.0;
  return hard ? ok : invariant_failed;
}

inline int cmd_distance(const RunConfig& cfg, std::ostream& out) {
  const DomainSpec d = load_domain(cfg);
  const PeakRun run = build_peak(d, cfg);
  const Complex z0 = default_z0(d, run.grid);
  const auto cert = blowup_certificate(d, z0, run.certificate.sequence, run.peak, &run.certificate,
                                       {1.0, 2.0, 5.0});
  atomic_write(cfg.out / "certificate.csv", certificate_csv(cert).str());
  std::ostringstream o;
  o << "verdict: " << to_string(cert.verdict) << "\n";
  o << "witness: " << cert.witness << "\n";
  o << "z0: " << fmt_complex(cert.z0) << "\n";
  o << "sequence_length: " << cert.sequence.size() << " (up to horizon)\n";
  o << "final_p: " << format_double(cert.values.empty() ? 0.0 : cert.values.back()) << "\n";
  for (std::size_t i = 0; i < cert.thresholds.size(); ++i)
    o << "threshold " << format_double(cert.thresholds[i]) << ": exceeded from nu = "
      << (cert.tail_index[i] < 0 ? std::string("never") : std::to_string(cert.tail_index[i] + 1)) << "\n";
  const auto nc = not_cauchy_evidence(run.peak, run.certificate.sequence);
  o << "not_cauchy_min_pairwise_p: " << format_double(nc.minimum) << "\n";
  atomic_write(cfg.out / "certificate.txt", o.str());
  out << o.str();
  return ok;
}

inline int cmd_potential(const RunConfig& cfg, std::ostream& out) {
  if (cfg.measure.empty()) throw ParseError("--measure", "required");
  const DomainSpec d = load_domain(cfg);
  const Measure mu = io::load_measure(resolve(cfg.measure, "measures"));
  const Complex zeta = d.zeta();
  std::ostringstream o;
  o << "total_mass: " << format_double(mu.total_mass()) << "\n";
  o << "mass_at_zeta: " << format_double(mu.mass_at(zeta)) << "\n";

  // M along rays from zeta
  CsvTable prof;
  prof.header = {"theta", "t", "re", "im", "M", "t_times_M"};
  for (int k = 0; k < 8; ++k) {
    const double th = k * std::numbers::pi / 4.0 + std::numbers::pi / 8.0;
    for (int e = 1; e <= 20; ++e) {
      const double t = std::ldexp(1.0, -e);
      const Complex z = zeta + std::polar(t, th);
      const double M = newton_potential(mu, z);
      prof.add_row({format_double(th), format_double(t), format_double(z.real()),
                    format_double(z.imag()), format_double(M), format_double(t * M)});
    }
  }
  atomic_write(cfg.out / "potential_profile.csv", prof.str());

  std::vector<double> radii;
  for (int e = 1; e <= 20; ++e) radii.push_back(std::ldexp(1.0, -e));
  const auto avg = averaged_potential(mu, zeta, radii);
  CsvTable at;
  at.header = {"r", "averaged", "bound"};
  bool eq1 = true;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    at.add_row({format_double(radii[i]), format_double(avg[i]), format_double(2.0 * mu.total_mass())});
    eq1 = eq1 && avg[i] <= 2.0 * mu.total_mass();
  }
  atomic_write(cfg.out / "averaged_potential.csv", at.str());
  o << "averaged_potential_smallest_r: " << format_double(avg.back()) << "\n";
  o << "equation_1_bound_holds: " << (eq1 ? "true" : "false") << "\n";

  if (mu.mass_at(zeta) == 0.0) {
    RandomStream rng(cfg.seed, "potential/cauchy");
    const auto seq = cauchy_sequence(mu, d, rng);
    CsvTable ct;
    ct.header = {"n", "re", "im", "product", "bound"};
    for (std::size_t i = 0; i < seq.points.size(); ++i)
      ct.add_row({std::to_string(i + 1), format_double(seq.points[i].real()),
                  format_double(seq.points[i].imag()), format_double(seq.products[i]),
                  format_double(std::ldexp(1.0, -static_cast<int>(i + 1)))});
    atomic_write(cfg.out / "cauchy_sequence.csv", ct.str());
    o << "cauchy_sequence_length: " << seq.points.size() << "\n";
    o << "cauchy_last_product: " << format_double(seq.products.back()) << "\n";
  } else {
    o << "cauchy_sequence: skipped (atom at zeta)\n";
  }

  std::optional<PeakRun> run;
  const SeriesReport sr = classify(d, std::min(cfg.horizon, d.horizon()), cfg.threshold);
  if (sr.classification == Classification::peak_divergent) run = build_peak(d, cfg);
  const TestFamily fam = default_test_family(d, run ? &run->peak : nullptr);
  const auto fr = measure_criterion_falsify(mu, zeta, fam);
  if (fr.violated)
    o << "falsifier: " << fr.name << " violates |f(zeta)| <= int |f| dmu by "
      << format_double(fr.margin) << "\n";
  else
    o << "falsifier: consistent with the supplied family (" << fr.checked << " functions)\n";
  if (run) {
    TestFamily powers;
    for (const auto& t : fam)
      if (t.provenance == "peak" || t.provenance == "peak-power") powers.push_back(t);
    const auto best = strongest_violation(mu, zeta, powers);
    o << "strongest_peak_power: " << best.name << " margin " << format_double(best.margin) << "\n";
  }
  atomic_write(cfg.out / "potential.txt", o.str());
  out << o.str();
  return eq1 ? ok : invariant_failed;
}

inline std::vector<double> hb_beta_grid() {
  std::vector<double> g;
  for (int k = 0; k < 1000; ++k) g.push_back(-250.0 + 0.5 * k);
  return g;
}

inline int cmd_hb(const RunConfig& cfg, std::ostream& out) {
  RandomStream rng(cfg.seed, "hb/samples");
  std::vector<std::pair<hb::Vec2, double>> scal;
  std::vector<std::pair<hb::Vec2, hb::Vec2>> sums;
  for (int i = 0; i < 1000; ++i) {
    const hb::Vec2 v{rng.uniform(-10, 10), rng.uniform(-10, 10)};
    scal.push_back({v, rng.uniform(0, 10)});
    sums.push_back({v, {rng.uniform(-10, 10), rng.uniform(-10, 10)}});
  }
  scal.push_back({{5.0, -1.0}, 0.0});
  const auto sl = hb::check_superlinear(scal, sums);
  std::vector<double> xs;
  for (int k = -100; k <= 100; ++k) xs.push_back(0.5 * k);
  const bool dom = hb::ell_dominates_on_M(xs);
  const auto inf = hb::extension_infeasible(hb_beta_grid());

  std::ostringstream o;
  for (const auto& c : sl.homogeneity)
    o << "homogeneity [" << c.name << "]: " << (c.flagged ? "FLAGGED" : c.passed ? "pass" : "FAIL")
      << " (" << c.detail << ")\n";
  for (const auto& c : sl.additivity)
    o << "additivity [" << c.name << "]: " << (c.passed ? "pass" : "FAIL") << " (" << c.detail << ")\n";
  o << "samples: " << sl.samples_checked << " checked, " << sl.samples_failed << " failed, "
    << sl.samples_under_flag << " under the flagged case\n";
  o << "flagged_cases: " << sl.flagged_cases << "\n";
  o << "ell_dominates_Q_on_M: " << (dom ? "true" : "false") << "\n";
  o << "alpha: " << format_double(inf.alpha) << " (" << inf.alpha_reason << ")\n";
  std::size_t exact = 0;
  for (const auto& w : inf.witnesses) exact += w.exact;
  o << "beta_grid: " << inf.witnesses.size() << " values, all refuted: "
    << (inf.all_refuted ? "true" : "false") << ", L = -1 exactly at " << exact << "\n";
  o << "parametric: " << inf.parametric << "\n";
  o << "verdict: no linear extension L = l on M with L >= Q exists\n";
  atomic_write(cfg.out / "hb_report.txt", o.str());
  CsvTable t;
  t.header = {"beta", "x", "y", "L", "Q"};
  for (const auto& w : inf.witnesses)
    t.add_row({format_double(w.beta), format_double(w.point.x), format_double(w.point.y),
               format_double(w.L), format_double(w.Qv)});
  atomic_write(cfg.out / "hb_witnesses.csv", t.str());
  out << o.str();
  return (sl.all_passed && dom && inf.all_refuted) ? ok : invariant_failed;
}

/// Runs one subcommand; errors become exit status 2 (input) or 3 (pipeline).
inline int run(const RunConfig& cfg, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    fs::create_directories(cfg.out);
    if (cfg.subcommand == "classify") return cmd_classify(cfg, out, true);
    if (cfg.subcommand == "series") return cmd_classify(cfg, out, false);
    if (cfg.subcommand == "peak") return cmd_peak(cfg, out);
    if (cfg.subcommand == "distance") return cmd_distance(cfg, out);
    if (cfg.subcommand == "potential") return cmd_potential(cfg, out);
    if (cfg.subcommand == "hb-check") return cmd_hb(cfg, out);
    err << "unknown subcommand: " << cfg.subcommand << "\n";
    return parse_failed;
  } catch (const ParseError& e) {
    err << "parse error at " << e.path() << ": " << e.what() << "\n";
    return parse_failed;
  } catch (const PipelineError& e) {
    err << "pipeline error in " << e.module() << ": " << e.what() << "\n";
    return pipeline_failed;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return parse_failed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return pipeline_failed;
  }
}

}  // namespace peakpoint::cli
