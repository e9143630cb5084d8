#pragma once

// Strict JSON readers for domain and measure files. Every error names the
// offending key as a path like "$.generator.beta" or "$.atoms[2].mass".

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <regex>
#include <sstream>
#include <string>

#include "json.hpp"

#include "peakpoint/domain.hpp"
#include "peakpoint/errors.hpp"
#include "peakpoint/potential.hpp"

namespace peakpoint::io {

using nlohmann::json;

namespace detail {

inline void only_keys(const json& j, const std::string& path,
                      std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) throw ParseError(path + "." + it.key(), "unknown key");
  }
}

inline const json& require(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) throw ParseError(path + "." + key, "missing key");
  return j.at(key);
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(path, "expected a finite number");
  return v;
}

inline double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0.0)) throw ParseError(path, "must be positive");
  return v;
}

inline Complex point(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ParseError(path, "expected [re, im]");
  return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

inline int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ParseError(path, "expected an integer");
  return j.get<int>();
}

inline json parse_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("$", origin + ": " + e.what());
  }
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ParseError("$", "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// "obstacle 3 overlaps obstacle 1" -> "$.obstacles[3]"
inline std::string obstacle_path(const std::string& msg) {
  std::smatch m;
  static const std::regex re("^obstacle ([0-9]+)");
  if (std::regex_search(msg, m, re)) return "$.obstacles[" + m[1].str() + "]";
  return "$";
}

}  // namespace detail

inline Obstacle parse_obstacle(const json& j, const std::string& path) {
  using namespace detail;
  if (!j.is_object()) throw ParseError(path, "expected an object");
  const json& kind = require(j, path, "kind");
  if (kind == "disk") {
    only_keys(j, path, {"kind", "center", "radius"});
    return Obstacle::disk(point(require(j, path, "center"), path + ".center"),
                          positive(require(j, path, "radius"), path + ".radius"));
  }
  if (kind == "segment") {
    only_keys(j, path, {"kind", "a", "b"});
    const Complex a = point(require(j, path, "a"), path + ".a");
    const Complex b = point(require(j, path, "b"), path + ".b");
    if (a == b) throw ParseError(path + ".b", "segment endpoints coincide");
    return Obstacle::segment(a, b);
  }
  throw ParseError(path + ".kind", "expected \"disk\" or \"segment\"");
}

/// Keys: ambient {center, radius} (default unit disk), zeta, ratio_a (default 0.5),
/// and exactly one of obstacles [...] or generator {kind, C, beta, horizon}.
inline DomainSpec parse_domain(const json& j) {
  using namespace detail;
  only_keys(j, "$", {"name", "ambient", "zeta", "ratio_a", "obstacles", "generator"});
  if (j.contains("name") && !j["name"].is_string()) throw ParseError("$.name", "expected a string");
  Ambient amb;
  if (j.contains("ambient")) {
    const json& a = j["ambient"];
    only_keys(a, "$.ambient", {"center", "radius"});
    amb.center = point(require(a, "$.ambient", "center"), "$.ambient.center");
    amb.radius = positive(require(a, "$.ambient", "radius"), "$.ambient.radius");
  }
  const Complex zeta = point(require(j, "$", "zeta"), "$.zeta");
  if (std::abs(zeta - amb.center) > amb.radius * (1.0 + 1e-12))
    throw ParseError("$.zeta", "outside the closed ambient disk");
  double a = 0.5;
  if (j.contains("ratio_a")) {
    a = number(j["ratio_a"], "$.ratio_a");
    if (!(a > 0.0 && a < 1.0)) throw ParseError("$.ratio_a", "must lie in (0, 1)");
  }
  const bool has_obs = j.contains("obstacles"), has_gen = j.contains("generator");
  if (has_obs == has_gen) throw ParseError("$", "exactly one of obstacles or generator is required");

  if (has_gen) {
    const json& g = j["generator"];
    only_keys(g, "$.generator", {"kind", "C", "beta", "horizon"});
    GeneratorRule rule;
    const json& kind = require(g, "$.generator", "kind");
    if (kind == "disk")
      rule.kind = ObstacleKind::disk;
    else if (kind == "segment")
      rule.kind = ObstacleKind::segment;
    else
      throw ParseError("$.generator.kind", "expected \"disk\" or \"segment\"");
    rule.C = positive(require(g, "$.generator", "C"), "$.generator.C");
    rule.beta = number(require(g, "$.generator", "beta"), "$.generator.beta");
    if (!(rule.beta >= 1.0)) throw ParseError("$.generator.beta", "must be >= 1");
    if (g.contains("horizon")) {
      rule.horizon = integer(g["horizon"], "$.generator.horizon");
      if (rule.horizon < 1) throw ParseError("$.generator.horizon", "must be >= 1");
    }
    try {
      return DomainSpec::with_generator(amb, zeta, a, rule);
    } catch (const std::invalid_argument& e) {
      throw ParseError("$.generator", e.what());
    }
  }

  const json& obs = j["obstacles"];
  if (!obs.is_array()) throw ParseError("$.obstacles", "expected an array");
  std::vector<Obstacle> list;
  for (std::size_t i = 0; i < obs.size(); ++i)
    list.push_back(parse_obstacle(obs[i], "$.obstacles[" + std::to_string(i) + "]"));
  try {
    return DomainSpec::with_obstacles(amb, zeta, a, std::move(list));
  } catch (const std::invalid_argument& e) {
    throw ParseError(obstacle_path(e.what()), e.what());
  }
}

inline DomainSpec parse_domain_text(const std::string& text) {
  return parse_domain(detail::parse_text(text, "domain"));
}

inline DomainSpec load_domain(const std::filesystem::path& p) {
  return parse_domain(detail::parse_text(detail::read_file(p), p.string()));
}

/// Keys: atoms [{at, mass}], patches [{center, radius, density}]; at least one entry.
inline Measure parse_measure(const json& j) {
  using namespace detail;
  only_keys(j, "$", {"name", "atoms", "patches"});
  Measure mu;
  if (j.contains("atoms")) {
    const json& atoms = j["atoms"];
    if (!atoms.is_array()) throw ParseError("$.atoms", "expected an array");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const std::string p = "$.atoms[" + std::to_string(i) + "]";
      only_keys(atoms[i], p, {"at", "mass"});
      const Complex at = point(require(atoms[i], p, "at"), p + ".at");
      for (std::size_t k = 0; k < mu.atoms.size(); ++k)
        if (mu.atoms[k].at == at)
          throw ParseError(p + ".at", "repeats atom " + std::to_string(k));
      mu.atoms.push_back({at, positive(require(atoms[i], p, "mass"), p + ".mass")});
    }
  }
  if (j.contains("patches")) {
    const json& patches = j["patches"];
    if (!patches.is_array()) throw ParseError("$.patches", "expected an array");
    for (std::size_t i = 0; i < patches.size(); ++i) {
      const std::string p = "$.patches[" + std::to_string(i) + "]";
      only_keys(patches[i], p, {"center", "radius", "density"});
      Patch pt;
      pt.center = point(require(patches[i], p, "center"), p + ".center");
      pt.radius = positive(require(patches[i], p, "radius"), p + ".radius");
      pt.density = number(require(patches[i], p, "density"), p + ".density");
      if (pt.density < 0.0) throw ParseError(p + ".density", "must be >= 0");
      mu.patches.push_back(pt);
    }
  }
  if (!(mu.total_mass() > 0.0)) throw ParseError("$", "measure has zero total mass");
  return mu;
}

inline Measure parse_measure_text(const std::string& text) {
  return parse_measure(detail::parse_text(text, "measure"));
}

inline Measure load_measure(const std::filesystem::path& p) {
  return parse_measure(detail::parse_text(detail::read_file(p), p.string()));
}

}  // namespace peakpoint::io
