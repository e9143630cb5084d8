#include <gtest/gtest.h>

#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

#include "peakpoint/cli.hpp"

using namespace peakpoint;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("peakpoint_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Result {
  int code;
  std::string out, err;
};

Result invoke(cli::RunConfig cfg) {
  std::ostringstream out, err;
  const int code = cli::run(cfg, out, err);
  return {code, out.str(), err.str()};
}

cli::RunConfig config(std::string sub, std::string domain, const fs::path& out) {
  cli::RunConfig c;
  c.subcommand = std::move(sub);
  c.domain = std::move(domain);
  c.out = out;
  return c;
}

int shell(const std::string& args) {
  const int st = std::system((std::string(PEAKPOINT_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST(Cli, ClassifyBundledDomains) {
  const auto dir = scratch("classify");
  const auto r = invoke(config("classify", "roadrunner_divergent", dir));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("classification: PEAK_DIVERGENT"), std::string::npos);
  EXPECT_EQ(slurp(dir / "classify.txt"), r.out);
  const auto terms = parse_csv(slurp(dir / "terms.csv"));
  EXPECT_EQ(terms.rows.size(), 100u);

  const auto c = invoke(config("classify", "roadrunner_convergent", dir));
  EXPECT_NE(c.out.find("NONPEAK_CONVERGENT_HEURISTIC"), std::string::npos);
  auto p = config("classify", "punctured_disk", dir);
  p.horizon = 20;
  const auto pr = invoke(p);
  EXPECT_EQ(pr.code, 0);
  EXPECT_EQ(parse_csv(slurp(dir / "terms.csv")).rows.size(), 20u);
}

TEST(Cli, OverridesApply) {
  const auto dir = scratch("overrides");
  auto c = config("classify", "roadrunner_divergent", dir);
  c.ratio = 0.3;
  EXPECT_NE(invoke(c).out.find("ratio_a: " + format_double(0.3)), std::string::npos);
  c.ratio.reset();
  c.point = Complex{0.5, 0.0};
  EXPECT_EQ(invoke(c).code, 0);
  c.point = Complex{2.0, 0.0};
  EXPECT_EQ(invoke(c).code, 2);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("errors");
  std::ofstream(dir / "bad.json") << R"({"zeta": [0,0], "obstacles": [], "colour": 1})";
  const auto r = invoke(config("classify", (dir / "bad.json").string(), dir));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("$.colour"), std::string::npos);
  EXPECT_EQ(invoke(config("classify", "no_such_domain", dir)).code, 2);
  EXPECT_EQ(invoke(config("potential", "roadrunner_divergent", dir)).code, 2);  // no measure
  EXPECT_EQ(invoke(config("frobnicate", "roadrunner_divergent", dir)).code, 2);
  auto ratio = config("classify", "roadrunner_divergent", dir);
  ratio.ratio = 1.0;
  EXPECT_EQ(invoke(ratio).code, 2);
  auto horizon = config("classify", "roadrunner_convergent", dir);
  horizon.horizon = 1000;  // clipped to the file's horizon of 200
  EXPECT_EQ(invoke(horizon).code, 0);
}

TEST(Cli, ExecutableArgumentHandling) {
  const auto dir = scratch("exe");
  EXPECT_EQ(shell("hb-check --out " + dir.string()), 0);
  EXPECT_EQ(shell("classify --domain roadrunner_divergent --point 0.5,0 --out " + dir.string()), 0);
  EXPECT_NE(shell("classify --domain roadrunner_divergent --point 0.5 --out " + dir.string()), 0);
  EXPECT_NE(shell("classify --out " + dir.string()), 0);  // --domain missing
  EXPECT_NE(shell(""), 0);
  EXPECT_EQ(shell("classify --domain " + (dir / "missing.json").string() + " --out " + dir.string()), 2);
}

TEST(Cli, HbCheck) {
  const auto dir = scratch("hb");
  cli::RunConfig c;
  c.subcommand = "hb-check";
  c.out = dir;
  const auto r = invoke(c);
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("flagged_cases: 1"), std::string::npos);
  EXPECT_EQ(parse_csv(slurp(dir / "hb_witnesses.csv")).rows.size(), 1000u);
}

TEST(Cli, PotentialOnConvergentDomain) {
  const auto dir = scratch("potential");
  auto c = config("potential", "roadrunner_convergent", dir);
  c.measure = "ring8";
  c.seed = 3;
  const auto r = invoke(c);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("equation_1_bound_holds: true"), std::string::npos);
  // no peak function on a convergent domain, so no peak powers are reported
  EXPECT_EQ(r.out.find("strongest_peak_power"), std::string::npos);
  EXPECT_EQ(parse_csv(slurp(dir / "cauchy_sequence.csv")).rows.size(), 20u);
  EXPECT_EQ(parse_csv(slurp(dir / "averaged_potential.csv")).rows.size(), 20u);

  const auto again = scratch("potential2");
  c.out = again;
  EXPECT_EQ(invoke(c).out, r.out);
  for (const char* f : {"cauchy_sequence.csv", "averaged_potential.csv", "potential_profile.csv", "potential.txt"})
    EXPECT_EQ(slurp(dir / f), slurp(again / f)) << f;
  c.seed = 4;
  c.out = again;
  invoke(c);
  EXPECT_NE(slurp(dir / "cauchy_sequence.csv"), slurp(again / "cauchy_sequence.csv"));
}

TEST(Cli, AtomAtZetaSkipsCauchy) {
  const auto dir = scratch("atom");
  std::ofstream(dir / "m.json") << R"({"atoms": [{"at": [0,0], "mass": 0.5}, {"at": [0.5,0.5], "mass": 0.5}]})";
  auto c = config("potential", "punctured_disk", dir);
  c.measure = (dir / "m.json").string();
  const auto r = invoke(c);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("cauchy_sequence: skipped"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "cauchy_sequence.csv"));
}
