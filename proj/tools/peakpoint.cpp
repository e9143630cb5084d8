#include <CLI11.hpp>

#include "peakpoint/cli.hpp"

namespace {

std::optional<peakpoint::Complex> parse_point(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw CLI::ValidationError("--point", "expected RE,IM");
  try {
    std::size_t n1 = 0, n2 = 0;
    const double re = std::stod(s.substr(0, comma), &n1);
    const double im = std::stod(s.substr(comma + 1), &n2);
    if (n1 != comma || n2 != s.size() - comma - 1) throw std::invalid_argument(s);
    return peakpoint::Complex{re, im};
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("--point", "expected RE,IM");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"peak points and the Caratheodory distance on Roadrunner domains"};
  app.require_subcommand(1);
  peakpoint::cli::RunConfig cfg;
  std::string point, out = ".";
  double ratio = 0.0;

  auto common = [&](CLI::App* sub, bool needs_domain) {
    auto* o = sub->add_option("--domain", cfg.domain, "domain JSON file or bundled name");
    if (needs_domain) o->required();
    sub->add_option("--point", point, "override zeta, as RE,IM");
    sub->add_option("--ratio", ratio, "override the annulus ratio a")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--horizon", cfg.horizon, "number of series terms")->check(CLI::PositiveNumber);
    sub->add_option("--threshold", cfg.threshold, "divergence threshold for the series");
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--out", out, "output directory");
  };
  common(app.add_subcommand("classify", "classify the Melnikov series"), true);
  common(app.add_subcommand("series", "write the series terms"), true);
  common(app.add_subcommand("peak", "construct and verify a peak function"), true);
  common(app.add_subcommand("distance", "blow-up certificate for the distance"), true);
  auto* pot = app.add_subcommand("potential", "potential-theoretic measure checks");
  common(pot, true);
  pot->add_option("--measure", cfg.measure, "measure JSON file or bundled name")->required();
  common(app.add_subcommand("hb-check", "superlinear functional with no linear extension"), false);

  CLI11_PARSE(app, argc, argv);

  cfg.subcommand = app.get_subcommands().front()->get_name();
  const CLI::App* sub = app.get_subcommands().front();
  try {
    if (sub->count("--point")) cfg.point = parse_point(point);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  }
  if (sub->count("--ratio")) cfg.ratio = ratio;
  cfg.out = out;
  return peakpoint::cli::run(cfg, std::cout, std::cerr);
}
