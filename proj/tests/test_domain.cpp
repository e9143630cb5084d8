#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "peakpoint/domain.hpp"

using namespace peakpoint;

namespace {

DomainSpec punctured() { return DomainSpec::with_obstacles({}, {0.0, 0.0}, 0.5, {}); }

DomainSpec roadrunner(double a, double C, double beta, int horizon = 200,
                      ObstacleKind kind = ObstacleKind::disk) {
  return DomainSpec::with_generator({}, {0.0, 0.0}, a, {kind, C, beta, horizon});
}

}  // namespace

TEST(Domain, ContainsExamples) {
  EXPECT_TRUE(contains(punctured(), {0.5, 0.0}));
  EXPECT_FALSE(contains(punctured(), {0.0, 0.0}));
  EXPECT_FALSE(contains(punctured(), {1.0, 0.0}));
  const auto d = roadrunner(0.5, 0.25, 1.0);
  EXPECT_FALSE(contains(d, {0.5 * 0.75, 0.0}));  // center of obstacle 1
  EXPECT_FALSE(contains(d, d.zeta()));
  EXPECT_TRUE(contains(d, {0.0, 0.3}));
}

TEST(Domain, AnnulusObstaclesFromGenerator) {
  const double a = 0.5;
  const auto d = roadrunner(a, 0.5 * a, 1.0);  // r_n = 0.5 a^{n+1}
  const auto obs = annulus_obstacles(d, 3);
  ASSERT_EQ(obs.size(), 1u);
  EXPECT_EQ(obs[0].kind, ObstacleKind::disk);
  EXPECT_DOUBLE_EQ(obs[0].radius, 0.5 * std::pow(a, 4));
  EXPECT_DOUBLE_EQ(obs[0].center.real(), std::pow(a, 3) * (1 + a) / 2);
  EXPECT_TRUE(annulus_obstacles(d, 0).empty());
  EXPECT_TRUE(annulus_obstacles(punctured(), 5).empty());
}

TEST(Domain, ExplicitObstacleAssignedToItsAnnulus) {
  // A_2 for a = 0.5 is 0.125 <= |z| <= 0.25
  const auto d = DomainSpec::with_obstacles({}, {0.0, 0.0}, 0.5,
                                            {Obstacle::disk({0.0, 0.19}, 0.03)});
  EXPECT_TRUE(annulus_obstacles(d, 1).empty());
  EXPECT_EQ(annulus_obstacles(d, 2).size(), 1u);
  EXPECT_TRUE(annulus_obstacles(d, 3).empty());
  const auto content = annulus_content(d, 2);
  ASSERT_EQ(content.inside.size(), 1u);
  EXPECT_NEAR(content.inside[0].radius, 0.12, 1e-15);
}

TEST(Domain, HorizonIsNeverSilentlyTruncated) {
  const auto d = roadrunner(0.5, 0.25, 1.0, 10);
  EXPECT_NO_THROW(annulus_obstacles(d, 10));
  EXPECT_THROW(annulus_obstacles(d, 11), HorizonExceeded);
  EXPECT_THROW(annulus_content(d, 11), HorizonExceeded);
}

TEST(Domain, ValidationRejectsBadSpecs) {
  EXPECT_THROW(DomainSpec::with_obstacles({}, {0.0, 0.0}, 1.5, {}), std::invalid_argument);
  EXPECT_THROW(DomainSpec::with_obstacles({}, {2.0, 0.0}, 0.5, {}), std::invalid_argument);
  EXPECT_THROW(DomainSpec::with_obstacles({}, {0.0, 0.0}, 0.5, {Obstacle::disk({0.1, 0}, 0.2)}),
               std::invalid_argument);  // contains zeta
  EXPECT_THROW(DomainSpec::with_obstacles({}, {0.0, 0.0}, 0.5, {Obstacle::disk({0.9, 0}, 0.2)}),
               std::invalid_argument);  // leaves the ambient disk
  EXPECT_THROW(DomainSpec::with_obstacles(
                   {}, {0.0, 0.0}, 0.5,
                   {Obstacle::disk({0.5, 0}, 0.1), Obstacle::segment({0.5, -0.3}, {0.5, 0.3})}),
               std::invalid_argument);  // overlap
  EXPECT_THROW(Obstacle::disk({0, 0}, 0.0), std::invalid_argument);
  EXPECT_THROW(Obstacle::segment({0.1, 0}, {0.1, 0}), std::invalid_argument);
  EXPECT_THROW(roadrunner(0.5, 0.25, 0.5), std::invalid_argument);
}

TEST(Domain, ClippingIsReported) {
  const auto d = roadrunner(0.5, 1.0, 2.0);
  ASSERT_EQ(d.warnings().size(), 1u);
  EXPECT_NE(d.warnings()[0].find("1..1"), std::string::npos);
  EXPECT_DOUBLE_EQ(d.generated_size(1).to_double(), 0.25);
  EXPECT_DOUBLE_EQ(d.generated_size(2).to_double(), 0.25);
  EXPECT_DOUBLE_EQ(d.generated_size(3).to_double(), 0.125);
  EXPECT_TRUE(roadrunner(0.5, 0.25, 1.0).warnings().empty());
}

TEST(Domain, GeneratedObstaclesStayInTheirAnnuli) {
  for (double a : {0.3, 0.5, 0.8}) {
    for (double beta : {1.0, 1.5, 2.0}) {
      for (auto kind : {ObstacleKind::disk, ObstacleKind::segment}) {
        const auto d = roadrunner(a, 0.4 * a, beta, 60, kind);
        for (int n = 1; n <= 60; ++n) {
          const auto o = d.generated_normalized(n);
          if (!o) continue;
          // normalized coordinates: annulus is a <= |t| <= 1
          EXPECT_GE(o->distance({0.0, 0.0}), a * (1 - 1e-15)) << a << " " << beta << " " << n;
          EXPECT_LE(o->max_distance({0.0, 0.0}), 1.0 + 1e-15);
        }
      }
    }
  }
}

TEST(Domain, ObstaclePointsAreNotInTheDomainAtAnyDepth) {
  const auto d = roadrunner(0.5, 0.25, 1.0, 4096);
  RandomStream s(3, "obstacle-points");
  for (int n : {1, 2, 17, 300, 1600, 4000}) {
    const ScaledReal an = d.annulus_scale(n);
    const Obstacle o = *d.generated_normalized(n);
    for (int i = 0; i < 50; ++i) {
      const Complex t = disk_point(o.center, o.radius, s.uniform(), s.uniform());
      EXPECT_FALSE(contains_offset(d, ScaledComplex::from(an, t))) << n;
    }
    // midcircle points off the obstacle are in the domain
    const Complex off = Complex(0.75, 0.0) * std::polar(1.0, 2.0);
    EXPECT_TRUE(contains_offset(d, ScaledComplex::from(an, off))) << n;
  }
}

TEST(Domain, ComplementAreaClosedForms) {
  RandomStream s(0, "area");
  const auto d = DomainSpec::with_obstacles({}, {0.0, 0.0}, 0.5,
                                            {Obstacle::disk({0.0, 0.3}, 0.1)});
  EXPECT_DOUBLE_EQ(complement_area(d, 0.5, s).area, std::numbers::pi * 0.01);
  EXPECT_EQ(complement_area(d, 0.15, s).area, 0.0);
  const auto seg = DomainSpec::with_obstacles({}, {0.0, 0.0}, 0.5,
                                              {Obstacle::segment({0.1, 0.0}, {0.6, 0.0}),
                                               Obstacle::segment({0.0, -0.2}, {0.0, -0.7})});
  EXPECT_EQ(complement_area(seg, 0.4, s).area, 0.0);
  EXPECT_EQ(complement_area(punctured(), 0.7, s).area, 0.0);
}

TEST(Domain, ComplementAreaSampledAgainstLens) {
  // Disk obstacle of radius 0.1 centered on the circle |z| = 0.3.
  const auto d = DomainSpec::with_obstacles({}, {0.0, 0.0}, 0.5,
                                            {Obstacle::disk({0.3, 0.0}, 0.1)});
  RandomStream s(11, "area");
  const auto est = complement_area(d, 0.3, s);
  EXPECT_EQ(est.partial_obstacles, 1);
  const double lens = lens_area(0.3, 0.1, 0.3);
  EXPECT_LE(std::abs(est.area - lens), 3.0 * est.sampled_sigma);
  EXPECT_GT(est.sampled_sigma, 0.0);
}

TEST(Domain, LensAreaOracle) {
  // two unit circles at distance 1: 2pi/3 - sqrt(3)/2
  EXPECT_NEAR(lens_area(1.0, 1.0, 1.0), 2 * std::numbers::pi / 3 - std::sqrt(3.0) / 2, 1e-14);
  EXPECT_DOUBLE_EQ(lens_area(1.0, 0.5, 0.2), std::numbers::pi * 0.25);
  EXPECT_EQ(lens_area(1.0, 0.5, 2.0), 0.0);
}

TEST(Domain, ComplementAreaMonotoneOnExactBranch) {
  const auto d = roadrunner(0.5, 0.125, 1.0);
  RandomStream s(0, "area");
  double prev = -1.0;
  // radii a^k avoid cutting any obstacle: obstacles lie strictly inside their annuli
  for (int k = 12; k >= 1; --k) {
    const auto est = complement_area(d, std::pow(0.5, k), s);
    EXPECT_EQ(est.partial_obstacles, 0);
    EXPECT_GE(est.area, prev);
    prev = est.area;
  }
}

TEST(Domain, ExteriorOfAmbientCountsForBoundaryZeta) {
  const auto d = DomainSpec::with_obstacles({}, {1.0, 0.0}, 0.5, {});
  RandomStream s(0, "area");
  // half of a small disk centered on the unit circle lies outside it
  const auto est = complement_area(d, 1e-3, s);
  EXPECT_NEAR(est.area / (std::numbers::pi * 1e-6), 0.5, 1e-3);
  const auto c = annulus_content(d, 3);
  EXPECT_TRUE(c.exterior);
  EXPECT_DOUBLE_EQ(c.exterior_lower, 0.125);
}

TEST(Domain, GridPointsLieInTheDomain) {
  const auto d = roadrunner(0.5, 0.25, 1.0, 4096);
  const auto pts = sample_grid(d);
  EXPECT_GT(pts.size(), 20000u);
  for (const auto& w : pts) ASSERT_TRUE(contains_offset(d, w));
  // the grid reaches annulus 48
  double smallest = 1.0;
  for (const auto& w : pts) smallest = std::min(smallest, std::abs(w));
  EXPECT_LT(smallest, std::pow(0.5, 48));
}
