#include <gtest/gtest.h>

#include <cmath>

#include "peakpoint/rng.hpp"
#include "peakpoint/scaled.hpp"

using namespace peakpoint;

TEST(Scaled, RoundTripsDoubles) {
  for (double x : {1.0, 0.3, 1e-300, 7.5e200, -2.25}) {
    EXPECT_EQ(ScaledReal::from(x).to_double(), x);
    EXPECT_EQ(ScaledComplex::from({x, -x / 3}).to_complex(), Complex(x, -x / 3));
  }
}

TEST(Scaled, PowOfHalfIsExactFarBelowDoubleRange) {
  const ScaledReal p = scaled_pow(0.5, 3000);
  EXPECT_EQ(p.mantissa, 0.5);
  EXPECT_EQ(p.exponent, -2999);
  EXPECT_NEAR(p.log2(), -3000.0, 1e-12);
  EXPECT_EQ(p.to_double(), 0.0);
}

TEST(Scaled, PowMatchesStdPowInRange) {
  for (double b : {0.3, 0.5, 0.77})
    for (int n : {0, 1, 7, 100})
      EXPECT_NEAR(scaled_pow(b, n).to_double() / std::pow(b, n), 1.0, 1e-13);
}

TEST(Scaled, RatiosOfTinyNumbersAreOrdinary) {
  const ScaledReal s = scaled_pow(0.5, 2000);
  const ScaledComplex w = ScaledComplex::from(s, {0.75, 0.25});
  EXPECT_FALSE(w.representable());
  const Complex q = ratio(w, s);
  EXPECT_DOUBLE_EQ(q.real(), 0.75);
  EXPECT_DOUBLE_EQ(q.imag(), 0.25);
  EXPECT_NEAR(w.abs().log2(), -2000.0 + std::log2(std::abs(Complex(0.75, 0.25))), 1e-12);
}

TEST(Scaled, DifferenceAlignsExponents) {
  const ScaledReal s = scaled_pow(0.5, 1500);
  const ScaledComplex a = ScaledComplex::from(s, {3.0, 0.0});
  const ScaledComplex b = ScaledComplex::from(s, {1.0, 1.0});
  const Complex d = ratio(a - b, s);
  EXPECT_DOUBLE_EQ(d.real(), 2.0);
  EXPECT_DOUBLE_EQ(d.imag(), -1.0);
  EXPECT_TRUE(ratio(a + b, s) == Complex(4.0, 1.0));
}

TEST(Scaled, OrderingAndFormatting) {
  EXPECT_TRUE(scaled_pow(0.5, 2000) < scaled_pow(0.5, 1999));
  EXPECT_EQ(format_scaled(ScaledReal::from(0.25)), "2.5000000000000000e-01");
  EXPECT_EQ(format_scaled(scaled_pow(10.0, 400)).substr(0, 6), "1.0000");
  EXPECT_NE(format_scaled(scaled_pow(10.0, 400)).find("e+400"), std::string::npos);
}

TEST(Rng, StreamsAreReproducibleAndKeyedByPurpose) {
  RandomStream a(7, "grid"), b(7, "grid"), c(7, "area"), d(8, "grid");
  int diff_purpose = 0, diff_seed = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    diff_purpose += x != c.next_u64();
    diff_seed += x != d.next_u64();
  }
  EXPECT_EQ(diff_purpose, 100);
  EXPECT_EQ(diff_seed, 100);
}

TEST(Rng, UniformMeanAndRange) {
  RandomStream s(0, "test");
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}
