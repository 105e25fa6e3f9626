#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace skagree;
using namespace skagree::testing;

namespace {

double h2_bits(double q) { return q <= 0 || q >= 1 ? 0.0 : -q * std::log2(q) - (1 - q) * std::log2(1 - q); }

// I(X;Y|J) in nats from the slice structure: the J = 0 and J = 1 slices are
// point masses and the J = e slice is a DSBS with crossover p / w.
double slice_oracle(double p, double eps, double theta) {
  const double a = (1 - p) / 2 * (1 - (1 - eps) * theta);
  const double w = 2 * a + p;
  const double c = p / w;
  const double hc = c <= 0 || c >= 1 ? 0.0 : -c * std::log(c) - (1 - c) * std::log(1 - c);
  return w * (std::log(2.0) - hc);
}

}  // namespace

TEST(Dsbe, PmfAndThresholds) {
  const auto p = dsbe_pmf(0.4);
  EXPECT_DOUBLE_EQ(p(0, 0), 0.3);
  EXPECT_DOUBLE_EQ(p(0, 1), 0.2);
  EXPECT_THROW(dsbe_pmf(1.2), Error);
  EXPECT_THROW(dsbe_pmf(-0.1), Error);
  const auto t = dsbe_thresholds(0.4);
  EXPECT_NEAR(t.eps2, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(t.oneway, 0.96, 1e-15);
  EXPECT_EQ(dsbe_thresholds(0.5).eps2, 1.0);
  EXPECT_EQ(dsbe_thresholds(0.5).oneway, 1.0);
  EXPECT_EQ(dsbe_thresholds(0.0).eps2, 0.0);
  EXPECT_EQ(dsbe_thresholds(0.0).oneway, 0.0);
  EXPECT_EQ(canonical_crossover(0.7), 1.0 - 0.7);
}

TEST(Dsbe, OnewayDominatesEps2) {
  for (int i = 1; i < 1000; ++i) {
    const double p = i / 1000.0;
    const auto t = dsbe_thresholds(p);
    if (i == 500)
      EXPECT_EQ(t.oneway, t.eps2);
    else
      EXPECT_GT(t.oneway, t.eps2);
  }
}

TEST(Dsbe, ThresholdsAgreeWithGeneralModule) {
  for (int i = 1; i <= 9; ++i) {
    const double p = 0.05 * i;
    EXPECT_EQ(epsilon2(dsbe_pmf(p)).value, dsbe_thresholds(p).eps2);
    EXPECT_NEAR(oneway_zero_threshold(bsc(p)), dsbe_thresholds(p).oneway, 1e-4);
  }
}

TEST(Dsbe, RepetitionRateExamples) {
  EXPECT_EQ(repetition_rate(0.4, 0.0, 3), 0.0);
  EXPECT_NEAR(repetition_rate(0.4, 1.0, 1), 1 - h2_bits(0.4), 1e-15);
  EXPECT_NEAR(repetition_rate(0.4, 1.0, 1), 0.02905, 1e-5);
  const double q = 0.0256 / (0.0256 + 0.1296);
  EXPECT_NEAR(q, 0.16495, 1e-5);
  EXPECT_NEAR(repetition_rate(0.4, 0.9, 4), 0.1552 / 4 * std::max(0.0, 0.6561 - h2_bits(q)), 1e-12);
  EXPECT_THROW(repetition_rate(0.4, 0.5, 0), Error);
  EXPECT_THROW(repetition_rate(0.4, 1.5, 2), Error);
}

TEST(Dsbe, RepetitionBelowConditionalInformation) {
  for (int pi = 1; pi <= 9; ++pi) {
    const double p = 0.05 * pi;
    const double e2 = dsbe_thresholds(p).eps2;
    for (int ei = 0; ei <= 50; ++ei) {
      const double eps = ei / 50.0;
      const double ci = nats_to_bits(conditional_mutual_information(dsbe_source(p, eps)));
      for (unsigned n = 1; n <= 8; ++n) {
        const double r = repetition_rate(p, eps, n);
        EXPECT_GE(r, 0.0);
        EXPECT_LE(r, ci + 1e-9);
        if (eps <= e2) { EXPECT_EQ(r, 0.0) << p << " " << eps << " " << n; }
      }
    }
  }
}

TEST(Dsbe, ConditionalJMatchesSliceOracle) {
  for (double p : {0.1, 0.25, 0.4}) {
    for (int ei = 0; ei <= 10; ++ei)
      for (int ti = 0; ti <= 10; ++ti) {
        const double eps = ei / 10.0, theta = ti / 10.0;
        EXPECT_NEAR(dsbe_i_xy_given_j(p, eps, theta), slice_oracle(p, eps, theta), 1e-12);
      }
  }
}

TEST(Dsbe, B0SubExamples) {
  const double info = nats_to_bits(mutual_information(dsbe_pmf(0.4)));
  EXPECT_NEAR(b0_sub(0.4, 1.0), info, 1e-12);
  EXPECT_NEAR(b0_sub(0.4, 1.0), 0.02905, 1e-5);
  EXPECT_EQ(b0_sub(0.4, 0.5), 0.0);
  EXPECT_GT(b0_sub(0.4, 0.9), 0.0);
  EXPECT_NEAR(b0_sub(0.4, 0.9), nats_to_bits(slice_oracle(0.4, 0.9, 1.0)), 1e-12);
  EXPECT_EQ(b0_sub(0.4, 0.0), 0.0);
  EXPECT_EQ(b0_sub(0.6, 0.8), b0_sub(0.4, 0.8));
}

TEST(Dsbe, B0SubIsMinimumOverFamily) {
  for (double p : {0.1, 0.3, 0.45})
    for (int ei = 0; ei <= 20; ++ei) {
      const double eps = ei / 20.0;
      const double b = bits_to_nats(b0_sub(p, eps));
      for (int ti = 0; ti <= 200; ++ti) EXPECT_LE(b, dsbe_i_xy_given_j(p, eps, ti / 200.0) + 1e-13);
      EXPECT_LE(b, eps * mutual_information(dsbe_pmf(p)) + 1e-13);
    }
}

TEST(Dsbe, B0SubTransitionAtEps2) {
  for (int pi = 2; pi <= 9; ++pi) {
    const double p = 0.05 * pi;
    const double e2 = p / (1 - p);
    for (int ei = 0; ei <= 100; ++ei) {
      const double eps = ei / 100.0;
      if (eps <= e2) { EXPECT_EQ(b0_sub(p, eps), 0.0) << p << " " << eps; }
    }
    EXPECT_EQ(b0_sub(p, e2), 0.0);
    if (e2 + 1e-6 <= 1.0) { EXPECT_GT(b0_sub(p, e2 + 1e-6), 0.0) << p; }
    for (double eps = e2 + 0.01; eps <= 1.0; eps += 0.01) EXPECT_GT(b0_sub(p, eps), 0.0);
  }
}

TEST(Dsbe, SowTransitionAtOneway) {
  for (double p : {0.1, 0.2, 0.3, 0.4}) {
    const double t = dsbe_thresholds(p).oneway;
    for (int k = 0; k <= 10; ++k) {
      const double eps = t * k / 10.0 - (k == 10 ? 1e-3 : 0.0);
      EXPECT_LE(s_ow_lower_bound(p, eps), 1e-9) << p << " " << eps;
    }
    for (double eps = t + 0.01; eps <= 1.0; eps += 0.01) EXPECT_GT(s_ow_lower_bound(p, eps), 0.0) << p << " " << eps;
  }
  EXPECT_GT(s_ow_lower_bound(0.4, 0.98), 0.0);
}

TEST(Dsbe, SowAtBlindEve) {
  for (double p : {0.1, 0.25, 0.4})
    EXPECT_NEAR(s_ow_lower_bound(p, 1.0), nats_to_bits(mutual_information(dsbe_pmf(p))), 1e-9);
}

TEST(Dsbe, SowBelowUpperBounds) {
  for (int ei = 0; ei <= 20; ++ei) {
    const double eps = ei / 20.0;
    const double s = s_ow_lower_bound(0.3, eps);
    EXPECT_LE(s, b0_sub(0.3, eps) + 1e-9);
    EXPECT_LE(s, nats_to_bits(eps * mutual_information(dsbe_pmf(0.3))) + 1e-9);
  }
}

TEST(Dsbe, CurvesGridOrderAndInvariants) {
  const auto grid = linear_grid(0.0, 1.0, 41);
  ASSERT_EQ(grid.size(), 41u);
  EXPECT_EQ(grid.front(), 0.0);
  EXPECT_EQ(grid.back(), 1.0);
  const auto a = emit_curves(0.4, grid, 6, 4);
  const auto b = emit_curves(0.4, grid, 6, 1);
  ASSERT_EQ(a.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& c = a[i];
    EXPECT_EQ(c.epsilon, grid[i]);
    EXPECT_EQ(c.b0_sub, b[i].b0_sub);
    EXPECT_EQ(c.s_ow_lb, b[i].s_ow_lb);
    ASSERT_EQ(c.r_n.size(), 5u);
    EXPECT_GE(c.i_xy_given_z, 0.0);
    EXPECT_GE(c.b0_sub, 0.0);
    EXPECT_GE(c.s_ow_lb, 0.0);
    EXPECT_LE(c.b0_sub, c.i_xy_given_z + 1e-9);
    for (double r : c.r_n) {
      EXPECT_GE(r, 0.0);
      EXPECT_LE(r, c.i_xy_given_z + 1e-9);
      if (c.epsilon <= 2.0 / 3.0) { EXPECT_EQ(r, 0.0); }
    }
  }
  const auto& first = a.front();
  EXPECT_EQ(first.i_xy_given_z, 0.0);
  EXPECT_EQ(first.b0_sub, 0.0);
  EXPECT_EQ(first.s_ow_lb, 0.0);
  const auto& last = a.back();
  EXPECT_NEAR(last.i_xy_given_z, last.b0_sub, 1e-12);
  EXPECT_THROW(emit_curves(0.4, {0.5, 1.1}), Error);
  EXPECT_THROW(emit_curves(0.4, grid, 1), Error);
}
