#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace skagree;
using namespace skagree::testing;
using Rows = std::vector<std::vector<double>>;

namespace {

// Alternating conditional expectations: the fixed point of f -> E[g(Y)|X],
// g -> E[f(X)|Y] with centring and scaling is the top nontrivial singular pair.
double ace_correlation(const JointPmf& p, std::uint64_t seed) {
  const auto px = p.x_marginal(), py = p.y_marginal();
  const std::size_t nx = p.x_size(), ny = p.y_size();
  auto g_rng = rng(seed);
  std::normal_distribution<double> n01;
  std::vector<double> f(nx), g(ny);
  for (double& v : g) v = n01(g_rng);
  auto standardize = [](std::vector<double>& v, const std::vector<double>& w) {
    double m = 0, s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) m += w[i] * v[i];
    for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * (v[i] - m) * (v[i] - m);
    for (double& x : v) x = s > 0 ? (x - m) / std::sqrt(s) : 0.0;
  };
  standardize(g, py);
  double rho = 0.0;
  for (int it = 0; it < 20000; ++it) {
    for (std::size_t x = 0; x < nx; ++x) {
      f[x] = 0;
      for (std::size_t y = 0; y < ny; ++y) f[x] += p(x, y) / px[x] * g[y];
    }
    standardize(f, px);
    for (std::size_t y = 0; y < ny; ++y) {
      g[y] = 0;
      for (std::size_t x = 0; x < nx; ++x) g[y] += p(x, y) / py[y] * f[x];
    }
    standardize(g, py);
    double r = 0;
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y) r += p(x, y) * f[x] * g[y];
    if (std::abs(r - rho) < 1e-15 && it > 10) break;
    rho = r;
  }
  return std::abs(rho);
}

const std::vector<double> kAlphas{0.25, 0.5, 1.0, 2.0, 5.0, kInf};

}  // namespace

TEST(MaximalCorrelation, Examples) {
  EXPECT_NEAR(maximal_correlation(product_joint({0.3, 0.7}, {0.2, 0.8})), 0.0, 1e-12);
  EXPECT_NEAR(maximal_correlation(from_rows({{0.5, 0.0}, {0.0, 0.5}})), 1.0, 1e-12);
  EXPECT_NEAR(maximal_correlation(from_rows({{0.3, 0.2}, {0.2, 0.3}})), 0.2, 1e-12);
  EXPECT_EQ(maximal_correlation(from_rows({{0.5, 0.5}})), 0.0);
}

TEST(MaximalCorrelation, MatchesAlternatingMaximization) {
  auto g = rng(20);
  for (int t = 0; t < 100; ++t) {
    const auto p = random_joint(g, 2 + t % 2, 2 + (t / 2) % 2, 0.01);
    double ace = 0.0;
    for (std::uint64_t s = 0; s < 3; ++s) ace = std::max(ace, ace_correlation(p, 1000 + 3 * t + s));
    EXPECT_NEAR(maximal_correlation(p), ace, 1e-6);
  }
}

TEST(Eta, Examples) {
  EXPECT_NEAR(eta(validate_channel(Rows{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}})).eta, 1.0, 1e-9);
  EXPECT_NEAR(eta(validate_channel(Rows{{0.2, 0.8}, {0.2, 0.8}})).eta, 0.0, 1e-12);
  const auto r = eta(validate_channel(Rows{{0.6, 0.4}, {0.4, 0.6}}));
  EXPECT_NEAR(r.eta, 0.04, 1e-6);
  EXPECT_NEAR(r.rho_m, 0.2, 1e-5);
  EXPECT_NEAR(r.input_pmf_at_max[0], 0.5, 1e-3);
}

TEST(Eta, BinaryInputMatchesDenseGrid) {
  auto g = rng(21);
  for (int t = 0; t < 30; ++t) {
    const auto ch = random_channel(g, 2, 3, 0.01);
    double grid = 0.0;
    for (int k = 1; k < 20000; ++k) {
      const double a = k / 20000.0;
      const double r = maximal_correlation(joint_from_channel({a, 1 - a}, ch));
      grid = std::max(grid, r * r);
    }
    const double e = eta(ch).eta;
    EXPECT_GE(e, grid - 1e-6);
    EXPECT_LE(e, grid + 1e-6);
  }
}

TEST(JAlpha, Examples) {
  const auto dsbs = from_rows({{0.3, 0.2}, {0.2, 0.3}});
  for (double a : kAlphas) EXPECT_NEAR(j_alpha(product_joint({0.4, 0.6}, {0.1, 0.9}), a), 0.0, 1e-12);
  EXPECT_EQ(j_alpha(from_rows({{0.5, 0.0}, {0.0, 0.5}}), kInf), kInf);
  EXPECT_NEAR(j_alpha(dsbs, kInf), 2.0 * std::log(1.5), 1e-12);
  EXPECT_NEAR(j_alpha(dsbs, kInf), 0.81093, 1e-5);
  EXPECT_THROW(j_alpha(dsbs, 0.0), Error);
  EXPECT_THROW(j_alpha(dsbs, -1.0), Error);
}

TEST(JInfinity, Examples) {
  EXPECT_NEAR(j_infinity(product_joint({0.4, 0.6}, {0.1, 0.9})), 0.0, 1e-12);
  EXPECT_NEAR(j_infinity(from_rows({{0.3, 0.2}, {0.2, 0.3}})), std::log(2.25), 1e-12);
  EXPECT_EQ(j_infinity(from_rows({{0.5, 0.2}, {0.0, 0.3}})), kInf);
}

TEST(JAlpha, FaithfulAndSymmetric) {
  auto g = rng(22);
  for (int t = 0; t < 200; ++t) {
    const auto prod = product_joint(random_pmf(g, 3), random_pmf(g, 2));
    const auto dep = random_joint(g, 3, 2);
    const double a = kAlphas[static_cast<std::size_t>(t) % kAlphas.size()];
    EXPECT_NEAR(j_alpha(prod, a), 0.0, 1e-9);
    EXPECT_GT(j_alpha(dep, a), 0.0);
    EXPECT_NEAR(j_alpha(dep, a), j_alpha(dep.transpose(), a), 1e-10);
  }
}

TEST(JAlpha, Additive) {
  auto g = rng(23);
  for (int t = 0; t < 200; ++t) {
    const auto p1 = random_joint(g, 2, 2), p2 = random_joint(g, 2, 3);
    const double a = kAlphas[static_cast<std::size_t>(t) % kAlphas.size()];
    EXPECT_NEAR(j_alpha(kron(p1, p2), a), j_alpha(p1, a) + j_alpha(p2, a), 1e-9);
  }
}

TEST(JAlpha, DataProcessing) {
  auto g = rng(24);
  for (int t = 0; t < 200; ++t) {
    const auto p = random_joint(g, 3, 3);
    const auto ca = random_channel(g, 3, 2, 0.01), cb = random_channel(g, 3, 3, 0.01);
    const double a = kAlphas[static_cast<std::size_t>(t) % kAlphas.size()];
    EXPECT_LE(j_alpha(post_process(p, ca, cb), a), j_alpha(p, a) + 1e-9);
  }
}

TEST(JInfinity, EqualsTwiceLogInverseEpsilon2) {
  auto g = rng(25);
  for (int t = 0; t < 200; ++t) {
    const auto p = random_joint(g, 2 + t % 4, 2 + t % 3);
    EXPECT_NEAR(j_infinity(p), 2.0 * std::log(1.0 / epsilon2(p).value), 1e-9);
    EXPECT_NEAR(j_alpha(p, kInf), j_infinity(p), 1e-9);
  }
}

TEST(UncertaintyProduct, Examples) {
  EXPECT_EQ(uncertainty_product_bound(validate_channel(Rows{{1, 0}, {0, 1}}), 3), kInf);
  EXPECT_EQ(uncertainty_product_bound(validate_channel(Rows{{0.3, 0.7}, {0.3, 0.7}}), 3), 0.0);
  EXPECT_NEAR(uncertainty_product_bound(validate_channel(Rows{{0.6, 0.4}, {0.4, 0.6}}), 10), 10 * std::log(2.25), 1e-12);
  EXPECT_NEAR(uncertainty_product_bound(validate_channel(Rows{{0.6, 0.4}, {0.4, 0.6}}), 10), 8.109, 1e-3);
  EXPECT_THROW(uncertainty_product_bound(validate_channel(Rows{{1, 0}, {0, 1}}), 0), Error);
}

TEST(UncertaintyProduct, HoldsForRepetitionDecoders) {
  // Two messages sent by repeating the bit n times over BSC(0.4) and decoded
  // by majority (ties to 0): the exact decoder statistics obey the bound.
  const auto bsc = validate_channel(Rows{{0.6, 0.4}, {0.4, 0.6}});
  for (unsigned n = 1; n <= 9; ++n) {
    double p_err = 0.0;  // P(decode 1 | send 0)
    double q_err = 0.0;  // P(decode 0 | send 1)
    for (unsigned k = 0; k <= n; ++k) {
      const double c = std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0));
      const double prob = c * std::pow(0.4, k) * std::pow(0.6, n - k);  // k flips
      if (2 * k > n) p_err += prob;
      if (2 * k >= n) q_err += prob;
    }
    const auto decoder = validate_channel(Rows{{1 - p_err, p_err}, {q_err, 1 - q_err}});
    EXPECT_TRUE(uncertainty_product_holds(decoder, bsc, n));
  }
}

TEST(Doeblin, Examples) {
  EXPECT_EQ(doeblin_coefficient(validate_channel(Rows{{1, 0}, {0, 1}})), 0.0);
  EXPECT_NEAR(doeblin_coefficient(validate_channel(Rows{{0.3, 0.7}, {0.3, 0.7}})), 1.0, 1e-15);
  const double eps = 0.35;
  EXPECT_NEAR(doeblin_coefficient(validate_channel(Rows{{eps, 1 - eps, 0, 0}, {eps, 0, 1 - eps, 0}, {eps, 0, 0, 1 - eps}})),
              eps, 1e-15);
}

TEST(Degradation, Examples) {
  const auto q = validate_channel(Rows{{0.2, 0.5, 0.3}, {0.6, 0.1, 0.3}});
  const auto d0 = erasure_degradation_channel(q, 0.0);
  ASSERT_TRUE(d0.has_value());
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t r = 0; r < 3; ++r) EXPECT_NEAR(d0->channel(a, r), q(a, r), 1e-15);
  EXPECT_FALSE(erasure_degradation_channel(validate_channel(Rows{{1, 0}, {0, 1}}), 0.3).has_value());

  const auto er = validate_channel(Rows{{0.5, 0.5, 0.0}, {0.5, 0.0, 0.5}});
  const auto d = erasure_degradation_channel(er, 0.5);
  ASSERT_TRUE(d.has_value());
  EXPECT_NEAR(d->channel(2, 0), 1.0, 1e-15);  // the erasure input maps to the erasure output
  const std::vector<double> ref{0.5, 0.5};
  const Matrix m = degraded_marginal(d->channel, ref, 0.5);
  for (Eigen::Index a = 0; a < 2; ++a)
    for (Eigen::Index r = 0; r < 3; ++r) EXPECT_NEAR(m(a, r), 0.5 * er(a, r), 1e-15);
  EXPECT_THROW(erasure_degradation_channel(er, 1.2), Error);
}

TEST(Degradation, FeasibleIffDoeblinAtLeastEpsilon) {
  auto g = rng(26);
  std::uniform_int_distribution<int> size(2, 5);
  for (int t = 0; t < 300; ++t) {
    // Mix a random channel with a shared column so Doeblin spans (0, 1).
    const std::size_t na = size(g), nr = size(g);
    auto base = random_channel(g, na, nr);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double mix = u(g);
    const std::size_t col = static_cast<std::size_t>(t) % nr;
    Matrix m = (1 - mix) * base.probs();
    m.col(static_cast<Eigen::Index>(col)).array() += mix;
    const auto q = validate_channel(m, default_labels(na), default_labels(nr));
    const auto ref = random_pmf(g, na, 0.05);
    const double doeblin = doeblin_coefficient(q);
    for (int k = 0; k <= 20; ++k) {
      const double eps = k / 20.0;
      const auto d = erasure_degradation_channel(q, eps, ref);
      EXPECT_EQ(d.has_value(), doeblin >= eps);
      if (!d) continue;
      const Matrix marg = degraded_marginal(d->channel, ref, eps);
      for (Eigen::Index a = 0; a < static_cast<Eigen::Index>(na); ++a)
        for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(nr); ++r)
          EXPECT_NEAR(marg(a, r), ref[static_cast<std::size_t>(a)] * q(a, r), 1e-10);
    }
  }
}
