#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace skagree;
using namespace skagree::testing;
using Rows = std::vector<std::vector<double>>;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidInstance;
}

}  // namespace

TEST(ValidateJoint, AcceptsDsbs) {
  const auto p = from_rows({{0.3, 0.2}, {0.2, 0.3}});
  EXPECT_EQ(p.x_size(), 2u);
  EXPECT_DOUBLE_EQ(p(0, 1), 0.2);
  EXPECT_EQ(p.x_alphabet(), (Labels{"0", "1"}));
}

TEST(ValidateJoint, PointMass) {
  const auto p = validate_joint(Rows{{1.0}}, {"a"}, {"b"});
  EXPECT_EQ(p(0, 0), 1.0);
}

TEST(ValidateJoint, Errors) {
  EXPECT_EQ(code_of([] { validate_joint({{0.5, 0.6}}); }), ErrorCode::NotNormalized);
  EXPECT_EQ(code_of([] { validate_joint({{1.2, -0.2}}); }), ErrorCode::NegativeEntry);
  EXPECT_EQ(code_of([] { validate_joint(Rows{{0.5, 0.5}}, {"a", "b"}, {"c"}); }), ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([] { validate_joint(Rows{{0.5, 0.5}}, {"a"}, {"c", "c"}); }), ErrorCode::DuplicateLabel);
  EXPECT_EQ(code_of([] { validate_joint({{0.5, 0.5}, {0.5}}); }), ErrorCode::DimensionMismatch);
}

TEST(ValidateJoint, RenormalizesWithinTolerance) {
  const auto p = validate_joint({{0.5, 0.5 + 5e-10}});
  EXPECT_NEAR(p.probs().sum(), 1.0, 1e-15);
  EXPECT_EQ(code_of([] { validate_joint({{0.5, 0.5 + 5e-9}}); }), ErrorCode::NotNormalized);
}

TEST(ValidateChannel, RowsMustSumToOne) {
  EXPECT_EQ(code_of([] { validate_channel({{0.5, 0.4}, {0.5, 0.5}}); }), ErrorCode::NotNormalized);
  const auto ch = validate_channel({{0.5, 0.5}, {1.0, 0.0}});
  EXPECT_EQ(ch(1, 0), 1.0);
}

TEST(ErasureSource, MaterializedChannel) {
  const auto p = from_rows({{0.3, 0.2}, {0.2, 0.3}});
  const auto s0 = build_erasure_source(p, 0.0).eve_channel();
  const auto s1 = build_erasure_source(p, 1.0).eve_channel();
  ASSERT_EQ(s0.output_size(), 5u);
  EXPECT_EQ(s0.output_alphabet()[0], "e");
  for (std::size_t r = 0; r < 4; ++r) {
    EXPECT_EQ(s0(r, 0), 0.0);
    EXPECT_EQ(s0(r, r + 1), 1.0);
    EXPECT_EQ(s1(r, 0), 1.0);
    EXPECT_EQ(s1(r, r + 1), 0.0);
  }
  const auto s = build_erasure_source(p, 0.7).eve_channel();
  EXPECT_EQ(s(2, 0), 0.7);
  EXPECT_EQ(s(2, 3), 1.0 - 0.7);
  EXPECT_EQ(code_of([&] { build_erasure_source(p, 1.5); }), ErrorCode::EpsilonOutOfRange);
  EXPECT_EQ(code_of([&] { build_erasure_source(p, -0.1); }), ErrorCode::EpsilonOutOfRange);
}

TEST(ErasureSource, JointXyzSumsToOne) {
  auto g = rng(1);
  const auto src = build_erasure_source(random_joint(g, 3, 4), 0.35);
  const auto j = src.joint_xyz();
  double s = 0.0;
  for (double v : j) s += v;
  EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(GeneralSource, RowCountChecked) {
  const auto p = from_rows({{0.3, 0.2}, {0.2, 0.3}});
  const auto ch = validate_channel({{1.0, 0.0}, {0.0, 1.0}});
  EXPECT_EQ(code_of([&] { Source(p, GeneralEve{ch}); }), ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([&] {
              Source(p, GeneralEve{validate_channel({{1.0}, {1.0}, {1.0}, {1.0}})}).epsilon();
            }),
            ErrorCode::NotErasureSource);
}

TEST(Preceq, Reflexive) {
  auto g = rng(2);
  for (int t = 0; t < 50; ++t) {
    const auto p = random_joint(g, 3, 3);
    const auto w = preceq_check(p, p);
    ASSERT_TRUE(w.has_value());
    for (std::size_t x = 0; x < 3; ++x)
      for (std::size_t y = 0; y < 3; ++y) EXPECT_NEAR(w->a[x] * w->b[y] * p(x, y), p(x, y), 1e-12);
  }
}

TEST(Preceq, RestrictedXSupport) {
  // Example 1: keep p_{Y|X} and change the X marginal.
  const auto p = from_rows({{0.3, 0.1}, {0.2, 0.1}, {0.1, 0.2}});
  const std::vector<double> qx{0.5, 0.5, 0.0};
  const auto px = p.x_marginal();
  Matrix qm(3, 2);
  for (Eigen::Index x = 0; x < 3; ++x)
    for (Eigen::Index y = 0; y < 2; ++y) qm(x, y) = qx[static_cast<std::size_t>(x)] * p(x, y) / px[static_cast<std::size_t>(x)];
  const auto q = validate_joint(qm, p.x_alphabet(), p.y_alphabet());
  const auto w = preceq_check(q, p);
  ASSERT_TRUE(w.has_value());
  // a is determined up to the gauge a -> c a, b -> b / c.
  const double c = w->b[0];
  for (std::size_t x = 0; x < 3; ++x) EXPECT_NEAR(w->a[x] * c, qx[x] / px[x], 1e-12);
  for (std::size_t y = 0; y < 2; ++y) EXPECT_NEAR(w->b[y] / c, 1.0, 1e-12);
}

TEST(Preceq, UniformProductDoesNotDominateDsbs) {
  const auto p = from_rows({{0.25, 0.25}, {0.25, 0.25}});
  const auto q = from_rows({{0.45, 0.05}, {0.05, 0.45}});
  EXPECT_FALSE(preceq_check(q, p).has_value());
  // Oracle: a 2x2 positive table factors as a(x)b(y)p iff its cross ratio matches p's.
  EXPECT_NE(q(0, 0) * q(1, 1) / (q(0, 1) * q(1, 0)), 1.0);
}

TEST(Preceq, SupportViolations) {
  const auto p = from_rows({{0.5, 0.0}, {0.0, 0.5}});
  const auto q = from_rows({{0.25, 0.25}, {0.25, 0.25}});
  EXPECT_FALSE(preceq_check(q, p).has_value());
  // A rectangle inside the support that drops a positive cell of p.
  const auto p2 = from_rows({{0.25, 0.25}, {0.25, 0.25}});
  const auto q2 = from_rows({{0.5, 0.0}, {0.25, 0.25}});
  EXPECT_FALSE(preceq_check(q2, p2).has_value());
  const auto other = validate_joint(Rows{{0.5, 0.5}}, {"a"}, {"0", "1"});
  EXPECT_EQ(code_of([&] { preceq_check(other, from_rows({{0.5, 0.5}})); }), ErrorCode::AlphabetMismatch);
}

TEST(Preceq, RandomWitnessesReconstruct) {
  auto g = rng(3);
  std::uniform_real_distribution<double> u(0.1, 3.0), z(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const auto p = random_joint(g, 4, 3);
    std::vector<double> a(4), b(3);
    for (double& v : a) v = z(g) < 0.2 ? 0.0 : u(g);
    for (double& v : b) v = z(g) < 0.2 ? 0.0 : u(g);
    Matrix qm(4, 3);
    for (Eigen::Index x = 0; x < 4; ++x)
      for (Eigen::Index y = 0; y < 3; ++y) qm(x, y) = a[static_cast<std::size_t>(x)] * b[static_cast<std::size_t>(y)] * p(x, y);
    if (qm.sum() <= 0.0) continue;
    qm /= qm.sum();
    const auto q = validate_joint(qm, p.x_alphabet(), p.y_alphabet());
    const auto w = preceq_check(q, p);
    ASSERT_TRUE(w.has_value());
    for (Eigen::Index x = 0; x < 4; ++x)
      for (Eigen::Index y = 0; y < 3; ++y)
        EXPECT_NEAR(w->a[static_cast<std::size_t>(x)] * w->b[static_cast<std::size_t>(y)] * p(x, y), q(x, y), 1e-10);
  }
}

namespace {

// Conditional law of (X,Y,Z) given both parties accept, computed directly.
std::vector<double> accepted_law(const Source& s, const SimulationChannels& ch, double& acceptance) {
  auto xyz = s.joint_xyz();
  const std::size_t zs = s.z_size(), ny = s.joint().y_size();
  acceptance = 0.0;
  for (std::size_t i = 0; i < xyz.size(); ++i) {
    const std::size_t pair = i / zs;
    xyz[i] *= ch.accept_x[pair / ny] * ch.accept_y[pair % ny];
    acceptance += xyz[i];
  }
  for (double& v : xyz) v /= acceptance;
  return xyz;
}

}  // namespace

TEST(SimulationChannels, IdentityWitness) {
  const auto p = from_rows({{0.3, 0.2}, {0.2, 0.3}});
  const auto s = build_erasure_source(p, 0.4);
  const auto ch = preceq_simulation_channels(s, {{1.0, 1.0}, {1.0, 1.0}});
  EXPECT_EQ(ch.acceptance_probability, 1.0);
  double acc = 0.0;
  const auto law = accepted_law(s, ch, acc);
  const auto xyz = s.joint_xyz();
  for (std::size_t i = 0; i < law.size(); ++i) EXPECT_NEAR(law[i], xyz[i], 1e-15);
}

TEST(SimulationChannels, ConditionalLawIsQ) {
  auto g = rng(4);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int t = 0; t < 100; ++t) {
    const auto p = random_joint(g, 3, 3);
    std::vector<double> a(3), b(3);
    for (double& v : a) v = u(g);
    for (double& v : b) v = u(g);
    Matrix qm(3, 3);
    for (Eigen::Index x = 0; x < 3; ++x)
      for (Eigen::Index y = 0; y < 3; ++y) qm(x, y) = a[static_cast<std::size_t>(x)] * b[static_cast<std::size_t>(y)] * p(x, y);
    // Scale a so that q is normalized; then q = a b p exactly.
    const double scale = qm.sum();
    for (double& v : a) v /= scale;
    qm /= scale;
    const auto q = validate_joint(qm, p.x_alphabet(), p.y_alphabet());
    const auto s = build_erasure_source(p, 0.3);
    const auto ch = preceq_simulation_channels(s, {a, b});
    double acc = 0.0;
    const auto law = accepted_law(s, ch, acc);
    const double abar = *std::max_element(a.begin(), a.end()), bbar = *std::max_element(b.begin(), b.end());
    EXPECT_NEAR(acc, 1.0 / (abar * bbar), 1e-12);
    EXPECT_NEAR(ch.acceptance_probability, 1.0 / (abar * bbar), 1e-12);
    const auto target = build_erasure_source(q, 0.3).joint_xyz();
    for (std::size_t i = 0; i < law.size(); ++i) EXPECT_NEAR(law[i], target[i], 1e-12);
  }
}

TEST(SimulationChannels, DegenerateWitness) {
  const auto s = build_erasure_source(from_rows({{0.3, 0.2}, {0.2, 0.3}}), 0.4);
  EXPECT_EQ(code_of([&] { preceq_simulation_channels(s, {{0.0, 0.0}, {1.0, 1.0}}); }), ErrorCode::DegenerateWitness);
}
