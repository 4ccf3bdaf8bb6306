#include <cmath>

#include <gtest/gtest.h>

#include "dtorus/torus.hpp"
#include "support/oracles.hpp"

using namespace dtorus;

namespace {

std::vector<VectorXd> grid61() { return uniform_grid(1, -3.0, 3.0, 61); }

}  // namespace

TEST(Grid, UniformAndDefault) {
  const auto g = grid61();
  ASSERT_EQ(g.size(), 61u);
  EXPECT_EQ(g.front()(0), -3.0);
  EXPECT_EQ(g.back()(0), 3.0);
  const auto periodic = uniform_grid(1, 0.0, 1.0, 4, true);
  EXPECT_EQ(periodic.back()(0), 0.75);
  EXPECT_EQ(uniform_grid(2, 0.0, 1.0, 3).size(), 9u);
  EXPECT_EQ(default_grid(catalog("paper-2d").system).size(), 61u);
  EXPECT_THROW(uniform_grid(1, 0.0, 1.0, 0), Error);
}

TEST(SampleTorus, GluedTwoDimensional) {
  const auto s = sample_torus(catalog("paper-2d"), grid61(), Selection::automatic(), {}, 4);
  ASSERT_EQ(s.points.size(), 61u);
  EXPECT_EQ(s.failures(), 0);
  EXPECT_EQ(s.unsolvable(), 0);
  for (const auto& p : s.points) {
    const VectorXd u = oracle::torus_2d(p.phi(0));
    EXPECT_LE((p.u - u).cwiseAbs().maxCoeff(), 1e-6) << p.phi(0);
    EXPECT_TRUE(std::isfinite(p.residual_norm));
    EXPECT_TRUE(std::isfinite(p.tail_bound));
    EXPECT_EQ(p.assignment, (std::vector<Variant>{Variant::one, Variant::two}));
  }
}

TEST(SampleTorus, GlueSelectsWithoutRecomputing) {
  const auto e = catalog("paper-2d");
  const auto glued = sample_torus(e, grid61(), Selection::automatic());
  const auto one = sample_torus(e, grid61(), Selection::single(Variant::one));
  const auto two = sample_torus(e, grid61(), Selection::single(Variant::two));
  for (std::size_t i = 0; i < glued.points.size(); ++i) {
    EXPECT_EQ(glued.points[i].u(0), one.points[i].u(0));
    EXPECT_EQ(glued.points[i].u(1), two.points[i].u(1));
  }
}

TEST(SampleTorus, DeterministicAcrossJobCounts) {
  const auto e = catalog("paper-2d");
  const auto a = sample_torus(e, grid61(), Selection::automatic(), {}, 1);
  const auto b = sample_torus(e, grid61(), Selection::automatic(), {}, 7);
  for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_EQ(a.points[i].u, b.points[i].u);
}

TEST(SampleTorus, LipschitzContinuity) {
  const auto s = sample_torus(catalog("paper-2d"), grid61(), Selection::automatic());
  // sup |u1'| = 4/(9 sqrt 3), sup |u2'| = (3/2)(1/2)(sqrt 3/2)^3, attained where tanh = 1/2; spacing 0.1.
  const double lipschitz = 0.75 * std::pow(std::sqrt(3.0) / 2, 3);
  for (std::size_t i = 1; i < s.points.size(); ++i)
    EXPECT_LE((s.points[i].u - s.points[i - 1].u).cwiseAbs().maxCoeff(), lipschitz * 0.1 + 1e-9);
}

TEST(SampleTorus, ZeroForcing) {
  auto e = catalog("paper-2d");
  override_expression(e, "f1", "0");
  override_expression(e, "f2", "0");
  for (const auto& p : sample_torus(e, uniform_grid(1, -2.0, 2.0, 9), Selection::automatic()).points)
    EXPECT_EQ(p.u, VectorXd::Zero(2));
}

TEST(SampleTorus, L2SixComponents) {
  const auto s = sample_torus(catalog("paper-l2", {{"N", "6"}}), {VectorXd::Zero(1)}, Selection::automatic());
  const double expected[] = {-1.0 / 3, -1.0 / 4, -1.0 / 3, -1.0 / 4, -1.0 / 5, -1.0 / 6};
  for (int i = 0; i < 6; ++i) {
    EXPECT_NEAR(s.points[0].u(i), expected[i], 1e-6) << i;
    EXPECT_NEAR(s.points[0].u(i), oracle::torus_l2(i + 1, 0.0), 1e-6) << i;
  }
}

TEST(SampleTorus, UnsolvablePointsFlagged) {
  auto e = catalog("paper-2d");
  override_expression(e, "f1", "1");
  const auto s = sample_torus(e, uniform_grid(1, -1.0, 1.0, 3), Selection::single(Variant::one));
  ASSERT_EQ(s.points.size(), 3u);
  EXPECT_EQ(s.unsolvable(), 3);
  for (const auto& p : s.points) {
    EXPECT_FALSE(p.solvable);
    EXPECT_FALSE(p.message.empty());
    EXPECT_GT(p.residual_norm, 1.0);
  }
}

TEST(SampleTorus, FailingPointsFlaggedNotDropped) {
  auto e = catalog("paper-2d");
  override_expression(e, "f1", "sqrt(phi)");
  const auto s = sample_torus(e, uniform_grid(1, -1.0, 1.0, 3), Selection::automatic());
  ASSERT_EQ(s.points.size(), 3u);
  EXPECT_GE(s.failures(), 1);
  for (const auto& p : s.points)
    if (p.failed) EXPECT_FALSE(p.message.empty());
}

TEST(SampleTorus, SelectionErrors) {
  EXPECT_THROW(sample_torus(catalog("paper-2d"), {}, Selection::automatic()), Error);
  const auto bad = sample_torus(catalog("paper-2d"), {VectorXd::Zero(1)}, Selection::glue({Variant::one}));
  EXPECT_TRUE(bad.points[0].failed);
  auto e = catalog("paper-2d");
  override_expression(e, "P12", "0.1");
  e.known_projectors = catalog("paper-2d").known_projectors;
  const auto s = sample_torus(e, {VectorXd::Zero(1)}, Selection::automatic());
  EXPECT_TRUE(s.points[0].failed);
  EXPECT_NE(s.points[0].message.find("diagonal"), std::string::npos);
}

TEST(SampleTorus, EstimatedProjectorsMatchKnown) {
  PointOptions opts;
  opts.force_estimate = true;
  const auto s = sample_torus(catalog("paper-2d"), uniform_grid(1, -1.0, 1.0, 5), Selection::automatic(), opts);
  for (const auto& p : s.points) EXPECT_LE((p.u - oracle::torus_2d(p.phi(0))).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Invariance, BothDirections) {
  const auto e = catalog("paper-2d");
  const auto s = sample_torus(e, uniform_grid(1, -3.0, 3.0, 13), Selection::automatic());
  for (double t : {2.0, -2.0, 0.5}) {
    const auto r = verify_invariance(e, s, t);
    EXPECT_EQ(r.failures, 0);
    EXPECT_LE(r.max_defect, 1e-5) << t;
  }
}

TEST(Invariance, PerturbationDetected) {
  const auto e = catalog("paper-2d");
  auto s = sample_torus(e, uniform_grid(1, -3.0, 3.0, 13), Selection::automatic());
  for (auto& p : s.points) p.u.array() += 0.01;
  EXPECT_GE(verify_invariance(e, s, 2.0).max_defect, 1e-3);
}

TEST(Invariance, StableZeroTorus) {
  const auto e = entry_from_json_text(R"({"m": 1, "n": 1, "a": ["1"], "P": [["-1"]], "f": ["0"]})");
  const auto s = sample_torus(e, uniform_grid(1, -1.0, 1.0, 5), Selection::single(Variant::one));
  EXPECT_EQ(s.failures(), 0);
  EXPECT_LE(verify_invariance(e, s, 2.0).max_defect, 1e-10);
  EXPECT_THROW(verify_invariance(e, s, 0.0), Error);
}

TEST(Ramp, NIndependence) {
  const auto rows = l2_ramp({3, 5, 10}, VectorXd::Zero(1));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_TRUE(std::isnan(rows[0].max_change));
  for (const auto& r : rows) {
    EXPECT_EQ(r.u.size(), r.N);
    EXPECT_NEAR(r.u(0), -1.0 / 3, 1e-9);
    for (int i = 0; i < r.N; ++i) EXPECT_NEAR(r.u(i), oracle::torus_l2(i + 1, 0.0), 1e-6);
  }
  EXPECT_LE(rows[1].max_change, 1e-9);
  EXPECT_LE(rows[2].max_change, 1e-9);
  for (int i = 3; i < 10; ++i) {
    EXPECT_LT(std::abs(rows[2].u(i)), std::abs(rows[2].u(i - 1)));
    EXPECT_NEAR(std::abs(rows[2].u(i)) * (i + 1), 1.0, 1e-6);
  }
}

TEST(Ramp, SingleRowAndErrors) {
  const auto rows = l2_ramp({3}, VectorXd::Zero(1));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_TRUE(std::isnan(rows[0].max_change));
  EXPECT_THROW(l2_ramp({5, 3}, VectorXd::Zero(1)), Error);
  EXPECT_THROW(l2_ramp({2}, VectorXd::Zero(1)), Error);
  EXPECT_THROW(l2_ramp({}, VectorXd::Zero(1)), Error);
}
