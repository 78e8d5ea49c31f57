#include <gtest/gtest.h>

#include <cmath>

#include "entrotter/bounds.hpp"
#include "entrotter/dense.hpp"

using namespace entrotter;

TEST(StandardBound, DirectValues) {
  EXPECT_NEAR(standard_bound(3, 1, 1, 10, 1), 1.8, 1e-12);
  EXPECT_NEAR(standard_bound(2, 1, 1, 10, 2), 0.064, 1e-12);
  EXPECT_LT(standard_bound(3, 1, 1, 1e12, 1), 1e-10);
  EXPECT_THROW(standard_bound(3, 1, 1, 10, 4), std::invalid_argument);
  BoundConstants k;
  k.c_p[4] = 0.01;
  EXPECT_NEAR(standard_bound(1, 1, 1, 2, 4, k), 0.01 * 32.0 / 16.0, 1e-15);
}

TEST(StandardBound, ScalesWithEachArgument) {
  const double b = standard_bound(4, 0.7, 1.3, 20, 2);
  EXPECT_NEAR(standard_bound(8, 0.7, 1.3, 20, 2), 8 * b, 1e-12 * b);
  EXPECT_NEAR(standard_bound(4, 1.4, 1.3, 20, 2), 8 * b, 1e-12 * b);
  EXPECT_NEAR(standard_bound(4, 0.7, 1.3, 40, 2), b / 4, 1e-12 * b);
}

TEST(EffectiveEntanglement, DirectValues) {
  EXPECT_DOUBLE_EQ(effective_entanglement(1.3, 2, 1, 0), 1.3);
  EXPECT_NEAR(effective_entanglement(0, 2, 1, 0.5), 4.0 * std::log2(std::exp(1.0)), 1e-12);
  EXPECT_NEAR(effective_entanglement(0, 2, 1, 0.5), 5.7708, 1e-4);
  EXPECT_NEAR(effective_entanglement(2, 2, 1, 0.5), 7.7708, 1e-4);
}

TEST(EntBoundFirst, DirectValuesAndScaling) {
  EXPECT_NEAR(ent_bound_first(1, 1, 2, 1, 16, 100), 2.56, 1e-12);
  const double b = ent_bound_first(0.7, 1.2, 3, 2.5, 40, 30);
  EXPECT_NEAR(ent_bound_first(0.7, 1.2, 3, 2.5, 40, 60), b / 2, 1e-15);
  EXPECT_NEAR(ent_bound_first(1.4, 1.2, 3, 2.5, 40, 30), 4 * b, 1e-12);
  EXPECT_NEAR(ent_bound_first(0.7, 1.2, 6, 2.5, 40, 30), 2 * b, 1e-12);
  EXPECT_NEAR(ent_bound_first(0.7, 1.2, 3, 5.0, 40, 30), 2 * b, 1e-12);
  EXPECT_EQ(ent_bound_first(1, 1, 2, 0, 16, 100), 0.0);
  EXPECT_THROW(ent_bound_first(1, 1, 2, 1, 1, 100), std::invalid_argument);
}

TEST(EntBoundP, DirectValues) {
  for (double s : {0.0, 0.5, 3.0})
    EXPECT_NEAR(ent_bound_p(1, 1, 1, s, 2, 1, 2), 64.0 * std::exp2(s), 1e-9 * std::exp2(s));
  const double b = ent_bound_p(0.3, 1, 2, 1.5, 64, 10, 2);
  // p = 2: two extra bits of S* cost a factor 2^{p * 2 / 2} = 4.
  EXPECT_NEAR(ent_bound_p(0.3, 1, 2, 3.5, 64, 10, 2), 4 * b, 1e-12 * b);
  // At S* = 2 log2(n) / p the exponential factor is exactly n.
  const double n = 256, p = 4, s = 2 * std::log2(n) / p;
  const double with = ent_bound_p(0.1, 1, 2, s, n, 5, 4);
  const double without = ent_bound_p(0.1, 1, 2, 0, n, 5, 4);
  EXPECT_NEAR(with / without, n, 1e-9 * n);
  EXPECT_THROW(ent_bound_p(1, 1, 1, 1, 2, 1, 1), std::invalid_argument);
}

TEST(EntBoundP, LogSpaceHandlesVolumeLawEntropy) {
  const double lb = log_ent_bound_p(1, 1, 4, 3000, 6000, 100, 6, std::pow(24.0, 6));
  EXPECT_TRUE(std::isfinite(lb));
  EXPECT_GT(lb, 700.0);
  EXPECT_TRUE(std::isinf(ent_bound_p(1, 1, 4, 3000, 6000, 100, 6)));
}

TEST(GrowthBound, DirectValues) {
  EXPECT_DOUBLE_EQ(growth_bound(0.7, 1, 1, 0), 0.7);
  EXPECT_NEAR(growth_bound(0, 1, 1, 1), 5.7708, 1e-4);
}

TEST(GrowthBound, DominatesMeasuredTfimEntropy) {
  for (std::size_t n : {6u, 8u, 10u}) {
    const auto h = build_tfim(n, 1.0, 1.5);
    const ExactPropagator exact(h);
    const auto psi0 = DenseState::from_product(n, ProductPattern::zeros());
    for (double t : {0.25, 0.5, 1.0, 2.0}) {
      const auto psi = exact.evolve(psi0, t);
      const double s = entanglement_entropy(schmidt_spectrum(psi, contiguous_cut(n / 2)));
      EXPECT_LE(s, growth_bound(0, 1, 1.5, t));
    }
  }
}

TEST(CommutatorEntropyBound, DirectValues) {
  EXPECT_DOUBLE_EQ(commutator_entropy_bound_raw(0, 1.5, 2), 6.0);
  EXPECT_DOUBLE_EQ(commutator_entropy_bound_raw(1, 1, 1), 4.0);
  EXPECT_DOUBLE_EQ(commutator_entropy_bound(1, 1, 1, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(commutator_entropy_bound(5, 1, 1, 0.5, 4), 4.0);
}

TEST(LowerBound, DirectValues) {
  EXPECT_DOUBLE_EQ(lower_bound_steps(1, 100, 0.1, 1), 1000.0);
  EXPECT_DOUBLE_EQ(lower_bound_steps(1, 200, 0.1, 1), 2 * lower_bound_steps(1, 100, 0.1, 1));
  EXPECT_THROW(lower_bound_steps(1, 100, 0.3, 1), std::invalid_argument);
  EXPECT_THROW(lower_bound_steps(1, 100, 0.0, 1), std::invalid_argument);
}

TEST(Threshold, DirectValues) {
  const auto max_ent = threshold_check(2, 4, 2, 1, 0);
  EXPECT_TRUE(max_ent.satisfied);
  EXPECT_DOUBLE_EQ(max_ent.s_star, 2.0);
  const auto one = threshold_check(1, 100, 2, 1, 0);
  EXPECT_NEAR(one.improvement, 1e4 / std::pow(std::log2(100.0), 2), 1e-9);
  EXPECT_NEAR(one.improvement, 226.0, 1.0);
  double last = 1e300;
  for (double s : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double imp = threshold_check(s, 64, 2, 1, 0).improvement;
    EXPECT_LT(imp, last);
    last = imp;
  }
  for (double n = 4; n <= 14; ++n) EXPECT_TRUE(threshold_check(n / 2, n, 2, 1, 0).satisfied);
  EXPECT_THROW(threshold_check(1, 3, 2, 1, 0), std::invalid_argument);
}

TEST(OrderRecommendation, RuleOfThumb) {
  EXPECT_EQ(order_recommendation(20, 1024), 1);
  EXPECT_EQ(order_recommendation(1, 1024), 6);
  EXPECT_EQ(order_recommendation(0, 16), 6);
  EXPECT_EQ(order_recommendation(2.0, 16), 4);  // 2/4 * 4 = 2
  EXPECT_EQ(order_recommendation(3.0, 16), 2);
}

TEST(SeparationRatio, CrossoverValues) {
  EXPECT_NEAR(separation_ratio(100, 1), 2.27, 0.01);
  EXPECT_NEAR(separation_ratio(1000, 1), 10.07, 0.05);
  double last = separation_ratio(8, 1);
  for (double n = 9; n <= 4096; n *= 1.5) {
    const double r = separation_ratio(n, 1);
    EXPECT_GT(r, last);
    last = r;
  }
}

TEST(Presets, GeometryEntropies) {
  EXPECT_DOUBLE_EQ(preset_entropy(GeometryKind::chain, 100, 1.5), 1.5);
  EXPECT_DOUBLE_EQ(preset_entropy(GeometryKind::grid2d, 100, 0), 10.0);
  EXPECT_NEAR(preset_entropy(GeometryKind::grid3d, 125, 0), 25.0, 1e-12);
  EXPECT_DOUBLE_EQ(preset_entropy(GeometryKind::tree, 100, 0, 3.0, 2.0), 6.0);
  EXPECT_DOUBLE_EQ(preset_entropy(GeometryKind::all_to_all, 10, 0), 5.0);
  EXPECT_THROW(preset_entropy(GeometryKind::custom, 10, 0), std::invalid_argument);
}

TEST(RequiredSteps, InvertsTheBounds) {
  BoundParams bp;
  bp.n = 16;
  bp.L = 31;
  bp.d = 2;
  bp.t = 1;
  bp.s_max = 1;
  for (int p : {1, 2}) {
    bp.p = p;
    const double eps = 0.01;
    const double r = required_steps(bp, eps, BoundKind::standard);
    EXPECT_EQ(r, std::floor(r));
    EXPECT_LE(standard_bound(bp.L, bp.J, bp.t, r, p), eps * (1 + 1e-12));
    if (r > 1) {
      EXPECT_GT(standard_bound(bp.L, bp.J, bp.t, r - 1, p), eps);
    }
  }
  bp.p = 1;
  const double r1 = required_steps(bp, 0.01, BoundKind::entanglement);
  EXPECT_LE(ent_bound_first(bp.t, bp.J, bp.d, bp.s_star(), bp.n, r1), 0.01 * (1 + 1e-12));
  EXPECT_GT(ent_bound_first(bp.t, bp.J, bp.d, bp.s_star(), bp.n, r1 - 1), 0.01);
  const double r2 = required_steps(bp, 0.005, BoundKind::entanglement);
  EXPECT_NEAR(r2 / r1, 2.0, 2.0 / r1);
  bp.p = 4;
  const double r4 = required_steps(bp, 0.01, BoundKind::entanglement);
  EXPECT_LE(ent_bound_p(bp.t, bp.J, bp.d, bp.s_star(), bp.n, r4, 4), 0.01 * (1 + 1e-12));
  EXPECT_THROW(required_steps(bp, 0.0, BoundKind::standard), std::invalid_argument);
}

TEST(RequiredSteps, ChainAtHundredIsAboutTwoHundredTimesCheaper) {
  BoundParams bp;
  bp.n = 100;
  bp.L = 199;
  bp.d = 2;
  bp.t = 0.1;
  bp.s_max = 1;
  const double ratio =
      required_steps(bp, 1e-3, BoundKind::entanglement) / required_steps(bp, 1e-3, BoundKind::standard);
  EXPECT_GT(ratio, 1.0 / 2000);
  EXPECT_LT(ratio, 1.0 / 20);
}

TEST(RequiredSteps, ValidatesParameters) {
  BoundParams bp;
  bp.n = 8;
  bp.s_max = 5;  // above n/2
  EXPECT_THROW(required_steps(bp, 0.1, BoundKind::standard), std::invalid_argument);
  bp.s_max = 1;
  bp.p = 3;
  EXPECT_THROW(required_steps(bp, 0.1, BoundKind::standard), std::invalid_argument);
}

TEST(EvaluateBounds, ReportEchoesConstants) {
  BoundParams bp;
  bp.n = 8;
  bp.L = 15;
  bp.d = 2;
  bp.p = 2;
  bp.r = 20;
  bp.s_max = 0.5;
  const auto rep = evaluate_bounds(bp, 0.01);
  EXPECT_TRUE(rep.ent_p.has_value());
  EXPECT_TRUE(rep.lower_bound.has_value());
  EXPECT_DOUBLE_EQ(rep.improvement, rep.required_standard / rep.required_ent);
  const auto j = to_json(rep);
  EXPECT_EQ(j.at("constants").at("C1"), 8.0);
  EXPECT_EQ(j.at("constants").at("Cp"), "(4p)^p");
  EXPECT_NEAR(j.at("constants").at("c_growth").get<double>(), 4 * kLog2E, 1e-15);
  EXPECT_FALSE(evaluate_bounds(bp, 0.5).lower_bound.has_value());
}

TEST(ResourceTable, FormulaRows) {
  const auto chain = resource_row("1D", GeometryKind::chain, {100});
  EXPECT_NEAR(chain.improvement, 226.5, 0.1);
  const auto grid = resource_row("2D", GeometryKind::grid2d, {10, 10});
  EXPECT_NEAR(grid.improvement, 22.65, 0.01);
  EXPECT_GT(grid.improvement, 10.0);
  EXPECT_LT(grid.improvement, 40.0);
  const auto cube = resource_row("3D", GeometryKind::grid3d, {5, 5, 5});
  EXPECT_NEAR(cube.improvement, 12.88, 0.01);
}
