#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "entrotter/trotter.hpp"
#include "oracle.hpp"

using namespace entrotter;

namespace {

std::vector<double> taus() {
  std::vector<double> out;
  for (int k = 4; k <= 10; ++k) out.push_back(std::ldexp(1.0, -k));
  return out;
}

double fitted_r_slope(const HamiltonianModel& h, const DenseState& psi, int p, double t,
                      const std::vector<std::size_t>& rs) {
  const ExactPropagator exact(h);
  std::vector<double> xs, ys;
  for (auto r : rs) {
    xs.push_back(static_cast<double>(r));
    ys.push_back(measure_error(exact, psi, p, t, r).error);
  }
  return fit_loglog(xs, ys).slope;
}

}  // namespace

TEST(Suzuki, MultipliersSumToOne) {
  EXPECT_EQ(suzuki_stage_multipliers(1), std::vector<double>{1.0});
  EXPECT_EQ(suzuki_stage_multipliers(2), std::vector<double>{1.0});
  EXPECT_EQ(suzuki_stage_multipliers(4).size(), 5u);
  EXPECT_EQ(suzuki_stage_multipliers(6).size(), 25u);
  for (int p : {1, 2, 4, 6}) {
    const auto m = suzuki_stage_multipliers(p);
    double sum = 0;
    for (double x : m) sum += x;
    EXPECT_NEAR(sum, 1.0, 1e-12) << "p=" << p;
  }
  EXPECT_NEAR(suzuki_weight(1), 1.0 / (4.0 - std::cbrt(4.0)), 1e-15);
  EXPECT_NEAR(suzuki_weight(1), 0.414, 1e-3);
  EXPECT_THROW(suzuki_stage_multipliers(3), std::invalid_argument);
  EXPECT_THROW(suzuki_stage_multipliers(8), std::invalid_argument);
}

TEST(Plan, FirstOrderCountsAndMultipliers) {
  const HamiltonianModel h(2, {PauliTerm::parse(1.0, "Z0 Z1"), PauliTerm::parse(1.0, "X0"),
                               PauliTerm::parse(1.0, "X1")});
  const auto plan = build_plan(h, 1, 1.0, 2);
  EXPECT_EQ(plan.exponentials_per_step() * plan.steps, 6u);
  for (std::size_t k = 0; k < plan.stages.size(); ++k) {
    EXPECT_EQ(plan.stages[k].term, k);
    EXPECT_EQ(plan.stages[k].multiplier, 1.0);
  }
  EXPECT_THROW(build_plan(h, 1, 1.0, 0), std::invalid_argument);
}

TEST(Plan, EveryTermReceivesTheFullStep) {
  const auto h = build_tfim(5, 1.0, 0.8);
  for (int p : {1, 2, 4, 6})
    for (auto ord : {Ordering::forward, Ordering::even_odd}) {
      const auto plan = build_plan(h, p, 1.0, 3, ord);
      std::vector<double> total(h.size(), 0.0);
      for (const auto& s : plan.stages) total[s.term] += s.multiplier;
      for (double x : total) EXPECT_NEAR(x, 1.0, 1e-12) << "p=" << p;
    }
}

TEST(Plan, SecondOrderIsPalindromic) {
  const auto h = build_tfim(4, 1.0, 0.5);
  const auto plan = build_plan(h, 2, 1.0, 1);
  EXPECT_EQ(plan.stages.size(), 2 * h.size() - 1);
  for (std::size_t k = 0; k < plan.stages.size(); ++k) {
    const auto& a = plan.stages[k];
    const auto& b = plan.stages[plan.stages.size() - 1 - k];
    EXPECT_EQ(a.term, b.term);
    EXPECT_DOUBLE_EQ(a.multiplier, b.multiplier);
  }
}

TEST(Plan, EvenOddIsAPermutationOfForward) {
  const auto h = build_tfim(4, 1.0, 1.0);
  auto pairs = [](const TrotterPlan& p) {
    std::vector<std::pair<std::size_t, double>> v;
    for (const auto& s : p.stages) v.emplace_back(s.term, s.multiplier);
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto fwd = build_plan(h, 1, 1.0, 1, Ordering::forward);
  const auto eo = build_plan(h, 1, 1.0, 1, Ordering::even_odd);
  EXPECT_EQ(pairs(fwd), pairs(eo));
  // Bonds (0,1),(2,3) first, then (1,2).
  EXPECT_EQ(h.term(eo.stages[0].term).label(), "Z0 Z1");
  EXPECT_EQ(h.term(eo.stages[1].term).label(), "Z2 Z3");
  EXPECT_EQ(h.term(eo.stages[2].term).label(), "Z1 Z2");
  EXPECT_THROW(build_plan(build_all_to_all_ising(4, 1.0), 1, 1.0, 1, Ordering::even_odd),
               std::invalid_argument);
}

TEST(Execute, ZeroTimeIsIdentityAndNormIsPreserved) {
  const auto h = build_tfim(5, 1.0, 1.3);
  const auto psi = DenseState::random(5, 6);
  EXPECT_LT(state_distance(execute(build_plan(h, 2, 0.0, 4), psi), psi), 1e-15);
  for (int p : {1, 2, 4, 6}) EXPECT_NEAR(execute(build_plan(h, p, 1.7, 3), psi).norm(), 1.0, 1e-10);
}

TEST(Execute, MatchesOracleProductOfExponentials) {
  const auto h = build_heisenberg(3, 0.7);
  const auto psi = DenseState::random(3, 2);
  const double tau = 0.3;
  oracle::Mat step = oracle::Mat::Identity(8, 8);
  for (const auto& t : h.terms()) step = oracle::expm_hermitian(oracle::matrix(t, 3), tau) * step;
  const Vector expect = step * step * psi.amplitudes();
  EXPECT_LT((execute(build_plan(h, 1, 2 * tau, 2), psi).amplitudes() - expect).norm(), 1e-13);
}

TEST(Execute, StepSplittingIsConsistent) {
  const auto h = build_tfim(5, 1.0, 0.6);
  const auto psi = DenseState::random(5, 9);
  for (int p : {1, 2, 4}) {
    const auto whole = execute(build_plan(h, p, 1.2, 6), psi);
    const auto half = build_plan(h, p, 0.6, 3);
    const auto split = execute(half, execute(half, psi));
    EXPECT_LT(state_distance(whole, split), 1e-12) << "p=" << p;
  }
}

TEST(Execute, CommutingHamiltonianHasNoError) {
  const HamiltonianModel h(4, {PauliTerm::parse(0.8, "Z0 Z1"), PauliTerm::parse(1.1, "Z1 Z2"),
                               PauliTerm::parse(-0.4, "Z3"), PauliTerm::parse(0.6, "Z0 Z2 Z3")});
  const auto psi = DenseState::random(4, 1);
  for (int p : {1, 2, 4})
    for (std::size_t r : {1u, 3u, 10u}) EXPECT_LT(measure_error(h, psi, p, 2.0, r).error, 1e-10);
  EXPECT_TRUE(order_scaling_fit(h, psi, 1, taus()).fit.degenerate);
}

TEST(Execute, MpsBackendMatchesDense) {
  const auto h = build_tfim(8, 1.0, 1.5);
  const auto plan = build_plan(h, 2, 1.0, 10);
  const auto dense = execute(plan, DenseState::from_product(8, ProductPattern::plus()));
  const auto mps = execute(plan, MpsState::from_product(8, ProductPattern::plus(), 16));
  EXPECT_LT(state_distance(mps_to_dense(mps), dense), 1e-10);
  EXPECT_THROW(execute(build_plan(build_all_to_all_ising(4, 1.0), 1, 1.0, 1),
                       MpsState::from_product(4, ProductPattern::zeros())),
               std::invalid_argument);
}

TEST(Error, FirstOrderDecaysAsOneOverR) {
  const auto h = build_tfim(6, 1.0, 1.0);
  const auto psi = DenseState::from_product(6, ProductPattern::zeros());
  EXPECT_NEAR(fitted_r_slope(h, psi, 1, 1.0, {16, 32, 64, 128, 256}), -1.0, 0.1);
  EXPECT_NEAR(fitted_r_slope(h, psi, 2, 1.0, {16, 32, 64, 128}), -2.0, 0.1);
}

TEST(Error, DoublingStepsHalvesFirstOrderError) {
  const auto h = build_tfim(6, 1.0, 2.5);
  const auto psi = DenseState::from_product(6, ProductPattern::zeros());
  const ExactPropagator exact(h);
  const double e1 = measure_error(exact, psi, 1, 1.0, 64).error;
  const double e2 = measure_error(exact, psi, 1, 1.0, 128).error;
  EXPECT_NEAR(e1 / e2, 2.0, 0.3);
}

TEST(Error, AllToAllErrorFallsAsOneOverR) {
  const auto h = build_all_to_all_ising(8, 1.0);
  const auto psi = DenseState::from_product(8, ProductPattern::plus());
  EXPECT_NEAR(fitted_r_slope(h, psi, 1, 1.0, {8, 16, 32, 64, 128}), -1.0, 0.1);
}

TEST(Error, SampleRecordsEntropies) {
  const auto h = build_tfim(8, 1.0, 2.5);
  const auto s = measure_error(h, DenseState::from_product(8, ProductPattern::zeros()), 1, 1.0, 20);
  EXPECT_GT(s.error, 0.0);
  EXPECT_LT(s.error, 0.2);
  EXPECT_EQ(s.s_max_initial, 0.0);
  EXPECT_GT(s.s_max_final, 0.0);
  EXPECT_LT(s.s_max_final, 1.0);
  EXPECT_THROW(measure_error(build_tfim(15, 1.0, 1.0), DenseState::random(4, 1), 1, 1.0, 1),
               std::invalid_argument);
}

TEST(Error, FirstOrderMatchesCommutatorFormula) {
  for (std::size_t n : {4u, 6u}) {
    const auto h = build_tfim(n, 1.0, 0.9);
    const auto psi = DenseState::random(n, 3 + n);
    std::vector<oracle::Mat> hs;
    for (const auto& t : h.terms()) hs.push_back(oracle::matrix(t, n));
    oracle::Mat sum = oracle::Mat::Zero(hs[0].rows(), hs[0].cols());
    for (std::size_t j = 0; j < hs.size(); ++j)
      for (std::size_t k = j + 1; k < hs.size(); ++k) sum += hs[j] * hs[k] - hs[k] * hs[j];
    const double lead = (sum * psi.amplitudes()).norm();
    const ExactPropagator exact(h);
    for (double tau : {1e-2, 1e-3}) {
      const double err = measure_error(exact, psi, 1, tau, 1).error;
      EXPECT_NEAR(err / (0.5 * tau * tau * lead), 1.0, 0.2) << "n=" << n << " tau=" << tau;
    }
  }
}

TEST(OrderFit, SlopesMatchOrderPlusOne) {
  const auto h = build_tfim(6, 1.0, 2.5);
  const auto psi = DenseState::from_product(6, ProductPattern::zeros());
  const ExactPropagator exact(h);
  const auto f1 = order_scaling_fit(exact, psi, 1, taus());
  const auto f2 = order_scaling_fit(exact, psi, 2, taus());
  EXPECT_GE(f1.fit.slope, 1.85);
  EXPECT_LE(f1.fit.slope, 2.15);
  EXPECT_GE(f2.fit.slope, 2.8);
  EXPECT_LE(f2.fit.slope, 3.2);
  EXPECT_FALSE(f1.fit.degenerate);
  EXPECT_THROW(order_scaling_fit(exact, psi, 1, {0.1, 0.05, 0.02}), std::invalid_argument);
}

TEST(OrderFit, OrderingDoesNotChangeTheExponent) {
  const auto h = build_tfim(6, 1.0, 2.5);
  const auto psi = DenseState::random(6, 12);
  const ExactPropagator exact(h);
  for (int p : {1, 2}) {
    const double fwd = order_scaling_fit(exact, psi, p, taus(), Ordering::forward).fit.slope;
    const double eo = order_scaling_fit(exact, psi, p, taus(), Ordering::even_odd).fit.slope;
    EXPECT_NEAR(fwd, eo, 0.1) << "p=" << p;
  }
}

TEST(LogLogFit, RecoversExactPowerLaw) {
  const auto f = fit_loglog({1, 2, 4, 8}, {3, 12, 48, 192});
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-12);
  EXPECT_NEAR(f.slope_stderr, 0.0, 1e-12);
  EXPECT_THROW(fit_loglog({1}, {1}), std::invalid_argument);
  EXPECT_THROW(fit_loglog({1, 2}, {1, 0}), std::invalid_argument);
}
