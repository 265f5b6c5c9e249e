#include "ritrade/intrinsic_dp.hpp"
#include "ritrade/oracle.hpp"

#include "support/brute_force.hpp"
#include "support/builders.hpp"

#include <gtest/gtest.h>

#include <random>

namespace ritrade {
namespace {

using testing::levels;
using testing::product;
using testing::small_params;

constexpr ProductId kA = 3'600'000;
constexpr ProductId kB = 2 * 3'600'000;

Snapshot pair_instance() {
  Snapshot s;
  s.products.push_back(product(kA, levels({{20, 10}}), {}));
  s.products.push_back(product(kB, {}, levels({{60, 10}})));
  return s;
}

TEST(Interpolate, Examples) {
  const std::vector<double> g{0, 5, 10}, v{0, 100, 150};
  EXPECT_DOUBLE_EQ(interpolate(g, v, 7.5), 125.0);
  EXPECT_EQ(interpolate(g, v, 5.0), 100.0);
  const std::vector<double> g2{0, 10}, v2{0, 80};
  EXPECT_DOUBLE_EQ(interpolate(g2, v2, 2.5), 20.0);
  EXPECT_EQ(interpolate(g2, v2, -1.0), 0.0);
  EXPECT_EQ(interpolate(g2, v2, 11.0), 80.0);

  const StateGrid uni = StateGrid::uniform(3, 10.0);
  EXPECT_DOUBLE_EQ(uni.interpolate(v, 7.5), 125.0);
  EXPECT_EQ(uni.interpolate(v, 5.0), 100.0);
  EXPECT_EQ(uni.points(), g);
  EXPECT_THROW((void)StateGrid::uniform(1, 10.0), std::invalid_argument);
  EXPECT_THROW((void)StateGrid::from_points({1.0, 1.0}), std::invalid_argument);
}

TEST(IntrinsicDp, EmptyBookGivesZeroValues) {
  IntrinsicDp dp(small_params(10.0, 10.0));
  Snapshot s;
  s.products.push_back(product(kA, {}, {}));
  const ValueFunctionSet& v = dp.backward_pass(s);
  ASSERT_EQ(v.stages(), 1U);
  for (double x : v.values(0)) EXPECT_EQ(x, 0.0);
  for (double x : v.values(1)) EXPECT_EQ(x, 0.0);
}

TEST(IntrinsicDp, TwoProductArbitrage) {
  IntrinsicDp dp(small_params(10.0, 10.0));
  const Snapshot s = pair_instance();
  const ValueFunctionSet& v = dp.backward_pass(s);
  EXPECT_NEAR(v.evaluate(0, 0.0), 400.0, 1e-9);
  const TargetPositions t = dp.forward_pass(s);
  ASSERT_EQ(t.stages.size(), 2U);
  EXPECT_EQ(t.stages[0].delta, 100);
  EXPECT_EQ(t.stages[1].delta, -100);
  EXPECT_NEAR(t.objective, 400.0, 1e-9);
}

TEST(IntrinsicDp, TwoProductArbitrageWithCosts) {
  const SolverParams p = small_params(10.0, 10.0, 1.0, 0.09, 4.0);
  const TargetPositions t = solve_intrinsic(pair_instance(), p);
  EXPECT_NEAR(t.objective, 318.20, 1e-9);
  EXPECT_EQ(t.stages[0].delta, 100);
  EXPECT_EQ(t.stages[1].delta, -100);
  EXPECT_EQ(t.stages[0].limit_price, 2000);
  EXPECT_EQ(t.stages[1].limit_price, 6000);
  EXPECT_EQ(t.order_count(), 2U);
}

TEST(IntrinsicDp, NothingToDoCases) {
  const SolverParams p = small_params(10.0, 10.0);
  Snapshot empty;
  empty.products.push_back(product(kA, {}, {}));
  empty.products.push_back(product(kB, {}, {}));
  for (const StageDecision& d : solve_intrinsic(empty, p).stages) EXPECT_EQ(d.delta, 0);

  Snapshot full;
  full.soc = 10.0;
  full.products.push_back(product(kA, levels({{-50, 10}}), {}));
  full.products.push_back(product(kB, levels({{10, 10}}), {}));
  const TargetPositions t = solve_intrinsic(full, p);
  for (const StageDecision& d : t.stages) EXPECT_EQ(d.delta, 0);
  EXPECT_EQ(t.objective, 0.0);
}

TEST(IntrinsicDp, TiesPreferTheNullAction) {
  // Buying at 30 and selling at 30 is worth exactly zero.
  Snapshot s;
  s.products.push_back(product(kA, levels({{30, 1}}), {}));
  s.products.push_back(product(kB, {}, levels({{30, 1}})));
  const TargetPositions t = solve_intrinsic(s, small_params());
  EXPECT_EQ(t.stages[0].delta, 0);
  EXPECT_EQ(t.stages[1].delta, 0);
}

TEST(IntrinsicDp, NegativePricesNeverTradeBothWays) {
  SolverParams p = small_params(10.0, 10.0, 0.95, 0.0, 0.0);
  Snapshot s;
  s.soc = 10.0;
  s.products.push_back(product(kA, levels({{-100, 10}}), levels({{-95, 10}})));
  const TargetPositions t = solve_intrinsic(s, p);
  EXPECT_EQ(t.stages[0].delta, 0);
  EXPECT_EQ(t.objective, 0.0);
}

TEST(IntrinsicDp, StrideIsRespected) {
  SolverParams p = small_params(10.0, 10.0);
  p.market.kappa = 7;
  const TargetPositions t = solve_intrinsic(pair_instance(), p);
  EXPECT_EQ(t.stages[0].delta % 7, 0);
  EXPECT_EQ(t.stages[0].delta, 98);
  EXPECT_EQ(t.stages[1].delta, -98);
}

TEST(IntrinsicDp, RestoresNonPhysicalPositions) {
  // Holding +1 MWh in both hours overfills a 1.5 MWh battery; only selling fixes it.
  const SolverParams p = small_params(1.5, 1.0);
  Snapshot s;
  s.products.push_back(product(kA, levels({{50, 5}}), levels({{30, 5}}), 10));
  s.products.push_back(product(kB, levels({{50, 5}}), levels({{20, 5}}), 10));
  ASSERT_FALSE(positions_physical(s, p.battery, p.market));
  const TargetPositions t = solve_intrinsic(s, p);
  EXPECT_FALSE(t.physical_start);
  EXPECT_TRUE(t.physical_plan);
  // an empty battery cannot discharge, so the best it can do is unwind both purchases
  EXPECT_EQ(t.stages[0].delta, -10);
  EXPECT_EQ(t.stages[1].delta, -10);
}

TEST(IntrinsicDp, ExactOnReachableGrids) {
  std::mt19937_64 rng(17);
  const SolverParams p = small_params(1.0, 1.0, 1.0, 0.09, 4.0);
  for (int i = 0; i < 200; ++i) {
    Snapshot s;
    std::uniform_int_distribution<int> n(1, 4), s0(0, 10);
    s.soc = 0.1 * s0(rng);
    const int count = n(rng);
    for (int t = 0; t < count; ++t) s.products.push_back(testing::random_product(rng, t, 6, 5));
    std::vector<StateGrid> grids;
    for (auto& g : exact_grid(p.battery, p.market, s.soc, s.products.size())) {
      grids.push_back(StateGrid::from_points(std::move(g)));
    }
    IntrinsicDp dp(p);
    dp.backward_pass(s, std::move(grids));
    const TargetPositions t = dp.forward_pass(s);
    const ExactSolution e = solve_exact(s, p);
    EXPECT_NEAR(t.objective, e.objective, 1e-9) << "instance " << i;
    EXPECT_NEAR(e.objective, testing::brute_force(s, p), 1e-9);
  }
}

TEST(IntrinsicDp, UniformGridsStayCloseToTheOracle) {
  std::mt19937_64 rng(23);
  const SolverParams base = small_params(1.0, 1.0, 0.95, 0.09, 4.0);
  for (int m : {11, 51, 101}) {
    SolverParams p = base;
    p.grid_size = m;
    double dp_total = 0.0, exact_total = 0.0;
    for (int i = 0; i < 100; ++i) {
      Snapshot s;
      for (int t = 0; t < 3; ++t) s.products.push_back(testing::random_product(rng, t, 4, 4));
      const TargetPositions t = solve_intrinsic(s, p);
      const ExactSolution e = solve_exact(s, p);
      EXPECT_GE(e.objective, t.objective - 1e-6);
      EXPECT_GE(t.objective, -1e-9);
      dp_total += t.objective;
      exact_total += e.objective;
    }
    EXPECT_GE(dp_total, 0.9 * exact_total) << "m = " << m;
  }
}

TEST(IntrinsicDp, PlansStayPhysicalAndDeterministic) {
  std::mt19937_64 rng(29);
  const SolverParams p;
  for (int i = 0; i < 100; ++i) {
    Snapshot s;
    std::uniform_real_distribution<double> soc(0.0, 10.0);
    s.soc = soc(rng);
    s.phi = i % 3;
    for (int t = 0; t < 8; ++t) s.products.push_back(testing::random_product(rng, t, 10, 40));
    const TargetPositions a = solve_intrinsic(s, p);
    const TargetPositions b = solve_intrinsic(s, p);
    ASSERT_EQ(a.stages.size(), b.stages.size());
    std::vector<Lots> positions;
    for (std::size_t t = 0; t < a.stages.size(); ++t) {
      EXPECT_EQ(a.stages[t].delta, b.stages[t].delta);
      positions.push_back(a.stages[t].target());
    }
    EXPECT_EQ(a.objective, b.objective);
    EXPECT_GE(a.objective, 0.0);
    EXPECT_TRUE(audit_schedule(positions, s.soc, p.battery, p.market));
  }
}

}  // namespace
}  // namespace ritrade
