#include "ritrade/battery.hpp"

#include <gtest/gtest.h>

#include <random>

namespace ritrade {
namespace {

BatteryParams unit_battery(double s_max, double f, double eta) {
  return {s_max, -f, f, eta, eta, 0.0};
}

TEST(Transition, Examples) {
  const BatteryParams p;
  EXPECT_DOUBLE_EQ(transition(5.0, 1.0, p), 5.95);
  EXPECT_NEAR(transition(5.0, -1.0, p), 5.0 - 1.0 / 0.95, 1e-15);
  EXPECT_NEAR(transition(5.0, -1.0, p), 3.947368421052632, 1e-12);
  for (double s : {0.0, 2.5, 10.0}) EXPECT_EQ(transition(s, 0.0, p), s);
}

TEST(Transition, MonotoneAndLossy) {
  const BatteryParams p;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), b = u(rng);
    if (a < b) EXPECT_LT(transition(5.0, a, p), transition(5.0, b, p));
    if (a > 0) EXPECT_LT(transition(5.0, a, p), 5.0 + a);
    if (a < 0) EXPECT_LT(transition(5.0, a, p), 5.0 + a);
  }
}

TEST(Transition, RoundTripRecoversEtaProduct) {
  const BatteryParams p;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 4.0);
  for (int i = 0; i < 500; ++i) {
    const double q = u(rng);
    const double charged = transition(2.0, q, p);
    // Discharging d brings the state back to 2.0 when d = eta_out * (charged - 2.0).
    const double sold = p.eta_out * (charged - 2.0);
    EXPECT_NEAR(transition(charged, -sold, p), 2.0, 1e-12);
    EXPECT_NEAR(sold, p.eta_in * p.eta_out * q, 1e-12);
  }
}

TEST(FeasibleActions, Examples) {
  const MarketParams m;
  EXPECT_EQ(feasible_actions(5.0, 0, BatteryParams{}, m), (ActionRange{-47, 52}));
  EXPECT_EQ(feasible_actions(0.0, 0, unit_battery(1.0, 1.0, 1.0), m), (ActionRange{0, 10}));
  EXPECT_EQ(feasible_actions(10.0, 0, unit_battery(10.0, 10.0, 1.0), m), (ActionRange{-100, 0}));
}

TEST(FeasibleActions, RespectsStrideAndInheritedPosition) {
  MarketParams m;
  m.kappa = 5;
  const ActionRange r = feasible_actions(5.0, 0, BatteryParams{}, m);
  EXPECT_EQ(r, (ActionRange{-45, 50}));
  // Holding +3 MWh already: power allows up to 7 MWh more, storage 5/0.95 - 3.
  const MarketParams m1;
  const ActionRange h = feasible_actions(5.0, 30, BatteryParams{}, m1);
  EXPECT_EQ(h.hi, 22);
  EXPECT_EQ(h.lo, -77);
}

// Every k in the range lands inside the bounds, k = 0 is present from physical positions,
// and the neighbours just outside the range would violate a bound.
TEST(FeasibleActions, ExhaustiveSmallGrid) {
  const MarketParams m;
  for (double eta : {1.0, 0.95, 0.8}) {
    const BatteryParams p = unit_battery(1.0, 0.6, eta);
    for (int si = 0; si <= 20; ++si) {
      const double s = 0.05 * si;
      for (Lots pos = -6; pos <= 6; ++pos) {
        const ActionRange r = feasible_actions(s, pos, p, m);
        const auto ok = [&](Lots k) {
          const double f = static_cast<double>(pos + k) * m.lot_mwh;
          const double next = transition(s, f, p);
          return f >= p.f_min - 1e-9 && f <= p.f_max + 1e-9 && soc_in_bounds(next, p);
        };
        for (Lots k = r.lo; k <= r.hi; ++k) EXPECT_TRUE(ok(k)) << s << ' ' << pos << ' ' << k;
        if (!r.empty()) {
          EXPECT_FALSE(ok(r.lo - 1));
          EXPECT_FALSE(ok(r.hi + 1));
        }
        if (ok(0)) {
          EXPECT_TRUE(r.contains(0));
        }
      }
    }
  }
}

TEST(Cycles, Definition) {
  const BatteryParams p;
  EXPECT_DOUBLE_EQ(cycles_per_day(20.0, 1.0, p), 2.0);
  EXPECT_DOUBLE_EQ(cycles_per_day(0.0, 1.0, p), 0.0);
  EXPECT_THROW((void)cycles_per_day(1.0, 0.5, p), std::invalid_argument);
  EXPECT_DOUBLE_EQ(cycles_per_day(70.0, 14.0, p), 0.5);
}

TEST(Params, Validation) {
  BatteryParams p;
  EXPECT_NO_THROW(p.validate());
  p.s0 = 11.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.eta_in = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  CostParams c;
  EXPECT_DOUBLE_EQ(c.nu(), 4.09);
  c.nu_deg = -1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  MarketParams m;
  m.kappa = 0;
  EXPECT_THROW(m.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace ritrade
