#include "ritrade/engine.hpp"
#include "ritrade/oracle.hpp"
#include "ritrade/synthetic.hpp"

#include "support/builders.hpp"

#include <gtest/gtest.h>

#include <map>

namespace ritrade {
namespace {

using testing::add;
using testing::cancel;
using testing::small_params;

constexpr ProductId kA = 10 * kHourMs;
constexpr ProductId kB = 11 * kHourMs;

BacktestConfig pair_config(TimeMs delay = 0) {
  BacktestConfig c;
  c.solver = small_params(10.0, 10.0, 1.0, 0.09, 4.0);
  c.technical_delay_ms = delay;
  return c;
}

std::vector<BookMessage> pair_stream(TimeMs at = 0) {
  return {add(1, kA, Side::Ask, 20, 10, at), add(2, kB, Side::Bid, 60, 10, at)};
}

TEST(Backtest, PlantedPair) {
  const auto stream = pair_stream();
  const BacktestResult r = run_backtest(pair_config(), stream);
  EXPECT_NEAR(r.reward, 318.20, 1e-9);
  EXPECT_NEAR(r.gross_cash, 400.0, 1e-9);
  EXPECT_NEAR(r.fees, 1.8, 1e-9);
  EXPECT_NEAR(r.degradation, 80.0, 1e-9);
  EXPECT_NEAR(r.traded_mwh, 20.0, 1e-12);
  EXPECT_NEAR(r.settled_mwh, 20.0, 1e-12);
  EXPECT_NEAR(r.withdrawn_mwh, 10.0, 1e-12);
  EXPECT_EQ(r.days, 1.0);
  EXPECT_NEAR(r.cycles_per_day, 1.0, 1e-12);
  ASSERT_EQ(r.trades.size(), 2U);
  EXPECT_EQ(r.trades[0].side, Direction::Buy);
  EXPECT_EQ(r.trades[0].price, 2000);
  EXPECT_EQ(r.trades[1].side, Direction::Sell);
  EXPECT_EQ(r.trades[1].qty, 100);
  ASSERT_EQ(r.schedule.size(), 2U);
  EXPECT_EQ(r.schedule[0], (ScheduleEntry{kA, 100, 10.0}));
  EXPECT_EQ(r.schedule[1].position, -100);
  EXPECT_NEAR(r.schedule[1].soc_end, 0.0, 1e-12);
  EXPECT_TRUE(r.imbalances.empty());
  EXPECT_EQ(r.counters.orders_rejected, 0U);
  EXPECT_EQ(r.negative_physical_solves, 0U);
  ASSERT_FALSE(r.reward_series.empty());
  EXPECT_NEAR(r.reward_series.back().reward, r.reward, 1e-9);
}

TEST(Backtest, PlantedPairWithDelayDefersTheSecondSolve) {
  const auto stream = pair_stream();
  const BacktestResult r = run_backtest(pair_config(200), stream);
  EXPECT_NEAR(r.reward, 318.20, 1e-9);
  EXPECT_EQ(r.counters.deferred_solves, 1U);
  ASSERT_EQ(r.trades.size(), 2U);
  EXPECT_EQ(r.trades[0].time, 400);
}

TEST(Backtest, EmptyStream) {
  const BacktestResult r = run_backtest(pair_config(), std::vector<BookMessage>{});
  EXPECT_EQ(r.reward, 0.0);
  EXPECT_TRUE(r.trades.empty());
  EXPECT_EQ(r.counters.solves, 0U);
  EXPECT_EQ(r.days, 0.0);
}

TEST(Backtest, LiquidityVanishingDuringTheDelay) {
  std::vector<BookMessage> s{add(2, kB, Side::Bid, 60, 10, -1000), add(1, kA, Side::Ask, 20, 10, 0),
                             cancel(1, kA, Side::Ask, 100)};
  BacktestConfig c = pair_config(200);
  c.record_solves = true;
  const BacktestResult r = run_backtest(c, s);
  EXPECT_EQ(r.counters.orders_submitted, 2U);
  EXPECT_EQ(r.counters.orders_rejected, 1U);
  EXPECT_EQ(r.counters.orders_accepted, 1U);
  // the sell went through on its own, leaving a short the empty battery cannot deliver
  ASSERT_EQ(r.imbalances.size(), 1U);
  EXPECT_EQ(r.imbalances[0].product, kB);
  EXPECT_NEAR(r.imbalances[0].violation_mwh, 10.0, 1e-12);
  EXPECT_GE(r.restoration_solves, 1U);
  EXPECT_NEAR(r.gross_cash, 600.0, 1e-9);
}

TEST(Backtest, HourlyTicksOverOneDay) {
  const ProductId p = 30 * kHourMs;
  std::vector<BookMessage> s{add(1, p, Side::Ask, 20, 1, -1), add(2, p, Side::Bid, 10, 1, -1)};
  BacktestConfig c = pair_config();
  c.trigger = SolveTrigger::every(kHourMs);
  c.end = 24 * kHourMs;
  const BacktestResult r = run_backtest(c, s);
  EXPECT_EQ(r.counters.interval_triggers, 24U);
  EXPECT_EQ(r.counters.solves, 24U);
  EXPECT_EQ(r.counters.relevant_updates, 0U);
  ASSERT_EQ(r.schedule.size(), 1U);  // settled at the end of the run
}

TEST(Backtest, IntervalModeWaitsForTheNextBoundary) {
  const ProductId a = 14 * kHourMs, b = 15 * kHourMs;
  const TimeMs at = 10 * kHourMs + 30 * kMinuteMs;
  std::vector<BookMessage> s{add(1, a, Side::Ask, 20, 10, at), add(2, b, Side::Bid, 60, 10, at)};
  BacktestConfig c = pair_config(200);
  c.trigger = SolveTrigger::every(kHourMs);
  const BacktestResult r = run_backtest(c, s);
  ASSERT_EQ(r.trades.size(), 2U);
  EXPECT_EQ(r.trades[0].time, 11 * kHourMs + 200);
  EXPECT_NEAR(r.reward, 318.20, 1e-9);
}

TEST(Backtest, OutOfOrderStreamThrows) {
  std::vector<BookMessage> s{add(1, kA, Side::Ask, 20, 1, 10), add(2, kA, Side::Bid, 10, 1, 5)};
  EXPECT_THROW((void)run_backtest(pair_config(), s), BacktestError);
}

TEST(Backtest, MessagesAfterGateClosureAreIgnored) {
  std::vector<BookMessage> s{add(1, kA, Side::Ask, 20, 1, kA - 30 * kMinuteMs)};
  const BacktestResult r = run_backtest(pair_config(), s);
  EXPECT_EQ(r.counters.messages_ignored, 1U);
  EXPECT_EQ(r.counters.solves, 0U);
}

class SyntheticBacktest : public ::testing::Test {
 protected:
  static std::vector<BookMessage> stream(std::uint64_t seed, int days = 2) {
    SyntheticFlowSpec spec;
    spec.seed = seed;
    spec.days = days;
    return generate_synthetic(spec);
  }
  static BacktestConfig config() {
    BacktestConfig c;
    c.technical_delay_ms = 0;
    c.record_solves = true;
    return c;
  }
};

TEST_F(SyntheticBacktest, CashIsConservedToTheCent) {
  const auto s = stream(1);
  BacktestConfig c = config();
  c.technical_delay_ms = 200;
  c.solve_time = {false, 50};
  const BacktestResult r = run_backtest(c, s);
  ASSERT_FALSE(r.trades.empty());
  std::int64_t cents_lots = 0;
  Lots traded = 0;
  std::map<ProductId, Lots> net;
  for (const TradeRecord& t : r.trades) {
    cents_lots += (t.side == Direction::Sell ? 1 : -1) * t.price * t.qty;
    traded += t.qty;
    net[t.product] += t.side == Direction::Buy ? t.qty : -t.qty;
  }
  const double lot = c.solver.market.lot_mwh;
  EXPECT_EQ(r.gross_cash, static_cast<double>(cents_lots) / 100.0 * lot);
  EXPECT_EQ(r.traded_mwh, static_cast<double>(traded) * lot);
  Lots settled = 0;
  for (const ScheduleEntry& e : r.schedule) {
    EXPECT_EQ(e.position, net.count(e.product) ? net[e.product] : 0);
    settled += std::abs(e.position);
  }
  EXPECT_EQ(r.settled_mwh, static_cast<double>(settled) * lot);
  EXPECT_NEAR(r.reward, r.gross_cash - r.fees - r.degradation, 1e-9);
}

TEST_F(SyntheticBacktest, ZeroDelayOrdersAlwaysFill) {
  const auto s = stream(2);
  const BacktestResult r = run_backtest(config(), s);
  EXPECT_GT(r.counters.orders_submitted, 0U);
  EXPECT_EQ(r.counters.orders_rejected, 0U);
  EXPECT_EQ(r.negative_physical_solves, 0U);
  EXPECT_EQ(r.restoration_solves, 0U);
  EXPECT_TRUE(r.imbalances.empty());
  for (const ScheduleEntry& e : r.schedule) {
    EXPECT_GE(e.soc_end, -kSocTolerance);
    EXPECT_LE(e.soc_end, BacktestConfig{}.solver.battery.s_max + kSocTolerance);
  }
}

TEST_F(SyntheticBacktest, Deterministic) {
  const auto s = stream(3);
  BacktestConfig c = config();
  c.technical_delay_ms = 200;
  const BacktestResult a = run_backtest(c, s);
  const BacktestResult b = run_backtest(c, s);
  EXPECT_TRUE(same_outcome(a, b));
}

TEST_F(SyntheticBacktest, SolvesNeverOverlap) {
  const auto s = stream(4);
  BacktestConfig c = config();
  c.technical_delay_ms = 200;
  c.solve_time = {false, 300};
  const BacktestResult r = run_backtest(c, s);
  ASSERT_GT(r.solves_log.size(), 10U);
  for (std::size_t i = 1; i < r.solves_log.size(); ++i) {
    EXPECT_GE(r.solves_log[i].time, r.solves_log[i - 1].time + r.solves_log[i - 1].delay_ms);
    EXPECT_EQ(r.solves_log[i].delay_ms, 500);
  }
  EXPECT_GT(r.counters.deferred_solves, 0U);
}

TEST_F(SyntheticBacktest, ExternalSolverIsUsed) {
  const auto s = stream(5, 1);
  BacktestConfig c = config();
  c.max_active_products = 6;
  c.solver = small_params(1.0, 1.0, 0.95, 0.09, 4.0);
  ExactSolver exact(c.solver);
  std::size_t calls = 0;
  Backtest bt(c, &exact);
  bt.set_observer([&](const Snapshot& snap, const TargetPositions&) {
    ++calls;
    EXPECT_LE(snap.products.size(), 6U);
  });
  const BacktestResult r = bt.run(s);
  EXPECT_EQ(calls, r.counters.solves);
  EXPECT_EQ(r.negative_physical_solves, 0U);
  EXPECT_EQ(r.counters.orders_rejected, 0U);
}

}  // namespace
}  // namespace ritrade
