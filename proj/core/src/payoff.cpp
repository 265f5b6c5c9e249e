#include "ritrade/payoff.hpp"

#include <algorithm>

namespace ritrade {

namespace {

// Fills value[1..cap] by walking `levels` lot by lot. `sign` is -1 for buys (cash out)
// and +1 for sells (cash in); `adjust` is +nu for buys and -nu for sells.
void tabulate(std::span<const Level> levels, Lots cap, double sign, double adjust,
              double penalty_per_mwh, double lot_mwh, std::vector<double>& value,
              std::vector<double>& cash, std::vector<Cents>& limit) {
  Lots available = 0;
  for (const Level& l : levels) available += l.qty;
  const Lots n = std::max<Lots>(0, std::min(cap, available));

  value.resize(static_cast<std::size_t>(n) + 1);
  cash.resize(static_cast<std::size_t>(n) + 1);
  limit.resize(static_cast<std::size_t>(n) + 1);
  value[0] = 0.0;
  cash[0] = 0.0;
  limit[0] = levels.empty() ? 0 : levels.front().price;

  std::size_t level = 0;
  Lots used_in_level = 0;
  for (Lots k = 1; k <= n; ++k) {
    while (used_in_level == levels[level].qty) {
      ++level;
      used_in_level = 0;
    }
    const Cents price = levels[level].price;
    const double per_lot = (cents_to_eur(price) + adjust) * lot_mwh;
    const auto i = static_cast<std::size_t>(k);
    cash[i] = cash[i - 1] + sign * per_lot;
    value[i] = value[i - 1] + sign * per_lot - penalty_per_mwh * lot_mwh;
    limit[i] = price;
    ++used_in_level;
  }
}

}  // namespace

void PayoffCurve::reset() {
  buy_value_.assign(1, 0.0);
  sell_value_.assign(1, 0.0);
  buy_cash_.assign(1, 0.0);
  sell_cash_.assign(1, 0.0);
  buy_limit_.assign(1, 0);
  sell_limit_.assign(1, 0);
}

void PayoffCurve::build(std::span<const Level> asks, std::span<const Level> bids, double nu,
                        double penalty_per_mwh, double lot_mwh, Lots max_buy, Lots max_sell) {
  tabulate(asks, max_buy, -1.0, nu, penalty_per_mwh, lot_mwh, buy_value_, buy_cash_, buy_limit_);
  tabulate(bids, max_sell, +1.0, -nu, penalty_per_mwh, lot_mwh, sell_value_, sell_cash_,
           sell_limit_);
}

PayoffCurve build_payoff(const OrderBook& book, TimeMs clock, Lots position, const CostParams& cost,
                         double phi, const BatteryParams& battery, const MarketParams& market) {
  const ActionRange power = power_actions(position, battery, market);
  const Lots max_buy = std::max<Lots>(0, power.hi);
  const Lots max_sell = std::max<Lots>(0, -power.lo);

  std::vector<Level> asks, bids;
  book.levels(Side::Ask, clock, max_buy, asks);
  book.levels(Side::Bid, clock, max_sell, bids);
  const Quotes q = book.best_quotes(clock);
  const double penalty = q.spread ? phi * cents_to_eur(*q.spread) : 0.0;

  PayoffCurve curve;
  curve.build(asks, bids, cost.nu(), penalty, market.lot_mwh, max_buy, max_sell);
  return curve;
}

}  // namespace ritrade
