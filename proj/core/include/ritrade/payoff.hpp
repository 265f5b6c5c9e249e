#pragma once

#include "ritrade/battery.hpp"
#include "ritrade/lob.hpp"

#include <span>
#include <vector>

namespace ritrade {

/// Immediate value of trading k lots in one product against its current book.
///
/// Buying walks the asks cheapest-first at (P + nu) per MWh, selling walks the bids
/// dearest-first at (P - nu) per MWh, and every MWh traded additionally pays the spread
/// penalty phi * spread. Values are tabulated per lot once, so evaluation is a lookup.
class PayoffCurve {
 public:
  PayoffCurve() { reset(); }

  /// `max_buy` / `max_sell` cap the tabulated range; depth beyond them is ignored.
  void build(std::span<const Level> asks, std::span<const Level> bids, double nu,
             double penalty_per_mwh, double lot_mwh, Lots max_buy, Lots max_sell);

  [[nodiscard]] Lots max_buy() const noexcept { return static_cast<Lots>(buy_value_.size()) - 1; }
  [[nodiscard]] Lots max_sell() const noexcept { return static_cast<Lots>(sell_value_.size()) - 1; }
  [[nodiscard]] ActionRange range() const noexcept { return {-max_sell(), max_buy()}; }

  /// Payoff including the spread penalty. Precondition: range().contains(k).
  [[nodiscard]] double value(Lots k) const noexcept {
    return k >= 0 ? buy_value_[static_cast<std::size_t>(k)]
                  : sell_value_[static_cast<std::size_t>(-k)];
  }
  /// Cash of the fills net of nu, without the penalty.
  [[nodiscard]] double cash(Lots k) const noexcept {
    return k >= 0 ? buy_cash_[static_cast<std::size_t>(k)]
                  : sell_cash_[static_cast<std::size_t>(-k)];
  }
  /// Limit price that lets an all-or-none order for k lots clear against the walked levels.
  [[nodiscard]] Cents limit_price(Lots k) const noexcept {
    return k >= 0 ? buy_limit_[static_cast<std::size_t>(k)]
                  : sell_limit_[static_cast<std::size_t>(-k)];
  }

 private:
  void reset();

  std::vector<double> buy_value_, sell_value_;
  std::vector<double> buy_cash_, sell_cash_;
  std::vector<Cents> buy_limit_, sell_limit_;
};

/// Convenience builder straight from a book. The tabulated range covers every delta the
/// power limits allow from `position`.
[[nodiscard]] PayoffCurve build_payoff(const OrderBook& book, TimeMs clock, Lots position,
                                       const CostParams& cost, double phi,
                                       const BatteryParams& battery, const MarketParams& market);

}  // namespace ritrade
