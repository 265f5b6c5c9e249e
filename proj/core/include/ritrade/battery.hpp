#pragma once

#include "ritrade/units.hpp"

namespace ritrade {

/// Physical storage limits. Defaults: a 10 MWh / 10 MW unit with 0.95 efficiency each way.
struct BatteryParams {
  double s_max = 10.0;    // MWh
  double f_min = -10.0;   // MW, withdrawal limit (< 0)
  double f_max = 10.0;    // MW, injection limit (> 0)
  double eta_in = 0.95;   // charge efficiency
  double eta_out = 0.95;  // discharge efficiency
  double s0 = 0.0;        // initial state of charge, MWh

  /// Throws std::invalid_argument naming the first violated bound.
  void validate() const;
};

/// Variable costs in EUR/MWh. nu() enters the optimization on both buys and sells; the
/// trading part is booked at each fill and the degradation part once per product at
/// gate closure.
struct CostParams {
  double nu_trade = 0.09;
  double nu_deg = 4.0;

  [[nodiscard]] double nu() const noexcept { return nu_trade + nu_deg; }
  void validate() const;
};

struct MarketParams {
  double lot_mwh = 0.1;  // u
  int kappa = 1;         // action stride in lots
  Cents tick = 1;

  void validate() const;
};

/// Tolerance used when comparing states of charge against the [0, s_max] bounds.
inline constexpr double kSocTolerance = 1e-9;

/// State of charge after delivering a net position of `f` MWh in one product.
/// Positive f charges at eta_in, negative f discharges at 1 / eta_out.
[[nodiscard]] constexpr double transition(double soc, double f, const BatteryParams& p) noexcept {
  return f > 0.0 ? soc + p.eta_in * f : soc + f / p.eta_out;
}

[[nodiscard]] constexpr bool soc_in_bounds(double soc, const BatteryParams& p) noexcept {
  return soc >= -kSocTolerance && soc <= p.s_max + kSocTolerance;
}

[[nodiscard]] constexpr double clamp_soc(double soc, const BatteryParams& p) noexcept {
  return soc < 0.0 ? 0.0 : (soc > p.s_max ? p.s_max : soc);
}

/// Closed integer range of lot deltas; empty when lo > hi.
struct ActionRange {
  Lots lo = 0;
  Lots hi = -1;

  [[nodiscard]] bool empty() const noexcept { return lo > hi; }
  [[nodiscard]] bool contains(Lots k) const noexcept { return k >= lo && k <= hi; }
  [[nodiscard]] ActionRange intersect(ActionRange o) const noexcept {
    return {lo > o.lo ? lo : o.lo, hi < o.hi ? hi : o.hi};
  }

  friend bool operator==(const ActionRange&, const ActionRange&) = default;
};

/// Deltas k (multiples of kappa) such that the new position (position + k) * u keeps the
/// state of charge inside [0, s_max] and the power inside [f_min, f_max]. Fractional bounds
/// are rounded inward.
[[nodiscard]] ActionRange feasible_actions(double soc, Lots position, const BatteryParams& p,
                                           const MarketParams& m) noexcept;

/// Power limits only: deltas keeping the new position inside [f_min, f_max].
[[nodiscard]] ActionRange power_actions(Lots position, const BatteryParams& p,
                                        const MarketParams& m) noexcept;

/// Full cycles per day: energy withdrawn from storage over s_max * days.
[[nodiscard]] double cycles_per_day(double withdrawn_mwh, double days, const BatteryParams& p);

}  // namespace ritrade
