#pragma once

#include "ritrade/battery.hpp"
#include "ritrade/lob.hpp"

#include <cstdint>
#include <vector>

namespace ritrade {

/// A buy-low/sell-high opportunity placed verbatim into the stream: an ask in one product and
/// a bid in another, both posted at `at` and resting until cancelled or consumed.
struct PlantedPair {
  TimeMs at = 0;
  ProductId buy_product = 0;
  ProductId sell_product = 0;
  Cents ask_price = 0;
  Cents bid_price = 0;
  Lots qty = 0;
};

/// Parameters of the synthetic order flow. Prices are in EUR/MWh, times in ms.
///
/// Each hourly product gets a mid price from a daily sinusoid plus AR(1) noise across
/// consecutive hours, which then drifts as a random walk while the product trades. Orders
/// arrive with an intensity that grows exponentially toward gate closure and rest at a
/// distance from the mid that narrows as delivery approaches.
struct SyntheticFlowSpec {
  std::uint64_t seed = 42;
  TimeMs start = 1'609'459'200'000;  // 2021-01-01T00:00Z, first delivery
  int days = 1;
  bool background = true;

  TimeMs open_lead_ms = 8 * kHourMs;
  TimeMs gate_closure_lead_ms = 30 * kMinuteMs;

  double base_price = 50.0;
  double daily_amplitude = 20.0;
  double ar_coefficient = 0.8;
  double ar_noise = 6.0;
  double drift_per_order = 0.4;  // random-walk step of the mid per arriving order

  double spread_near = 1.0;  // typical half-spread close to delivery
  double spread_far = 8.0;   // and at the opening of trading
  double depth_offset = 2.0; // mean extra distance of a resting order behind the half-spread

  double orders_per_product = 24.0;  // mean, Poisson
  double arrival_scale_ms = 1.5 * static_cast<double>(kHourMs);
  double mean_qty_mwh = 2.0;
  double aggressive_share = 0.1;  // orders priced through the opposite side
  double cancel_share = 0.3;
  double mean_cancel_after_ms = 20.0 * static_cast<double>(kMinuteMs);

  double negative_probability = 0.01;  // per product: mid shifted below zero
  double negative_level = -40.0;

  double transient_probability = 0.3;   // per product: a short-lived mispriced order
  double transient_discount = 20.0;     // mean distance from the mid
  double transient_qty_mwh = 3.0;
  TimeMs transient_life_ms = 45 * kSecondMs;

  std::vector<PlantedPair> planted;

  void validate() const;
};

/// Deterministic in `spec`; messages are time ordered and sit on the tick and lot grids.
[[nodiscard]] std::vector<BookMessage> generate_synthetic(const SyntheticFlowSpec& spec,
                                                          const MarketParams& market = {});

}  // namespace ritrade
