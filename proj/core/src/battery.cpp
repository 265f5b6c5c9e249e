#include "ritrade/battery.hpp"

#include <fmt/format.h>

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace ritrade {

namespace {

// Bounds are computed in lot units; values within this distance of an integer are
// treated as that integer before inward rounding.
constexpr double kLotSnap = 1e-9;

Lots ceil_to_stride(double x, int kappa) {
  const double scaled = x / kappa;
  return static_cast<Lots>(std::ceil(scaled - kLotSnap)) * kappa;
}

Lots floor_to_stride(double x, int kappa) {
  const double scaled = x / kappa;
  return static_cast<Lots>(std::floor(scaled + kLotSnap)) * kappa;
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void BatteryParams::validate() const {
  require(s_max > 0.0, "battery: s_max must be positive");
  require(f_min < 0.0, "battery: f_min must be negative");
  require(f_max > 0.0, "battery: f_max must be positive");
  require(eta_in > 0.0 && eta_in <= 1.0, "battery: eta_in must lie in (0, 1]");
  require(eta_out > 0.0 && eta_out <= 1.0, "battery: eta_out must lie in (0, 1]");
  require(s0 >= 0.0 && s0 <= s_max, "battery: s0 must lie in [0, s_max]");
}

void CostParams::validate() const {
  require(nu_trade >= 0.0, "cost: nu_trade must be nonnegative");
  require(nu_deg >= 0.0, "cost: nu_deg must be nonnegative");
}

void MarketParams::validate() const {
  require(lot_mwh > 0.0, "market: lot size must be positive");
  require(kappa >= 1, "market: kappa must be at least 1");
  require(tick >= 1, "market: tick must be at least one cent");
}

ActionRange power_actions(Lots position, const BatteryParams& p, const MarketParams& m) noexcept {
  const double u = m.lot_mwh;
  const double f0 = static_cast<double>(position) * u;
  return {ceil_to_stride((p.f_min - f0) / u, m.kappa), floor_to_stride((p.f_max - f0) / u, m.kappa)};
}

ActionRange feasible_actions(double soc, Lots position, const BatteryParams& p,
                             const MarketParams& m) noexcept {
  assert(soc >= -kSocTolerance && soc <= p.s_max + kSocTolerance);
  const double u = m.lot_mwh;
  const double f0 = static_cast<double>(position) * u;
  const ActionRange storage{
      ceil_to_stride(-(p.eta_out * soc + f0) / u, m.kappa),
      floor_to_stride((p.s_max - soc) / (p.eta_in * u) - f0 / u, m.kappa),
  };
  return storage.intersect(power_actions(position, p, m));
}

double cycles_per_day(double withdrawn_mwh, double days, const BatteryParams& p) {
  if (days < 1.0) throw std::invalid_argument(fmt::format("cycles: days must be >= 1, got {}", days));
  return withdrawn_mwh / (p.s_max * days);
}

}  // namespace ritrade
