#include "ritrade/problem.hpp"

#include <stdexcept>

namespace ritrade {

void SolverParams::validate() const {
  battery.validate();
  cost.validate();
  market.validate();
  if (grid_size < 2) throw std::invalid_argument("solver: grid size must be at least 2");
}

std::size_t TargetPositions::order_count() const noexcept {
  std::size_t n = 0;
  for (const StageDecision& d : stages) n += d.delta != 0 ? 1 : 0;
  return n;
}

bool positions_physical(const Snapshot& snapshot, const BatteryParams& battery,
                        const MarketParams& market) {
  double soc = snapshot.soc;
  if (!soc_in_bounds(soc, battery)) return false;
  for (const ProductSnapshot& p : snapshot.products) {
    const double f = static_cast<double>(p.position) * market.lot_mwh;
    if (f < battery.f_min - kSocTolerance || f > battery.f_max + kSocTolerance) return false;
    soc = transition(soc, f, battery);
    if (!soc_in_bounds(soc, battery)) return false;
  }
  return true;
}

TargetPositions null_plan(const Snapshot& snapshot, const BatteryParams& battery,
                          const MarketParams& market) {
  TargetPositions plan;
  plan.physical_start = positions_physical(snapshot, battery, market);
  plan.physical_plan = plan.physical_start;
  plan.stages.reserve(snapshot.products.size());
  plan.soc_path.reserve(snapshot.products.size() + 1);
  double soc = snapshot.soc;
  plan.soc_path.push_back(soc);
  for (const ProductSnapshot& p : snapshot.products) {
    StageDecision d;
    d.product = p.product;
    d.position = p.position;
    plan.stages.push_back(d);
    soc = transition(soc, static_cast<double>(p.position) * market.lot_mwh, battery);
    plan.soc_path.push_back(soc);
  }
  return plan;
}

}  // namespace ritrade
