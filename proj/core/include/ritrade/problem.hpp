#pragma once

#include "ritrade/battery.hpp"
#include "ritrade/lob.hpp"
#include "ritrade/units.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace ritrade {

/// Order-book state of one tradable product as seen by a solver.
struct ProductSnapshot {
  ProductId product = 0;
  Lots position = 0;         // net position already held, in lots
  std::vector<Level> asks;   // cheapest first
  std::vector<Level> bids;   // dearest first
  std::optional<Cents> spread;
};

/// Everything one intrinsic solve needs: products in delivery order, the state of charge at
/// the start of the first one and the spread-penalty coefficient in force.
struct Snapshot {
  TimeMs time = 0;
  double soc = 0.0;
  double phi = 0.0;
  std::vector<ProductSnapshot> products;
};

struct SolverParams {
  BatteryParams battery;
  CostParams cost;
  MarketParams market;
  int grid_size = 11;

  void validate() const;
};

struct StageDecision {
  ProductId product = 0;
  Lots position = 0;      // before the trade
  Lots delta = 0;         // signed lots, > 0 buys
  Cents limit_price = 0;  // worst price level the delta walks through; meaningful iff delta != 0
  double payoff = 0.0;    // including the spread penalty
  double cash = 0.0;      // fills net of nu, without the spread penalty

  [[nodiscard]] Lots target() const noexcept { return position + delta; }
};

struct TargetPositions {
  std::vector<StageDecision> stages;
  double objective = 0.0;       // sum of stage payoffs
  double cash_objective = 0.0;  // sum of stage cash
  std::vector<double> soc_path; // state of charge before each stage plus the final one
  bool physical_start = true;   // holding the current positions is feasible
  bool physical_plan = true;    // the returned targets are feasible
  bool null_fallback = false;   // targets were replaced by the null action

  [[nodiscard]] std::size_t order_count() const noexcept;
};

/// Common interface of the approximate and exact intrinsic solvers.
class Solver {
 public:
  virtual ~Solver() = default;
  virtual TargetPositions solve(const Snapshot& snapshot) = 0;
  [[nodiscard]] virtual std::string_view name() const noexcept = 0;
};

/// Whether delivering the current positions unchanged keeps the battery within bounds.
[[nodiscard]] bool positions_physical(const Snapshot& snapshot, const BatteryParams& battery,
                                      const MarketParams& market);

/// The all-zero plan for a snapshot.
[[nodiscard]] TargetPositions null_plan(const Snapshot& snapshot, const BatteryParams& battery,
                                        const MarketParams& market);

}  // namespace ritrade
