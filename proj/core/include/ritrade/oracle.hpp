#pragma once

#include "ritrade/problem.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace ritrade {

class OracleBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleOptions {
  double budget = 1e8;  // cap on the number of (state, action) pairs examined
};

struct ExactSolution {
  bool feasible = true;             // some action sequence keeps the battery in bounds
  double objective = 0.0;           // including the spread penalty
  double cash_objective = 0.0;
  std::vector<Lots> actions;        // signed delta per product
  std::vector<std::vector<Level>> fills;
  std::vector<double> soc_path;     // before each product plus the final state
  std::uint64_t states_explored = 0;
};

/// Globally optimal intrinsic solution on the lot lattice.
///
/// States are the exactly reachable states of charge, identified by the integer lots charged
/// and discharged so far, so no grid or interpolation is involved. Each product gets one signed
/// delta, which rules out buying and selling the same product in one solve. Throws
/// OracleBudgetExceeded when the search would exceed options.budget.
[[nodiscard]] ExactSolution solve_exact(const Snapshot& snapshot, const SolverParams& params,
                                        OracleOptions options = {});

/// Reachable states of charge before each of `products` stages and after the last, starting
/// from s0 with no inherited positions and unlimited liquidity. Element 0 is {s0}.
[[nodiscard]] std::vector<std::vector<double>> exact_grid(const BatteryParams& battery,
                                                          const MarketParams& market, double s0,
                                                          std::size_t products,
                                                          double budget = 1e8);

/// Whether delivering `positions` (lots, in delivery order) from s0 stays within the storage
/// and power bounds.
[[nodiscard]] bool audit_schedule(std::span<const Lots> positions, double s0,
                                  const BatteryParams& battery, const MarketParams& market);

/// Solver adapter over solve_exact. Infeasible instances yield the null plan.
class ExactSolver final : public Solver {
 public:
  explicit ExactSolver(SolverParams params, OracleOptions options = {});

  TargetPositions solve(const Snapshot& snapshot) override;
  [[nodiscard]] std::string_view name() const noexcept override { return "exact"; }

  [[nodiscard]] const ExactSolution& last() const noexcept { return last_; }

 private:
  SolverParams params_;
  OracleOptions options_;
  ExactSolution last_;
};

}  // namespace ritrade
