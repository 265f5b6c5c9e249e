#pragma once

#include "ritrade/payoff.hpp"
#include "ritrade/problem.hpp"

#include <span>
#include <vector>

namespace ritrade {

/// Sorted state-of-charge points on which value functions are stored.
class StateGrid {
 public:
  /// m equidistant points spanning [0, s_max] inclusive.
  static StateGrid uniform(int m, double s_max);
  /// Arbitrary strictly increasing points (e.g. the exact reachable sets).
  static StateGrid from_points(std::vector<double> points);

  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] double point(std::size_t i) const noexcept {
    return uniform_ ? static_cast<double>(i) * step_ : points_[i];
  }
  [[nodiscard]] bool is_uniform() const noexcept { return uniform_; }

  /// Piecewise-linear interpolation of `values` (one per point); clamps outside the grid.
  [[nodiscard]] double interpolate(std::span<const double> values, double s) const noexcept;

  [[nodiscard]] std::vector<double> points() const;

 private:
  StateGrid() = default;

  bool uniform_ = true;
  std::size_t size_ = 0;
  double step_ = 0.0;
  double inv_step_ = 0.0;
  std::vector<double> points_;
};

/// Linear interpolation on an arbitrary sorted grid. Exact at grid points.
[[nodiscard]] double interpolate(std::span<const double> grid, std::span<const double> values,
                                 double s) noexcept;

inline double StateGrid::interpolate(std::span<const double> values, double s) const noexcept {
  if (!uniform_) return ritrade::interpolate(points_, values, s);
  const double x = s * inv_step_;
  if (x <= 0.0) return values[0];
  const std::size_t last = size_ - 1;
  if (x >= static_cast<double>(last)) return values[last];
  const auto i = static_cast<std::size_t>(x);
  const double lambda = x - static_cast<double>(i);
  return values[i] + lambda * (values[i + 1] - values[i]);
}

/// Approximate value functions V_t on a grid per stage; the stage after the last is zero.
class ValueFunctionSet {
 public:
  void reset(std::vector<StateGrid> grids);

  [[nodiscard]] std::size_t stages() const noexcept { return grids_.empty() ? 0 : grids_.size() - 1; }
  [[nodiscard]] const StateGrid& grid(std::size_t t) const noexcept { return grids_[t]; }
  [[nodiscard]] std::span<const double> values(std::size_t t) const noexcept {
    return {values_.data() + offsets_[t], grids_[t].size()};
  }
  [[nodiscard]] std::span<double> values(std::size_t t) noexcept {
    return {values_.data() + offsets_[t], grids_[t].size()};
  }
  [[nodiscard]] double evaluate(std::size_t t, double s) const noexcept {
    return grids_[t].interpolate(values(t), s);
  }

 private:
  std::vector<StateGrid> grids_;
  std::vector<std::size_t> offsets_;
  std::vector<double> values_;
};

/// Dynamic-programming intrinsic solver: one stage per product, state of charge as the state,
/// value functions interpolated linearly between grid points.
///
/// Ties between actions are broken toward the null action, then toward smaller |k|. When the
/// inherited positions leave no feasible action at some state, the least-infeasible action is
/// taken with a steep penalty so earlier stages steer back to a physical schedule.
class IntrinsicDp final : public Solver {
 public:
  explicit IntrinsicDp(SolverParams params);

  /// Backward pass on the uniform grid of params.grid_size points.
  const ValueFunctionSet& backward_pass(const Snapshot& snapshot);
  /// Backward pass on caller-supplied grids, one per stage plus the terminal one.
  const ValueFunctionSet& backward_pass(const Snapshot& snapshot, std::vector<StateGrid> grids);

  /// Greedy forward pass against the value functions of the last backward pass on the same
  /// snapshot. Falls back to the null action when it is feasible and the plan is not at least
  /// as good.
  [[nodiscard]] TargetPositions forward_pass(const Snapshot& snapshot) const;

  TargetPositions solve(const Snapshot& snapshot) override;
  [[nodiscard]] std::string_view name() const noexcept override { return "dp"; }

  [[nodiscard]] const SolverParams& params() const noexcept { return params_; }
  [[nodiscard]] const ValueFunctionSet& value_functions() const noexcept { return values_; }
  [[nodiscard]] const PayoffCurve& curve(std::size_t stage) const noexcept { return curves_[stage]; }

 private:
  struct Choice {
    Lots k = 0;
    double value = 0.0;
    bool feasible = true;
  };

  void build_curves(const Snapshot& snapshot);
  void run_backward(const Snapshot& snapshot);
  [[nodiscard]] Choice best_action(std::size_t stage, Lots position, double soc) const;

  SolverParams params_;
  StateGrid uniform_grid_;
  std::vector<PayoffCurve> curves_;
  ValueFunctionSet values_;
};

/// backward_pass followed by forward_pass with a fresh solver.
[[nodiscard]] TargetPositions solve_intrinsic(const Snapshot& snapshot, const SolverParams& params);

}  // namespace ritrade
