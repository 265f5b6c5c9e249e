#include "ritrade/intrinsic_dp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace ritrade {

namespace {

constexpr double kTieEpsilon = 1e-9;
constexpr double kObjectiveTolerance = 1e-9;
// EUR per MWh of state-of-charge violation when no action keeps the battery in bounds.
constexpr double kInfeasibilityPenalty = 1e6;

Lots round_up(Lots x, Lots stride) {
  const Lots q = x / stride;
  return (q * stride < x ? q + 1 : q) * stride;
}

Lots round_down(Lots x, Lots stride) {
  const Lots q = x / stride;
  return (q * stride > x ? q - 1 : q) * stride;
}

ActionRange align(ActionRange r, int kappa) {
  if (kappa == 1 || r.empty()) return r;
  return {round_up(r.lo, kappa), round_down(r.hi, kappa)};
}

// On a tie the action closer to the null action wins; positive before negative.
bool preferred_on_tie(Lots candidate, Lots incumbent) {
  const Lots a = std::abs(candidate);
  const Lots b = std::abs(incumbent);
  return a < b || (a == b && candidate > incumbent);
}

double violation(double soc, const BatteryParams& p) {
  if (soc < 0.0) return -soc;
  if (soc > p.s_max) return soc - p.s_max;
  return 0.0;
}

}  // namespace

StateGrid StateGrid::uniform(int m, double s_max) {
  if (m < 2) throw std::invalid_argument("grid: at least two points are required");
  if (!(s_max > 0.0)) throw std::invalid_argument("grid: s_max must be positive");
  StateGrid g;
  g.uniform_ = true;
  g.size_ = static_cast<std::size_t>(m);
  g.step_ = s_max / static_cast<double>(m - 1);
  g.inv_step_ = 1.0 / g.step_;
  return g;
}

StateGrid StateGrid::from_points(std::vector<double> points) {
  if (points.empty()) throw std::invalid_argument("grid: no points");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i] > points[i - 1])) throw std::invalid_argument("grid: points must increase strictly");
  }
  StateGrid g;
  g.uniform_ = false;
  g.size_ = points.size();
  g.points_ = std::move(points);
  return g;
}

std::vector<double> StateGrid::points() const {
  if (!uniform_) return points_;
  std::vector<double> out(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i] = point(i);
  return out;
}

double interpolate(std::span<const double> grid, std::span<const double> values, double s) noexcept {
  if (s <= grid.front()) return values.front();
  if (s >= grid.back()) return values.back();
  const auto it = std::upper_bound(grid.begin(), grid.end(), s);
  const auto i = static_cast<std::size_t>(it - grid.begin());
  const double lo = grid[i - 1];
  const double hi = grid[i];
  const double lambda = (s - lo) / (hi - lo);
  return lambda * values[i] + (1.0 - lambda) * values[i - 1];
}

void ValueFunctionSet::reset(std::vector<StateGrid> grids) {
  grids_ = std::move(grids);
  offsets_.resize(grids_.size());
  std::size_t total = 0;
  for (std::size_t t = 0; t < grids_.size(); ++t) {
    offsets_[t] = total;
    total += grids_[t].size();
  }
  values_.assign(total, 0.0);
}

IntrinsicDp::IntrinsicDp(SolverParams params)
    : params_(std::move(params)),
      uniform_grid_(StateGrid::uniform(params_.grid_size, params_.battery.s_max)) {
  params_.validate();
}

void IntrinsicDp::build_curves(const Snapshot& snapshot) {
  const std::size_t n = snapshot.products.size();
  curves_.resize(n);
  const double nu = params_.cost.nu();
  for (std::size_t t = 0; t < n; ++t) {
    const ProductSnapshot& p = snapshot.products[t];
    const ActionRange power = power_actions(p.position, params_.battery, params_.market);
    const double penalty = p.spread ? snapshot.phi * cents_to_eur(*p.spread) : 0.0;
    curves_[t].build(p.asks, p.bids, nu, penalty, params_.market.lot_mwh,
                     std::max<Lots>(0, power.hi), std::max<Lots>(0, -power.lo));
  }
}

IntrinsicDp::Choice IntrinsicDp::best_action(std::size_t stage, Lots position, double soc) const {
  const BatteryParams& battery = params_.battery;
  const MarketParams& market = params_.market;
  const PayoffCurve& curve = curves_[stage];
  const StateGrid& next_grid = values_.grid(stage + 1);
  const std::span<const double> next = values_.values(stage + 1);
  const ActionRange liquid = align(curve.range(), market.kappa);

  const double s = clamp_soc(soc, battery);
  ActionRange range = feasible_actions(s, position, battery, market).intersect(liquid);
  const bool strict = !range.empty();
  if (!strict) {
    range = power_actions(position, battery, market).intersect(liquid);
    if (range.empty()) range = {0, 0};
  }

  Choice best;
  best.value = -std::numeric_limits<double>::infinity();
  best.feasible = strict;
  bool first = true;
  for (Lots k = range.lo; k <= range.hi; k += market.kappa) {
    const double f = static_cast<double>(position + k) * market.lot_mwh;
    const double next_soc = transition(s, f, battery);
    double v = curve.value(k) + next_grid.interpolate(next, clamp_soc(next_soc, battery));
    if (!strict) v -= kInfeasibilityPenalty * violation(next_soc, battery);
    if (first || v > best.value + kTieEpsilon ||
        (v >= best.value - kTieEpsilon && preferred_on_tie(k, best.k))) {
      best.k = k;
      best.value = v;
      first = false;
    }
  }
  return best;
}

void IntrinsicDp::run_backward(const Snapshot& snapshot) {
  const std::size_t n = snapshot.products.size();
  for (std::size_t t = n; t-- > 0;) {
    const Lots position = snapshot.products[t].position;
    const StateGrid& grid = values_.grid(t);
    std::span<double> out = values_.values(t);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out[i] = best_action(t, position, grid.point(i)).value;
    }
  }
}

const ValueFunctionSet& IntrinsicDp::backward_pass(const Snapshot& snapshot) {
  std::vector<StateGrid> grids(snapshot.products.size() + 1, uniform_grid_);
  return backward_pass(snapshot, std::move(grids));
}

const ValueFunctionSet& IntrinsicDp::backward_pass(const Snapshot& snapshot,
                                                   std::vector<StateGrid> grids) {
  if (grids.size() != snapshot.products.size() + 1) {
    throw std::invalid_argument("dp: need one grid per product plus a terminal grid");
  }
  build_curves(snapshot);
  values_.reset(std::move(grids));
  run_backward(snapshot);
  return values_;
}

TargetPositions IntrinsicDp::forward_pass(const Snapshot& snapshot) const {
  const BatteryParams& battery = params_.battery;
  const MarketParams& market = params_.market;
  TargetPositions plan;
  plan.physical_start = positions_physical(snapshot, battery, market);
  plan.stages.reserve(snapshot.products.size());
  plan.soc_path.reserve(snapshot.products.size() + 1);

  double soc = clamp_soc(snapshot.soc, battery);
  plan.soc_path.push_back(soc);
  for (std::size_t t = 0; t < snapshot.products.size(); ++t) {
    const ProductSnapshot& p = snapshot.products[t];
    const Choice choice = best_action(t, p.position, soc);
    const PayoffCurve& curve = curves_[t];

    StageDecision d;
    d.product = p.product;
    d.position = p.position;
    d.delta = choice.k;
    d.limit_price = curve.limit_price(choice.k);
    d.payoff = curve.value(choice.k);
    d.cash = curve.cash(choice.k);
    plan.objective += d.payoff;
    plan.cash_objective += d.cash;
    plan.stages.push_back(d);

    const double next = transition(soc, static_cast<double>(d.target()) * market.lot_mwh, battery);
    if (!choice.feasible || !soc_in_bounds(next, battery)) plan.physical_plan = false;
    soc = clamp_soc(next, battery);
    plan.soc_path.push_back(soc);
  }

  if (plan.physical_start && (!plan.physical_plan || plan.objective < -kObjectiveTolerance)) {
    TargetPositions fallback = null_plan(snapshot, battery, market);
    fallback.null_fallback = true;
    return fallback;
  }
  return plan;
}

TargetPositions IntrinsicDp::solve(const Snapshot& snapshot) {
  backward_pass(snapshot);
  return forward_pass(snapshot);
}

TargetPositions solve_intrinsic(const Snapshot& snapshot, const SolverParams& params) {
  IntrinsicDp dp(params);
  return dp.solve(snapshot);
}

}  // namespace ritrade
