#include "ritrade/oracle.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace ritrade {

namespace {

struct StateKey {
  Lots charged = 0;
  Lots discharged = 0;

  friend bool operator==(const StateKey&, const StateKey&) = default;
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const noexcept {
    const auto a = static_cast<std::uint64_t>(k.charged);
    const auto b = static_cast<std::uint64_t>(k.discharged);
    return static_cast<std::size_t>(a * 0x9E3779B97F4A7C15ULL ^ (b + 0x632BE59BD9B4E019ULL + (a << 6)));
  }
};

struct Node {
  StateKey key;
  double soc = 0.0;
  double value = 0.0;
  std::int64_t parent = -1;
  Lots action = 0;
};

// State bookkeeping shared by the oracle and the grid construction. With unit efficiencies
// the charged and discharged totals collapse into their difference.
class StateSpace {
 public:
  StateSpace(const BatteryParams& battery, const MarketParams& market, double s0)
      : battery_(battery), market_(market), s0_(s0),
        lossless_(battery.eta_in == 1.0 && battery.eta_out == 1.0) {}

  [[nodiscard]] StateKey step(StateKey from, Lots total) const noexcept {
    StateKey to = from;
    if (total > 0) to.charged += total;
    if (total < 0) to.discharged -= total;
    if (lossless_) to = {to.charged - to.discharged, 0};
    return to;
  }

  [[nodiscard]] double soc(StateKey k) const noexcept {
    const double u = market_.lot_mwh;
    return s0_ + battery_.eta_in * u * static_cast<double>(k.charged) -
           u * static_cast<double>(k.discharged) / battery_.eta_out;
  }

 private:
  const BatteryParams& battery_;
  const MarketParams& market_;
  double s0_;
  bool lossless_;
};

struct Walk {
  double cash = 0.0;
  Cents worst = 0;
  std::vector<Level> fills;
};

// Walks `levels` for n lots. Buys pay (P + nu), sells receive (P - nu).
Walk walk(std::span<const Level> levels, Lots n, bool buy, double nu, double lot_mwh) {
  Walk w;
  Lots remaining = n;
  for (const Level& l : levels) {
    if (remaining == 0) break;
    const Lots take = std::min(remaining, l.qty);
    const double mwh = static_cast<double>(take) * lot_mwh;
    const double price = cents_to_eur(l.price);
    w.cash += buy ? -(price + nu) * mwh : (price - nu) * mwh;
    w.worst = l.price;
    w.fills.push_back({l.price, take});
    remaining -= take;
  }
  return w;
}

Lots depth(std::span<const Level> levels) {
  Lots total = 0;
  for (const Level& l : levels) total += l.qty;
  return total;
}

struct StageTable {
  Lots lo = 0;
  Lots hi = 0;
  std::vector<double> value;  // indexed by k - lo
  std::vector<double> cash;
  std::vector<Lots> order;    // admissible deltas: 0, then alternating by |k|
};

StageTable tabulate_stage(const ProductSnapshot& p, double phi, const SolverParams& params) {
  const MarketParams& m = params.market;
  const ActionRange power = power_actions(p.position, params.battery, m);
  Lots hi = std::min(depth(p.asks), std::max<Lots>(0, power.hi));
  Lots lo = -std::min(depth(p.bids), std::max<Lots>(0, -power.lo));
  hi = hi / m.kappa * m.kappa;
  lo = lo / m.kappa * m.kappa;

  StageTable table;
  table.lo = lo;
  table.hi = hi;
  const double nu = params.cost.nu();
  const double penalty = p.spread ? phi * cents_to_eur(*p.spread) : 0.0;
  for (Lots k = lo; k <= hi; ++k) {
    const Walk w = k >= 0 ? walk(p.asks, k, true, nu, m.lot_mwh) : walk(p.bids, -k, false, nu, m.lot_mwh);
    table.cash.push_back(w.cash);
    table.value.push_back(w.cash - penalty * static_cast<double>(std::abs(k)) * m.lot_mwh);
  }
  table.order.push_back(0);
  for (Lots a = m.kappa; a <= std::max(hi, -lo); a += m.kappa) {
    if (a <= hi) table.order.push_back(a);
    if (-a >= lo) table.order.push_back(-a);
  }
  return table;
}

void charge_budget(double& used, std::size_t states, std::size_t actions, double budget) {
  used += static_cast<double>(states) * static_cast<double>(actions);
  if (used > budget) {
    throw OracleBudgetExceeded(
        fmt::format("oracle: more than {:.0f} state-action pairs required", budget));
  }
}

}  // namespace

ExactSolution solve_exact(const Snapshot& snapshot, const SolverParams& params,
                          OracleOptions options) {
  params.validate();
  const BatteryParams& battery = params.battery;
  const MarketParams& market = params.market;
  const std::size_t n = snapshot.products.size();

  std::vector<StageTable> tables;
  tables.reserve(n);
  for (const ProductSnapshot& p : snapshot.products) tables.push_back(tabulate_stage(p, snapshot.phi, params));

  const StateSpace space(battery, market, snapshot.soc);
  std::vector<std::vector<Node>> layers(n + 1);
  layers[0].push_back({StateKey{}, snapshot.soc, 0.0, -1, 0});

  ExactSolution sol;
  double used = 0.0;
  std::unordered_map<StateKey, std::size_t, StateKeyHash> index;
  for (std::size_t t = 0; t < n; ++t) {
    const std::vector<Node>& from = layers[t];
    std::vector<Node>& to = layers[t + 1];
    const StageTable& table = tables[t];
    const Lots position = snapshot.products[t].position;
    charge_budget(used, from.size(), table.order.size(), options.budget);
    sol.states_explored += from.size();

    index.clear();
    for (std::size_t i = 0; i < from.size(); ++i) {
      const Node& node = from[i];
      for (const Lots k : table.order) {
        const StateKey key = space.step(node.key, position + k);
        const double soc = space.soc(key);
        if (!soc_in_bounds(soc, battery)) continue;
        const double value = node.value + table.value[static_cast<std::size_t>(k - table.lo)];
        const auto [it, inserted] = index.try_emplace(key, to.size());
        if (inserted) {
          to.push_back({key, soc, value, static_cast<std::int64_t>(i), k});
        } else if (value > to[it->second].value) {
          Node& existing = to[it->second];
          existing.value = value;
          existing.parent = static_cast<std::int64_t>(i);
          existing.action = k;
        }
      }
    }
    if (to.empty()) {
      sol.feasible = false;
      return sol;
    }
  }
  sol.states_explored += layers[n].size();

  std::size_t best = 0;
  for (std::size_t i = 1; i < layers[n].size(); ++i) {
    if (layers[n][i].value > layers[n][best].value) best = i;
  }

  sol.actions.assign(n, 0);
  sol.soc_path.assign(n + 1, 0.0);
  std::int64_t cursor = static_cast<std::int64_t>(best);
  for (std::size_t t = n + 1; t-- > 0;) {
    const Node& node = layers[t][static_cast<std::size_t>(cursor)];
    sol.soc_path[t] = node.soc;
    if (t > 0) sol.actions[t - 1] = node.action;
    cursor = node.parent;
  }
  sol.objective = layers[n][best].value;

  sol.fills.resize(n);
  const double nu = params.cost.nu();
  for (std::size_t t = 0; t < n; ++t) {
    const Lots k = sol.actions[t];
    const ProductSnapshot& p = snapshot.products[t];
    if (k == 0) continue;
    Walk w = k > 0 ? walk(p.asks, k, true, nu, market.lot_mwh) : walk(p.bids, -k, false, nu, market.lot_mwh);
    sol.cash_objective += w.cash;
    sol.fills[t] = std::move(w.fills);
  }
  return sol;
}

std::vector<std::vector<double>> exact_grid(const BatteryParams& battery, const MarketParams& market,
                                            double s0, std::size_t products, double budget) {
  battery.validate();
  market.validate();
  const StateSpace space(battery, market, s0);
  std::vector<StateKey> layer{StateKey{}};
  std::vector<std::vector<double>> grids;
  grids.reserve(products + 1);

  const auto to_points = [&](const std::vector<StateKey>& keys) {
    std::vector<double> pts;
    pts.reserve(keys.size());
    for (const StateKey& k : keys) pts.push_back(std::clamp(space.soc(k), 0.0, battery.s_max));
    std::sort(pts.begin(), pts.end());
    std::vector<double> merged;
    for (const double s : pts) {
      if (merged.empty() || s - merged.back() > 1e-12) merged.push_back(s);
    }
    return merged;
  };
  grids.push_back({s0});

  double used = 0.0;
  std::unordered_map<StateKey, bool, StateKeyHash> seen;
  for (std::size_t t = 0; t < products; ++t) {
    std::vector<StateKey> next;
    seen.clear();
    for (const StateKey& key : layer) {
      const double s = std::clamp(space.soc(key), 0.0, battery.s_max);
      const ActionRange r = feasible_actions(s, 0, battery, market);
      charge_budget(used, 1, static_cast<std::size_t>(std::max<Lots>(0, r.hi - r.lo + 1)), budget);
      for (Lots k = r.lo; k <= r.hi; k += market.kappa) {
        const StateKey to = space.step(key, k);
        if (!soc_in_bounds(space.soc(to), battery)) continue;
        if (seen.try_emplace(to, true).second) next.push_back(to);
      }
    }
    layer = std::move(next);
    grids.push_back(to_points(layer));
  }
  return grids;
}

bool audit_schedule(std::span<const Lots> positions, double s0, const BatteryParams& battery,
                    const MarketParams& market) {
  double soc = s0;
  if (!soc_in_bounds(soc, battery)) return false;
  for (const Lots pos : positions) {
    const double f = static_cast<double>(pos) * market.lot_mwh;
    if (f < battery.f_min - kSocTolerance || f > battery.f_max + kSocTolerance) return false;
    soc = transition(soc, f, battery);
    if (!soc_in_bounds(soc, battery)) return false;
  }
  return true;
}

ExactSolver::ExactSolver(SolverParams params, OracleOptions options)
    : params_(std::move(params)), options_(options) {
  params_.validate();
}

TargetPositions ExactSolver::solve(const Snapshot& snapshot) {
  last_ = solve_exact(snapshot, params_, options_);
  if (!last_.feasible) return null_plan(snapshot, params_.battery, params_.market);

  TargetPositions plan;
  plan.physical_start = positions_physical(snapshot, params_.battery, params_.market);
  plan.objective = last_.objective;
  plan.cash_objective = last_.cash_objective;
  plan.soc_path = last_.soc_path;
  const double nu = params_.cost.nu();
  for (std::size_t t = 0; t < snapshot.products.size(); ++t) {
    const ProductSnapshot& p = snapshot.products[t];
    const Lots k = last_.actions[t];
    StageDecision d;
    d.product = p.product;
    d.position = p.position;
    d.delta = k;
    if (k != 0) {
      const Walk w = k > 0 ? walk(p.asks, k, true, nu, params_.market.lot_mwh)
                           : walk(p.bids, -k, false, nu, params_.market.lot_mwh);
      const double penalty = p.spread ? snapshot.phi * cents_to_eur(*p.spread) : 0.0;
      d.limit_price = w.worst;
      d.cash = w.cash;
      d.payoff = w.cash - penalty * static_cast<double>(std::abs(k)) * params_.market.lot_mwh;
    }
    plan.stages.push_back(d);
  }
  return plan;
}

}  // namespace ritrade
