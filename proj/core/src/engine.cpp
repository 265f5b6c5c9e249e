#include "ritrade/engine.hpp"

#include "ritrade/intrinsic_dp.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>

namespace ritrade {

namespace {

constexpr double kObjectiveTolerance = 1e-9;

TimeMs ceil_to(TimeMs t, TimeMs step) {
  const TimeMs q = t / step;
  const TimeMs down = (t % step != 0 && t < 0) ? q - 1 : q;
  return down * step == t ? t : (down + 1) * step;
}

}  // namespace

double PhiSchedule::at(TimeMs t) const noexcept {
  double phi = base;
  for (const auto& [from, value] : steps) {
    if (from > t) break;
    phi = value;
  }
  return phi;
}

void BacktestConfig::validate() const {
  solver.validate();
  if (start >= end) throw std::invalid_argument("backtest: start must precede end");
  if (technical_delay_ms < 0) throw std::invalid_argument("backtest: technical delay must be >= 0");
  if (solve_time.fixed_ms < 0) throw std::invalid_argument("backtest: solve time must be >= 0");
  if (gate_closure_lead_ms <= 0) throw std::invalid_argument("backtest: gate closure lead must be > 0");
  if (open_lead_ms && *open_lead_ms <= gate_closure_lead_ms) {
    throw std::invalid_argument("backtest: open lead must exceed the gate closure lead");
  }
  if (trigger.mode == SolveMode::FixedInterval && trigger.interval_ms <= 0) {
    throw std::invalid_argument("backtest: solve interval must be positive");
  }
  if (max_active_products == 0) throw std::invalid_argument("backtest: max active products must be >= 1");
  if (phi.base < 0.0) throw std::invalid_argument("backtest: phi must be >= 0");
  for (std::size_t i = 0; i < phi.steps.size(); ++i) {
    if (phi.steps[i].second < 0.0) throw std::invalid_argument("backtest: phi must be >= 0");
    if (i > 0 && phi.steps[i].first <= phi.steps[i - 1].first) {
      throw std::invalid_argument("backtest: phi steps must be sorted by start");
    }
  }
}

bool same_outcome(const BacktestResult& a, const BacktestResult& b) {
  return a.reward == b.reward && a.gross_cash == b.gross_cash && a.fees == b.fees &&
         a.degradation == b.degradation && a.traded_mwh == b.traded_mwh &&
         a.settled_mwh == b.settled_mwh && a.withdrawn_mwh == b.withdrawn_mwh &&
         a.trades == b.trades && a.schedule == b.schedule && a.reward_series == b.reward_series &&
         a.solves_log == b.solves_log && a.imbalances == b.imbalances &&
         a.counters == b.counters && a.min_physical_objective == b.min_physical_objective &&
         a.negative_physical_solves == b.negative_physical_solves &&
         a.restoration_solves == b.restoration_solves;
}

struct Backtest::Impl {
  struct ProductState {
    explicit ProductState(ProductId id) : book(id) {}
    OrderBook book;
    Lots position = 0;
    TimeMs open_at = 0;
    TopOfBook last_top;
  };

  struct Pending {
    TimeMs at = 0;
    TargetPositions plan;
  };

  Impl(const BacktestConfig& c, Solver& s, const SolveObserver& o)
      : config(c), solver(s), observer(o), lot(c.solver.market.lot_mwh),
        frozen_soc(c.solver.battery.s0) {}

  const BacktestConfig& config;
  Solver& solver;
  const SolveObserver& observer;
  const double lot;

  std::map<ProductId, ProductState> open;
  double frozen_soc;
  std::optional<Pending> pending;
  TimeMs busy_until = std::numeric_limits<TimeMs>::min();
  bool deferred = false;

  // Integer accumulators keep the accounting exact: cents x lots and lots.
  std::int64_t gross_cents_lots = 0;
  Lots traded_lots = 0;
  Lots settled_lots = 0;
  ProductId first_product = kNever;
  ProductId last_product = std::numeric_limits<ProductId>::min();
  TimeMs next_day = kNever;

  BacktestResult result;

  [[nodiscard]] double reward_now() const {
    const double gross = static_cast<double>(gross_cents_lots) / 100.0 * lot;
    const double fees = config.solver.cost.nu_trade * static_cast<double>(traded_lots) * lot;
    const double deg = config.solver.cost.nu_deg * static_cast<double>(settled_lots) * lot;
    return gross - fees - deg;
  }

  void sample(TimeMs t) { result.reward_series.push_back({t, reward_now()}); }

  void mark_days(TimeMs t) {
    if (next_day == kNever) {
      next_day = ceil_to(t + 1, kDayMs);
      return;
    }
    while (t >= next_day) {
      sample(next_day);
      next_day += kDayMs;
    }
  }

  [[nodiscard]] bool tradable(TimeMs t, ProductId p) const {
    std::size_t rank = 0;
    for (const auto& [id, st] : open) {
      if (st.open_at > t) continue;
      if (id == p) return true;
      if (++rank >= config.max_active_products) return false;
    }
    return false;
  }

  void settle(std::map<ProductId, ProductState>::iterator it, TimeMs t) {
    const ProductId p = it->first;
    const Lots pos = it->second.position;
    const BatteryParams& battery = config.solver.battery;
    settled_lots += std::abs(pos);
    const double before = frozen_soc;
    const double after = transition(before, static_cast<double>(pos) * lot, battery);
    if (!soc_in_bounds(after, battery)) {
      const double violation = after < 0.0 ? -after : after - battery.s_max;
      result.imbalances.push_back({p, pos, before, after, violation});
    }
    if (pos < 0) result.withdrawn_mwh += static_cast<double>(-pos) * lot / battery.eta_out;
    frozen_soc = clamp_soc(after, battery);
    result.schedule.push_back({p, pos, frozen_soc});
    first_product = std::min(first_product, p);
    last_product = std::max(last_product, p);
    open.erase(it);
    sample(t);
  }

  void solve(TimeMs t) {
    const BatteryParams& battery = config.solver.battery;
    const MarketParams& market = config.solver.market;
    Snapshot snap;
    snap.time = t;
    snap.soc = frozen_soc;
    snap.phi = config.phi.at(t);
    for (auto& [id, st] : open) {
      if (st.open_at > t) continue;
      if (snap.products.size() >= config.max_active_products) break;
      ProductSnapshot ps;
      ps.product = id;
      ps.position = st.position;
      const ActionRange power = power_actions(st.position, battery, market);
      st.book.levels(Side::Ask, t, std::max<Lots>(0, power.hi), ps.asks);
      st.book.levels(Side::Bid, t, std::max<Lots>(0, -power.lo), ps.bids);
      ps.spread = st.book.best_quotes(t).spread;
      snap.products.push_back(std::move(ps));
    }
    if (snap.products.empty()) return;

    ++result.counters.solves;
    const auto t0 = std::chrono::steady_clock::now();
    TargetPositions plan = solver.solve(snap);
    const auto elapsed = std::chrono::steady_clock::now() - t0;
    TimeMs solve_ms = config.solve_time.fixed_ms;
    if (config.solve_time.measured) {
      const double ms = std::chrono::duration<double, std::milli>(elapsed).count();
      solve_ms = static_cast<TimeMs>(std::ceil(ms));
    }
    const TimeMs delay = solve_ms + config.technical_delay_ms;

    if (plan.physical_start) {
      result.min_physical_objective = std::min(result.min_physical_objective, plan.objective);
      if (plan.objective < -kObjectiveTolerance) ++result.negative_physical_solves;
    } else {
      ++result.restoration_solves;
    }
    if (config.record_solves) {
      result.solves_log.push_back({t, snap.products.size(), plan.objective, plan.physical_start,
                                   plan.physical_plan, plan.null_fallback, plan.order_count(), delay});
    }
    if (observer) observer(snap, plan);

    busy_until = t + delay;
    pending = Pending{t + delay, std::move(plan)};
  }

  void submit(TimeMs t, const TargetPositions& plan) {
    bool traded = false;
    for (const StageDecision& d : plan.stages) {
      if (d.delta == 0) continue;
      ++result.counters.orders_submitted;
      const auto it = open.find(d.product);
      if (it == open.end()) {
        ++result.counters.orders_rejected;
        continue;
      }
      const Direction dir = d.delta > 0 ? Direction::Buy : Direction::Sell;
      const std::optional<MatchReport> report =
          it->second.book.match_all_or_none(dir, std::abs(d.delta), d.limit_price, t);
      if (!report) {
        ++result.counters.orders_rejected;
        continue;
      }
      ++result.counters.orders_accepted;
      it->second.position += d.delta;
      for (const Fill& f : report->fills) {
        const double fee = config.solver.cost.nu_trade * static_cast<double>(f.qty) * lot;
        result.trades.push_back({t, d.product, dir, f.price, f.qty, fee});
        gross_cents_lots += (dir == Direction::Sell ? 1 : -1) * f.price * f.qty;
        traded_lots += f.qty;
      }
      it->second.last_top = it->second.book.top(t);
      traded = true;
    }
    if (traded) sample(t);
  }

  void on_message(const BookMessage& msg, TimeMs t) {
    const ProductId p = msg.order.product;
    if (t >= p - config.gate_closure_lead_ms) {
      ++result.counters.messages_ignored;
      return;
    }
    auto [it, inserted] = open.try_emplace(p, p);
    ProductState& st = it->second;
    if (inserted) st.open_at = config.open_lead_ms ? p - *config.open_lead_ms : t;

    const ApplyResult applied = st.book.apply(msg, t);
    if (!applied.ok()) {
      ++result.counters.messages_rejected;
      return;
    }
    ++result.counters.messages_applied;
    if (config.trigger.mode != SolveMode::RelevantUpdate) return;

    TopOfBook top = st.book.top(t);
    if (top == st.last_top) return;
    st.last_top = std::move(top);
    if (!tradable(t, p)) return;
    ++result.counters.relevant_updates;
    if (t < config.start) return;
    if (t < busy_until) {
      deferred = true;
    } else {
      solve(t);
    }
  }

  void run(std::span<const BookMessage> stream) {
    const bool interval = config.trigger.mode == SolveMode::FixedInterval;
    TimeMs next_tick = kNever;
    if (interval && !stream.empty()) {
      next_tick = ceil_to(std::max(config.start, stream.front().timestamp), config.trigger.interval_ms);
    }

    std::size_t i = 0;
    TimeMs last_ts = std::numeric_limits<TimeMs>::min();
    while (true) {
      const TimeMs t_close =
          open.empty() ? kNever : open.begin()->first - config.gate_closure_lead_ms;
      const TimeMs t_pending = pending ? pending->at : kNever;
      const TimeMs t_tick = (open.empty() && i == stream.size()) ? kNever : next_tick;
      const TimeMs t_msg = i < stream.size() ? stream[i].timestamp : kNever;
      const TimeMs t = std::min({t_close, t_pending, t_tick, t_msg});
      if (t == kNever || t >= config.end) break;
      mark_days(t);

      if (t == t_close) {
        settle(open.begin(), t);
      } else if (t == t_pending) {
        const Pending due = std::move(*pending);
        pending.reset();
        submit(t, due.plan);
        if (deferred) {
          deferred = false;
          ++result.counters.deferred_solves;
          solve(t);
        }
      } else if (t == t_tick) {
        next_tick += config.trigger.interval_ms;
        ++result.counters.interval_triggers;
        if (t >= config.start) {
          if (t < busy_until) {
            deferred = true;
          } else {
            solve(t);
          }
        }
      } else {
        const BookMessage& msg = stream[i];
        if (msg.timestamp < last_ts) {
          throw BacktestError(fmt::format("stream out of order at message {}: {} after {}", i,
                                          msg.timestamp, last_ts));
        }
        last_ts = msg.timestamp;
        ++i;
        on_message(msg, t);
      }
    }

    result.counters.messages_ignored += stream.size() - i;
    const TimeMs t_end = config.end;
    while (!open.empty()) settle(open.begin(), t_end);

    const BatteryParams& battery = config.solver.battery;
    result.gross_cash = static_cast<double>(gross_cents_lots) / 100.0 * lot;
    result.fees = config.solver.cost.nu_trade * static_cast<double>(traded_lots) * lot;
    result.degradation = config.solver.cost.nu_deg * static_cast<double>(settled_lots) * lot;
    result.reward = reward_now();
    result.traded_mwh = static_cast<double>(traded_lots) * lot;
    result.settled_mwh = static_cast<double>(settled_lots) * lot;
    if (!result.schedule.empty()) {
      result.days = std::max(
          1.0, static_cast<double>(last_product - first_product + kHourMs) / static_cast<double>(kDayMs));
      result.cycles_per_day = cycles_per_day(result.withdrawn_mwh, result.days, battery);
    }
  }
};

Backtest::Backtest(BacktestConfig config, Solver* solver)
    : config_(std::move(config)), solver_(solver) {
  config_.validate();
  if (solver_ == nullptr) {
    owned_ = std::make_unique<IntrinsicDp>(config_.solver);
    solver_ = owned_.get();
  }
}

Backtest::~Backtest() = default;

BacktestResult Backtest::run(std::span<const BookMessage> stream) {
  const auto t0 = std::chrono::steady_clock::now();
  Impl impl(config_, *solver_, observer_);
  impl.run(stream);
  impl.result.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return std::move(impl.result);
}

BacktestResult run_backtest(const BacktestConfig& config, std::span<const BookMessage> stream) {
  Backtest bt(config);
  return bt.run(stream);
}

BacktestResult run_backtest(const BacktestConfig& config, std::span<const BookMessage> stream,
                            Solver& solver) {
  Backtest bt(config, &solver);
  return bt.run(stream);
}

}  // namespace ritrade
