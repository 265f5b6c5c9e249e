#pragma once

#include "ritrade/lob.hpp"
#include "ritrade/problem.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ritrade {

class BacktestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SolveMode : std::uint8_t { RelevantUpdate, FixedInterval };

struct SolveTrigger {
  SolveMode mode = SolveMode::RelevantUpdate;
  TimeMs interval_ms = kHourMs;  // FixedInterval only; boundaries are multiples since the epoch

  static SolveTrigger every_update() { return {}; }
  static SolveTrigger every(TimeMs interval) { return {SolveMode::FixedInterval, interval}; }
};

struct SolveTime {
  bool measured = false;  // wall clock of the solver call rounded up to whole ms
  TimeMs fixed_ms = 0;
};

/// Piecewise-constant phi: `base` until the first step, then the value of the latest step
/// whose start is at or before t.
struct PhiSchedule {
  double base = 0.0;
  std::vector<std::pair<TimeMs, double>> steps;  // sorted by start

  [[nodiscard]] double at(TimeMs t) const noexcept;
  static PhiSchedule constant(double phi) { return {phi, {}}; }
};

struct BacktestConfig {
  TimeMs start = std::numeric_limits<TimeMs>::min();  // solves start at or after this
  TimeMs end = kNever;                                 // messages at or after this are ignored
  SolveTrigger trigger;
  TimeMs technical_delay_ms = 200;
  SolveTime solve_time;
  TimeMs gate_closure_lead_ms = 30 * kMinuteMs;
  std::optional<TimeMs> open_lead_ms;  // tradable from delivery - lead; default: first message
  std::size_t max_active_products = 32;
  SolverParams solver;
  PhiSchedule phi;
  bool record_solves = false;

  void validate() const;
};

struct TradeRecord {
  TimeMs time = 0;
  ProductId product = 0;
  Direction side = Direction::Buy;
  Cents price = 0;
  Lots qty = 0;
  double fee = 0.0;

  friend bool operator==(const TradeRecord&, const TradeRecord&) = default;
};

struct ScheduleEntry {
  ProductId product = 0;
  Lots position = 0;
  double soc_end = 0.0;

  friend bool operator==(const ScheduleEntry&, const ScheduleEntry&) = default;
};

struct RewardPoint {
  TimeMs time = 0;
  double reward = 0.0;

  friend bool operator==(const RewardPoint&, const RewardPoint&) = default;
};

struct SolveRecord {
  TimeMs time = 0;
  std::size_t products = 0;
  double objective = 0.0;
  bool physical_start = true;
  bool physical_plan = true;
  bool null_fallback = false;
  std::size_t orders = 0;
  TimeMs delay_ms = 0;

  friend bool operator==(const SolveRecord&, const SolveRecord&) = default;
};

/// Position that could not be delivered within the storage bounds at gate closure.
struct ImbalanceRecord {
  ProductId product = 0;
  Lots position = 0;
  double soc_before = 0.0;
  double soc_after = 0.0;  // unclamped
  double violation_mwh = 0.0;

  friend bool operator==(const ImbalanceRecord&, const ImbalanceRecord&) = default;
};

struct BacktestCounters {
  std::uint64_t messages_applied = 0;
  std::uint64_t messages_rejected = 0;
  std::uint64_t messages_ignored = 0;  // product already closed or message past the end
  std::uint64_t relevant_updates = 0;
  std::uint64_t interval_triggers = 0;
  std::uint64_t deferred_solves = 0;
  std::uint64_t solves = 0;
  std::uint64_t orders_submitted = 0;
  std::uint64_t orders_accepted = 0;
  std::uint64_t orders_rejected = 0;

  friend bool operator==(const BacktestCounters&, const BacktestCounters&) = default;
};

struct BacktestResult {
  double reward = 0.0;       // gross_cash - fees - degradation
  double gross_cash = 0.0;   // sells minus buys at fill prices
  double fees = 0.0;         // nu_trade on traded volume
  double degradation = 0.0;  // nu_deg on settled volume
  double traded_mwh = 0.0;
  double settled_mwh = 0.0;
  double withdrawn_mwh = 0.0;
  double days = 0.0;
  double cycles_per_day = 0.0;

  std::vector<TradeRecord> trades;
  std::vector<ScheduleEntry> schedule;
  std::vector<RewardPoint> reward_series;
  std::vector<SolveRecord> solves_log;  // filled when config.record_solves
  std::vector<ImbalanceRecord> imbalances;
  BacktestCounters counters;

  // Solves that started from a physical position: the smallest objective and how many
  // came out negative. Restoration solves (non-physical start) are counted separately.
  double min_physical_objective = 0.0;
  std::uint64_t negative_physical_solves = 0;
  std::uint64_t restoration_solves = 0;

  double runtime_s = 0.0;  // wall clock, excluded from comparisons
};

/// Deterministic fields only (everything except runtime).
[[nodiscard]] bool same_outcome(const BacktestResult& a, const BacktestResult& b);

/// Rolling-intrinsic replay of a message stream.
///
/// At each trigger the solver sees the current books of the tradable products; the resulting
/// deltas reach the exchange as all-or-none orders after the solve time plus the technical
/// delay, against whatever the books look like by then. No solve starts while another is in
/// flight; triggers during the wait collapse into one solve when it ends.
class Backtest {
 public:
  using SolveObserver = std::function<void(const Snapshot&, const TargetPositions&)>;

  /// Uses the solver given, or an IntrinsicDp built from config.solver when null.
  explicit Backtest(BacktestConfig config, Solver* solver = nullptr);
  ~Backtest();
  Backtest(const Backtest&) = delete;
  Backtest& operator=(const Backtest&) = delete;

  void set_observer(SolveObserver observer) { observer_ = std::move(observer); }

  /// Throws BacktestError when the stream is not ordered by timestamp.
  BacktestResult run(std::span<const BookMessage> stream);

 private:
  struct Impl;

  BacktestConfig config_;
  Solver* solver_;
  std::unique_ptr<Solver> owned_;
  SolveObserver observer_;
};

[[nodiscard]] BacktestResult run_backtest(const BacktestConfig& config,
                                          std::span<const BookMessage> stream);
[[nodiscard]] BacktestResult run_backtest(const BacktestConfig& config,
                                          std::span<const BookMessage> stream, Solver& solver);

}  // namespace ritrade
