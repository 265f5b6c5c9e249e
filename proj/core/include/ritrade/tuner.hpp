#pragma once

#include "ritrade/engine.hpp"

#include <functional>
#include <span>
#include <vector>

namespace ritrade {

using RewardFn = std::function<double(double phi)>;

struct PhiSearchResult {
  double phi = 0.0;
  double reward = 0.0;
  int evaluations = 0;
  bool budget_exhausted = false;  // Brent stopped on the evaluation cap
  bool flat = false;              // every scan point returned the same reward
  bool scan_disagreement = false; // a scan point beat the Brent refinement
};

/// Maximizes `f` over [lo, hi]: an evenly spaced scan of `scan_points` values picks the
/// bracket around the best point, then Brent's method refines inside it. Returns the best
/// value seen. Evaluations are cached, so repeated points are free.
[[nodiscard]] PhiSearchResult maximize_phi(const RewardFn& f, double lo, double hi,
                                           double tol = 0.05, int max_evals = 30,
                                           int scan_points = 5);

struct WindowSpec {
  bool calendar_months = true;
  TimeMs length_ms = 30 * kDayMs;  // used when calendar_months is false
};

struct TuneConfig {
  WindowSpec window;
  double phi_lo = 0.0;
  double phi_hi = 10.0;
  double tol = 0.05;
  int max_evals = 30;
  int scan_points = 5;
  unsigned workers = 1;
  BacktestConfig base;

  void validate() const;
};

/// Products delivered in [begin, end) and every message about them.
struct Window {
  TimeMs begin = 0;
  TimeMs end = 0;
  std::vector<BookMessage> messages;
};

/// Consecutive windows from the first to the last delivered product. Messages keep their
/// original order and timestamps.
[[nodiscard]] std::vector<Window> split_windows(std::span<const BookMessage> stream,
                                                const WindowSpec& spec);

/// Best phi for one window by maximizing its backtest reward.
[[nodiscard]] PhiSearchResult train_phi(std::span<const BookMessage> window, const TuneConfig& cfg);

struct WindowReport {
  std::size_t index = 0;  // the evaluated window; phi comes from index - 1
  TimeMs begin = 0;
  TimeMs end = 0;
  PhiSearchResult search;
  double in_sample = 0.0;
  double out_of_sample = 0.0;
  double baseline = 0.0;  // same window at phi = 0

  friend bool operator==(const WindowReport& a, const WindowReport& b) {
    return a.index == b.index && a.begin == b.begin && a.end == b.end &&
           a.search.phi == b.search.phi && a.search.evaluations == b.search.evaluations &&
           a.in_sample == b.in_sample && a.out_of_sample == b.out_of_sample &&
           a.baseline == b.baseline;
  }
};

struct TuneResult {
  std::vector<WindowReport> windows;
  double stitched_reward = 0.0;
  double baseline_reward = 0.0;
};

/// Trains phi on each window and applies it to the next one.
[[nodiscard]] TuneResult sliding_schedule(std::span<const BookMessage> stream, const TuneConfig& cfg);

}  // namespace ritrade
