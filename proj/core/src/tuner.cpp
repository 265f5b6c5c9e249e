#include "ritrade/tuner.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

namespace ritrade {

namespace {

class CachedObjective {
 public:
  explicit CachedObjective(const RewardFn& f) : f_(f) {}

  double operator()(double phi) {
    const auto it = seen_.find(phi);
    if (it != seen_.end()) return it->second;
    const double v = f_(phi);
    seen_.emplace(phi, v);
    return v;
  }

  [[nodiscard]] int evaluations() const noexcept { return static_cast<int>(seen_.size()); }

  // Highest reward; ties go to the smaller phi.
  [[nodiscard]] std::pair<double, double> best() const {
    std::pair<double, double> best = *seen_.begin();
    for (const auto& [phi, value] : seen_) {
      if (value > best.second) best = {phi, value};
    }
    return best;
  }

 private:
  const RewardFn& f_;
  std::map<double, double> seen_;
};

}  // namespace

PhiSearchResult maximize_phi(const RewardFn& f, double lo, double hi, double tol, int max_evals,
                             int scan_points) {
  if (!(lo <= hi)) throw std::invalid_argument("tuner: empty search interval");
  if (!(tol > 0.0)) throw std::invalid_argument("tuner: tolerance must be positive");
  if (max_evals < 1) throw std::invalid_argument("tuner: at least one evaluation is required");
  scan_points = std::max(scan_points, 2);

  CachedObjective g(f);
  PhiSearchResult out;
  if (lo == hi) {
    out.phi = lo;
    out.reward = g(lo);
    out.evaluations = 1;
    return out;
  }

  const int n = std::min(scan_points, max_evals);
  std::vector<double> xs(static_cast<std::size_t>(n));
  std::vector<double> ys(xs.size());
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    xs[k] = i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1);
    ys[k] = g(xs[k]);
  }
  const auto [mn, mx] = std::minmax_element(ys.begin(), ys.end());
  if (*mx - *mn <= 1e-12 * (1.0 + std::abs(*mx))) {
    out.flat = true;
    out.phi = lo;
    out.reward = ys.front();
    out.evaluations = g.evaluations();
    return out;
  }

  const auto j = static_cast<std::size_t>(mx - ys.begin());
  const double a = xs[j > 0 ? j - 1 : 0];
  const double b = xs[std::min(j + 1, xs.size() - 1)];
  const int remaining = max_evals - g.evaluations();
  double brent_value = -std::numeric_limits<double>::infinity();
  if (remaining > 1) {
    const double rel = std::max(tol / (4.0 * (hi - lo)), 1e-12);
    const int bits = std::clamp(static_cast<int>(std::floor(1.0 - std::log2(rel))), 2, 52);
    const auto cap = static_cast<std::uintmax_t>(remaining - 1);
    std::uintmax_t iters = cap;
    // Brent runs on [0, 1] so the relative tolerance acts on the bracket scale.
    const auto neg = [&](double x) { return -g(a + (b - a) * x); };
    const auto r = boost::math::tools::brent_find_minima(neg, 0.0, 1.0, bits, iters);
    brent_value = -r.second;
    out.budget_exhausted = iters >= cap;
  } else {
    out.budget_exhausted = true;
  }

  const auto [phi, reward] = g.best();
  out.phi = phi;
  out.reward = reward;
  out.evaluations = g.evaluations();
  out.scan_disagreement = remaining > 1 && reward > brent_value + 1e-9;
  return out;
}

void TuneConfig::validate() const {
  base.validate();
  if (!(phi_lo >= 0.0 && phi_lo <= phi_hi)) throw std::invalid_argument("tune: need 0 <= phi_lo <= phi_hi");
  if (!(tol > 0.0)) throw std::invalid_argument("tune: tolerance must be positive");
  if (max_evals < 1) throw std::invalid_argument("tune: max_evals must be >= 1");
  if (!window.calendar_months && window.length_ms <= 0) {
    throw std::invalid_argument("tune: window length must be positive");
  }
}

std::vector<Window> split_windows(std::span<const BookMessage> stream, const WindowSpec& spec) {
  std::vector<Window> windows;
  if (stream.empty()) return windows;
  ProductId first = kNever;
  ProductId last = std::numeric_limits<ProductId>::min();
  for (const BookMessage& m : stream) {
    first = std::min(first, m.order.product);
    last = std::max(last, m.order.product);
  }

  TimeMs begin = spec.calendar_months ? month_start(first) : first - ((first % kDayMs) + kDayMs) % kDayMs;
  while (begin <= last) {
    const TimeMs end = spec.calendar_months ? next_month_start(begin) : begin + spec.length_ms;
    windows.push_back({begin, end, {}});
    begin = end;
  }
  for (const BookMessage& m : stream) {
    const ProductId p = m.order.product;
    const auto it = std::upper_bound(windows.begin(), windows.end(), p,
                                     [](ProductId v, const Window& w) { return v < w.begin; });
    std::prev(it)->messages.push_back(m);
  }
  return windows;
}

namespace {

double window_reward(std::span<const BookMessage> messages, const BacktestConfig& base, double phi) {
  BacktestConfig c = base;
  c.phi = PhiSchedule::constant(phi);
  return run_backtest(c, messages).reward;
}

}  // namespace

PhiSearchResult train_phi(std::span<const BookMessage> window, const TuneConfig& cfg) {
  if (window.empty()) throw std::invalid_argument("tune: training window has no messages");
  const RewardFn f = [&](double phi) { return window_reward(window, cfg.base, phi); };
  return maximize_phi(f, cfg.phi_lo, cfg.phi_hi, cfg.tol, cfg.max_evals, cfg.scan_points);
}

TuneResult sliding_schedule(std::span<const BookMessage> stream, const TuneConfig& cfg) {
  cfg.validate();
  const std::vector<Window> windows = split_windows(stream, cfg.window);
  TuneResult result;
  if (windows.size() < 2) return result;
  result.windows.resize(windows.size() - 1);

  const auto evaluate = [&](std::size_t w) {
    WindowReport& r = result.windows[w - 1];
    r.index = w;
    r.begin = windows[w].begin;
    r.end = windows[w].end;
    const Window& train = windows[w - 1];
    const Window& test = windows[w];
    if (train.messages.empty()) {
      r.search.phi = cfg.phi_lo;
      r.search.flat = true;
    } else {
      r.search = train_phi(train.messages, cfg);
      r.in_sample = r.search.reward;
    }
    r.out_of_sample = window_reward(test.messages, cfg.base, r.search.phi);
    r.baseline = window_reward(test.messages, cfg.base, 0.0);
  };

  const std::size_t workers = std::max<std::size_t>(1, cfg.workers);
  if (workers == 1) {
    for (std::size_t w = 1; w < windows.size(); ++w) evaluate(w);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < workers; ++k) {
      pool.emplace_back([&, k] {
        for (std::size_t w = 1 + k; w < windows.size(); w += workers) evaluate(w);
      });
    }
  }

  for (const WindowReport& r : result.windows) {
    result.stitched_reward += r.out_of_sample;
    result.baseline_reward += r.baseline;
  }
  return result;
}

}  // namespace ritrade
