#include "ritrade/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace ritrade {

namespace {

struct Tagged {
  BookMessage msg;
  std::uint64_t seq = 0;
};

class Emitter {
 public:
  explicit Emitter(const MarketParams& market) : market_(market) {}

  OrderId add(TimeMs t, ProductId p, Side side, double price_eur, Lots qty) {
    BookMessage m;
    m.kind = MessageKind::Add;
    m.timestamp = t;
    m.order.id = next_id_++;
    m.order.product = p;
    m.order.side = side;
    m.order.price = to_tick(price_eur);
    m.order.qty = std::max<Lots>(1, qty);
    m.order.entry_time = t;
    push(m);
    return m.order.id;
  }

  void cancel(TimeMs t, ProductId p, Side side, OrderId id) {
    BookMessage m;
    m.kind = MessageKind::Cancel;
    m.timestamp = t;
    m.order.id = id;
    m.order.product = p;
    m.order.side = side;
    m.order.entry_time = t;
    push(m);
  }

  std::vector<BookMessage> finish() {
    std::stable_sort(out_.begin(), out_.end(), [](const Tagged& a, const Tagged& b) {
      return a.msg.timestamp != b.msg.timestamp ? a.msg.timestamp < b.msg.timestamp : a.seq < b.seq;
    });
    std::vector<BookMessage> msgs;
    msgs.reserve(out_.size());
    for (Tagged& t : out_) msgs.push_back(t.msg);
    return msgs;
  }

  [[nodiscard]] Lots lots_of(double mwh) const {
    return static_cast<Lots>(std::llround(mwh / market_.lot_mwh));
  }

 private:
  Cents to_tick(double eur) const {
    const auto cents = static_cast<Cents>(std::llround(eur * 100.0));
    const Cents tick = market_.tick;
    const Cents q = cents / tick;
    return (cents - q * tick) * 2 >= tick ? (q + 1) * tick : q * tick;
  }

  void push(const BookMessage& m) { out_.push_back({m, seq_++}); }

  const MarketParams& market_;
  std::vector<Tagged> out_;
  std::uint64_t seq_ = 0;
  OrderId next_id_ = 1;
};

}  // namespace

void SyntheticFlowSpec::validate() const {
  if (days < 0) throw std::invalid_argument("synthetic: days must be >= 0");
  if (gate_closure_lead_ms <= 0 || open_lead_ms <= gate_closure_lead_ms) {
    throw std::invalid_argument("synthetic: need 0 < gate closure lead < open lead");
  }
  if (orders_per_product < 0.0 || arrival_scale_ms <= 0.0 || mean_qty_mwh <= 0.0) {
    throw std::invalid_argument("synthetic: order-flow rates must be positive");
  }
  for (double p : {aggressive_share, cancel_share, negative_probability, transient_probability}) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("synthetic: probabilities must lie in [0, 1]");
  }
  if (transient_life_ms <= 0) throw std::invalid_argument("synthetic: transient life must be positive");
}

std::vector<BookMessage> generate_synthetic(const SyntheticFlowSpec& spec, const MarketParams& market) {
  spec.validate();
  market.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::exponential_distribution<double> unit_exp(1.0);
  const auto coin = [&](double p) { return uniform(rng) < p; };

  Emitter emit(market);
  const TimeMs window = spec.open_lead_ms - spec.gate_closure_lead_ms;
  const double w = static_cast<double>(window);
  const double tail = 1.0 - std::exp(-w / spec.arrival_scale_ms);

  double ar = 0.0;
  const int hours = spec.days * 24;
  for (int h = 0; h < hours && spec.background; ++h) {
    const ProductId p = spec.start + h * kHourMs;
    const TimeMs close = p - spec.gate_closure_lead_ms;
    const int hour_of_day = static_cast<int>(((p / kHourMs) % 24 + 24) % 24);
    ar = spec.ar_coefficient * ar + spec.ar_noise * normal(rng);
    double mid0 = spec.base_price -
                  spec.daily_amplitude * std::cos(2.0 * std::numbers::pi * hour_of_day / 24.0) + ar;
    if (coin(spec.negative_probability)) mid0 = spec.negative_level + 10.0 * normal(rng);

    std::poisson_distribution<int> count(spec.orders_per_product);
    std::vector<TimeMs> times(static_cast<std::size_t>(count(rng)));
    for (TimeMs& t : times) {
      // Time before gate closure from an exponential truncated to the trading window.
      const double x = -spec.arrival_scale_ms * std::log(1.0 - uniform(rng) * tail);
      t = std::min(close - 1, close - static_cast<TimeMs>(std::ceil(x)));
    }
    std::sort(times.begin(), times.end());

    double mid = mid0;
    for (const TimeMs t : times) {
      mid += spec.drift_per_order * normal(rng);
      const double progress = std::clamp(static_cast<double>(close - t) / w, 0.0, 1.0);
      const double half = spec.spread_near + (spec.spread_far - spec.spread_near) * progress;
      const Side side = coin(0.5) ? Side::Ask : Side::Bid;
      const double sign = side == Side::Ask ? 1.0 : -1.0;
      const double offset = coin(spec.aggressive_share) ? -half : half + spec.depth_offset * unit_exp(rng);
      const Lots qty = emit.lots_of(spec.mean_qty_mwh * unit_exp(rng));
      const OrderId id = emit.add(t, p, side, mid + sign * offset, qty);
      if (coin(spec.cancel_share)) {
        const TimeMs tc = t + 1 + static_cast<TimeMs>(spec.mean_cancel_after_ms * unit_exp(rng));
        if (tc < close) emit.cancel(tc, p, side, id);
      }
    }

    if (coin(spec.transient_probability)) {
      const TimeMs span = window - spec.transient_life_ms;
      const TimeMs t = p - spec.open_lead_ms + static_cast<TimeMs>(uniform(rng) * static_cast<double>(span));
      const Side side = coin(0.5) ? Side::Ask : Side::Bid;
      const double sign = side == Side::Ask ? -1.0 : 1.0;
      const double price = mid0 + sign * spec.transient_discount * (0.5 + uniform(rng));
      const OrderId id = emit.add(t, p, side, price, emit.lots_of(spec.transient_qty_mwh));
      emit.cancel(t + spec.transient_life_ms, p, side, id);
    }
  }

  for (const PlantedPair& pair : spec.planted) {
    emit.add(pair.at, pair.buy_product, Side::Ask, cents_to_eur(pair.ask_price), pair.qty);
    emit.add(pair.at, pair.sell_product, Side::Bid, cents_to_eur(pair.bid_price), pair.qty);
  }
  return emit.finish();
}

}  // namespace ritrade
