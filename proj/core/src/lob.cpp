#include "ritrade/lob.hpp"

#include <algorithm>

namespace ritrade {

std::string_view to_string(MessageKind k) noexcept {
  switch (k) {
    case MessageKind::Add: return "add";
    case MessageKind::Modify: return "modify";
    case MessageKind::Cancel: return "cancel";
  }
  return "?";
}

std::string_view to_string(ApplyStatus s) noexcept {
  switch (s) {
    case ApplyStatus::Applied: return "applied";
    case ApplyStatus::UnknownOrder: return "unknown_order";
    case ApplyStatus::DuplicateOrder: return "duplicate_order";
    case ApplyStatus::StaleTimestamp: return "stale_timestamp";
    case ApplyStatus::InvalidOrder: return "invalid_order";
    case ApplyStatus::WrongProduct: return "wrong_product";
  }
  return "?";
}

Lots MatchReport::filled() const noexcept {
  Lots total = 0;
  for (const auto& f : fills) total += f.qty;
  return total;
}

double MatchReport::notional_eur(double lot_mwh) const noexcept {
  double total = 0.0;
  for (const auto& f : fills) total += cents_to_eur(f.price) * static_cast<double>(f.qty) * lot_mwh;
  return total;
}

ApplyResult OrderBook::apply(const BookMessage& msg, TimeMs clock) {
  ApplyResult result;
  if (clock < clock_) {
    result.status = ApplyStatus::StaleTimestamp;
    return result;
  }
  if (msg.order.product != product_) {
    result.status = ApplyStatus::WrongProduct;
    return result;
  }

  const auto existing = index_.find(msg.order.id);
  switch (msg.kind) {
    case MessageKind::Cancel:
      if (existing == index_.end()) {
        result.status = ApplyStatus::UnknownOrder;
        return result;
      }
      clock_ = clock;
      remove(msg.order.id);
      return result;

    case MessageKind::Add:
      if (existing != index_.end()) {
        result.status = ApplyStatus::DuplicateOrder;
        return result;
      }
      break;

    case MessageKind::Modify:
      if (existing == index_.end()) {
        result.status = ApplyStatus::UnknownOrder;
        return result;
      }
      break;
  }

  LimitOrder incoming = msg.order;
  incoming.entry_time = msg.timestamp;
  if (incoming.qty <= 0 || incoming.valid_until <= incoming.entry_time ||
      !incoming.visible_at(clock)) {
    result.status = ApplyStatus::InvalidOrder;
    return result;
  }

  clock_ = clock;
  // Modify loses queue priority: cancel, then re-enter with the message timestamp.
  if (msg.kind == MessageKind::Modify) remove(msg.order.id);

  cross(incoming, clock, result.report);
  if (incoming.qty > 0) rest(incoming);
  return result;
}

std::optional<MatchReport> OrderBook::match_all_or_none(Direction dir, Lots qty, Cents limit,
                                                         TimeMs clock) {
  if (qty <= 0 || clock < clock_) return std::nullopt;

  const Side resting_side = dir == Direction::Buy ? Side::Ask : Side::Bid;
  const Stack& book_side = stack(resting_side);
  const auto within_limit = [&](Cents price) {
    return dir == Direction::Buy ? price <= limit : price >= limit;
  };

  // Dry run without mutation so a rejection leaves the book untouched.
  Lots available = 0;
  for (const auto& [key, order] : book_side) {
    if (!order.visible_at(clock)) continue;
    if (!within_limit(order.price)) break;
    available += order.qty;
    if (available >= qty) break;
  }
  if (available < qty) return std::nullopt;

  clock_ = clock;
  LimitOrder incoming;
  incoming.id = -1;
  incoming.product = product_;
  incoming.side = dir == Direction::Buy ? Side::Bid : Side::Ask;
  incoming.price = limit;
  incoming.qty = qty;
  incoming.entry_time = clock;
  MatchReport report;
  cross(incoming, clock, report);
  return report;
}

void OrderBook::cross(LimitOrder& incoming, TimeMs clock, MatchReport& out) {
  Stack& opposite_stack = stack(opposite(incoming.side));
  const auto crosses = [&](Cents resting_price) {
    return incoming.side == Side::Bid ? resting_price <= incoming.price
                                      : resting_price >= incoming.price;
  };

  auto it = opposite_stack.begin();
  while (incoming.qty > 0 && it != opposite_stack.end()) {
    LimitOrder& resting = it->second;
    if (!resting.visible_at(clock)) {
      index_.erase(resting.id);
      it = opposite_stack.erase(it);
      continue;
    }
    if (!crosses(resting.price)) break;

    const Lots q = std::min(incoming.qty, resting.qty);
    out.fills.push_back({resting.id, q, resting.price});
    incoming.qty -= q;
    resting.qty -= q;
    if (resting.qty == 0) {
      index_.erase(resting.id);
      it = opposite_stack.erase(it);
    }
  }
}

void OrderBook::rest(const LimitOrder& o) {
  const Key k = key_of(o);
  stack(o.side).emplace(k, o);
  index_[o.id] = {o.side, k};
}

void OrderBook::remove(OrderId id) {
  const auto it = index_.find(id);
  if (it == index_.end()) return;
  stack(it->second.first).erase(it->second.second);
  index_.erase(it);
}

Quotes OrderBook::best_quotes(TimeMs clock) const {
  const TopOfBook t = top(clock);
  Quotes q;
  if (t.bid) q.best_bid = t.bid->price;
  if (t.ask) q.best_ask = t.ask->price;
  if (q.best_bid && q.best_ask) q.spread = *q.best_ask - *q.best_bid;
  return q;
}

TopOfBook OrderBook::top(TimeMs clock) const {
  const auto head_level = [clock](const Stack& s) -> std::optional<Level> {
    std::optional<Level> level;
    for (const auto& [key, order] : s) {
      if (!order.visible_at(clock)) continue;
      if (!level) {
        level = Level{order.price, order.qty};
      } else if (order.price == level->price) {
        level->qty += order.qty;
      } else {
        break;
      }
    }
    return level;
  };
  return {head_level(bids_), head_level(asks_)};
}

std::vector<LimitOrder> OrderBook::orders(Side side, TimeMs clock) const {
  std::vector<LimitOrder> out;
  for (const auto& [key, order] : stack(side)) {
    if (order.visible_at(clock)) out.push_back(order);
  }
  return out;
}

void OrderBook::levels(Side side, TimeMs clock, Lots max_lots, std::vector<Level>& out) const {
  out.clear();
  Lots covered = 0;
  for (const auto& [key, order] : stack(side)) {
    if (covered >= max_lots) break;
    if (!order.visible_at(clock)) continue;
    if (!out.empty() && out.back().price == order.price) {
      out.back().qty += order.qty;
    } else {
      out.push_back({order.price, order.qty});
    }
    covered += order.qty;
  }
}

std::size_t OrderBook::purge_expired(TimeMs clock) {
  std::size_t removed = 0;
  for (Stack* s : {&bids_, &asks_}) {
    for (auto it = s->begin(); it != s->end();) {
      if (!it->second.visible_at(clock)) {
        index_.erase(it->second.id);
        it = s->erase(it);
        ++removed;
      } else {
        ++it;
      }
    }
  }
  return removed;
}

bool is_relevant_update(const OrderBook& book, const BookMessage& msg, TimeMs clock) {
  OrderBook copy = book;
  const TopOfBook before = copy.top(clock);
  if (!copy.apply(msg, clock).ok()) return false;
  return copy.top(clock) != before;
}

}  // namespace ritrade
