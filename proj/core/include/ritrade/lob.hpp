#pragma once

#include "ritrade/units.hpp"

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ritrade {

struct LimitOrder {
  OrderId id = 0;
  ProductId product = 0;
  Side side = Side::Bid;
  Cents price = 0;
  Lots qty = 0;
  TimeMs entry_time = 0;
  TimeMs valid_until = kNever;

  [[nodiscard]] bool visible_at(TimeMs clock) const noexcept { return valid_until > clock; }
  friend bool operator==(const LimitOrder&, const LimitOrder&) = default;
};

enum class MessageKind : std::uint8_t { Add, Modify, Cancel };

[[nodiscard]] std::string_view to_string(MessageKind k) noexcept;

/// One row of the historical order-message stream.
struct BookMessage {
  MessageKind kind = MessageKind::Add;
  LimitOrder order;
  TimeMs timestamp = 0;

  friend bool operator==(const BookMessage&, const BookMessage&) = default;
};

struct Fill {
  OrderId resting_id = 0;
  Lots qty = 0;
  Cents price = 0;  // the resting order's limit

  friend bool operator==(const Fill&, const Fill&) = default;
};

struct MatchReport {
  std::vector<Fill> fills;

  [[nodiscard]] Lots filled() const noexcept;
  /// Sum of price * quantity in EUR for a lot size given in MWh.
  [[nodiscard]] double notional_eur(double lot_mwh) const noexcept;

  friend bool operator==(const MatchReport&, const MatchReport&) = default;
};

enum class ApplyStatus : std::uint8_t {
  Applied,
  UnknownOrder,
  DuplicateOrder,
  StaleTimestamp,
  InvalidOrder,
  WrongProduct,
};

[[nodiscard]] std::string_view to_string(ApplyStatus s) noexcept;

struct ApplyResult {
  ApplyStatus status = ApplyStatus::Applied;
  MatchReport report;

  [[nodiscard]] bool ok() const noexcept { return status == ApplyStatus::Applied; }
};

/// Aggregated quantity at one price.
struct Level {
  Cents price = 0;
  Lots qty = 0;

  friend bool operator==(const Level&, const Level&) = default;
};

/// Best price level on each side. Two tops compare equal iff neither head level moved.
struct TopOfBook {
  std::optional<Level> bid;
  std::optional<Level> ask;

  friend bool operator==(const TopOfBook&, const TopOfBook&) = default;
};

struct Quotes {
  std::optional<Cents> best_bid;
  std::optional<Cents> best_ask;
  std::optional<Cents> spread;
};

/// Limit order book for one product with price-time priority.
///
/// Historical messages rest their residual after crossing; agent orders go through
/// match_all_or_none and never rest. Expired orders stay in storage until a mutating
/// call walks over them, but are invisible to every query at or after their expiry.
class OrderBook {
 public:
  explicit OrderBook(ProductId product = 0) : product_(product) {}

  [[nodiscard]] ProductId product() const noexcept { return product_; }
  [[nodiscard]] TimeMs clock() const noexcept { return clock_; }

  /// Applies a message at its own timestamp.
  ApplyResult apply(const BookMessage& msg) { return apply(msg, msg.timestamp); }
  ApplyResult apply(const BookMessage& msg, TimeMs clock);

  /// Immediate all-or-none order from the agent. Either the full quantity clears within
  /// `limit` and the resting orders are consumed, or nothing changes and nullopt is returned.
  std::optional<MatchReport> match_all_or_none(Direction dir, Lots qty, Cents limit, TimeMs clock);

  [[nodiscard]] Quotes best_quotes(TimeMs clock) const;
  [[nodiscard]] TopOfBook top(TimeMs clock) const;

  /// Visible orders of one side in priority order.
  [[nodiscard]] std::vector<LimitOrder> orders(Side side, TimeMs clock) const;

  /// Visible price levels of one side in priority order, stopping once `max_lots` are covered.
  void levels(Side side, TimeMs clock, Lots max_lots, std::vector<Level>& out) const;

  std::size_t purge_expired(TimeMs clock);

  [[nodiscard]] std::size_t size() const noexcept { return index_.size(); }
  [[nodiscard]] bool contains(OrderId id) const { return index_.contains(id); }

  friend bool operator==(const OrderBook& a, const OrderBook& b) {
    return a.product_ == b.product_ && a.clock_ == b.clock_ && a.bids_ == b.bids_ &&
           a.asks_ == b.asks_;
  }

 private:
  // Bids store the negated price so both sides sort ascending in priority order.
  struct Key {
    Cents rank = 0;
    TimeMs entry = 0;
    OrderId id = 0;
    auto operator<=>(const Key&) const = default;
  };
  using Stack = std::map<Key, LimitOrder>;

  static Key key_of(const LimitOrder& o) noexcept {
    return {o.side == Side::Ask ? o.price : -o.price, o.entry_time, o.id};
  }
  Stack& stack(Side s) noexcept { return s == Side::Bid ? bids_ : asks_; }
  const Stack& stack(Side s) const noexcept { return s == Side::Bid ? bids_ : asks_; }

  void rest(const LimitOrder& o);
  void remove(OrderId id);
  /// Clears `incoming` against the opposite stack; leaves the unfilled quantity in `incoming.qty`.
  void cross(LimitOrder& incoming, TimeMs clock, MatchReport& out);

  ProductId product_ = 0;
  TimeMs clock_ = std::numeric_limits<TimeMs>::min();
  Stack bids_;
  Stack asks_;
  std::unordered_map<OrderId, std::pair<Side, Key>> index_;
};

/// True iff applying `msg` at `clock` changes the head price level (price or quantity) of
/// either side. Evaluated on a copy; the book itself is untouched.
[[nodiscard]] bool is_relevant_update(const OrderBook& book, const BookMessage& msg, TimeMs clock);

}  // namespace ritrade
