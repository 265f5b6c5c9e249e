#pragma once

#include "ritrade/lob.hpp"
#include "ritrade/problem.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace ritrade::testing {

inline Cents cents(double eur) { return static_cast<Cents>(std::llround(eur * 100.0)); }
inline Lots lots(double mwh, double lot = 0.1) { return static_cast<Lots>(std::llround(mwh / lot)); }

inline BookMessage add(OrderId id, ProductId p, Side side, double price, double qty_mwh, TimeMs t,
                       TimeMs valid_until = kNever) {
  BookMessage m;
  m.kind = MessageKind::Add;
  m.timestamp = t;
  m.order = {id, p, side, cents(price), lots(qty_mwh), t, valid_until};
  return m;
}

inline BookMessage cancel(OrderId id, ProductId p, Side side, TimeMs t) {
  BookMessage m;
  m.kind = MessageKind::Cancel;
  m.timestamp = t;
  m.order.id = id;
  m.order.product = p;
  m.order.side = side;
  m.order.entry_time = t;
  return m;
}

inline BookMessage modify(OrderId id, ProductId p, Side side, double price, double qty_mwh, TimeMs t) {
  BookMessage m = add(id, p, side, price, qty_mwh, t);
  m.kind = MessageKind::Modify;
  return m;
}

/// Levels given as {price EUR, qty MWh}.
inline std::vector<Level> levels(std::initializer_list<std::pair<double, double>> ls) {
  std::vector<Level> out;
  for (const auto& [p, q] : ls) out.push_back({cents(p), lots(q)});
  return out;
}

inline ProductSnapshot product(ProductId id, std::vector<Level> asks, std::vector<Level> bids,
                               Lots position = 0) {
  ProductSnapshot p;
  p.product = id;
  p.position = position;
  p.asks = std::move(asks);
  p.bids = std::move(bids);
  if (!p.asks.empty() && !p.bids.empty()) p.spread = p.asks.front().price - p.bids.front().price;
  return p;
}

/// Unit efficiencies, no costs, 1 MWh / 1 MW battery unless overridden.
inline SolverParams small_params(double s_max = 1.0, double f = 1.0, double eta = 1.0, double nu_trade = 0.0,
                                 double nu_deg = 0.0, int m = 11) {
  SolverParams p;
  p.battery = {s_max, -f, f, eta, eta, 0.0};
  p.cost = {nu_trade, nu_deg};
  p.market = {};
  p.grid_size = m;
  return p;
}

/// A random uncrossed book side stack: `n` levels, strictly ordered, prices in whole cents.
inline std::vector<Level> random_side(std::mt19937_64& rng, int n, Cents from, Cents step_max, bool asks,
                                      Lots max_qty) {
  std::uniform_int_distribution<Cents> step(1, step_max);
  std::uniform_int_distribution<Lots> qty(1, max_qty);
  std::vector<Level> out;
  Cents price = from;
  for (int i = 0; i < n; ++i) {
    out.push_back({price, qty(rng)});
    price += asks ? step(rng) : -step(rng);
  }
  return out;
}

/// A product whose best ask sits above its best bid around a random mid.
inline ProductSnapshot random_product(std::mt19937_64& rng, ProductId id, int max_orders, Lots max_qty,
                                      Cents mid_lo = 1000, Cents mid_hi = 9000) {
  std::uniform_int_distribution<Cents> mid(mid_lo, mid_hi);
  std::uniform_int_distribution<Cents> half(1, 500);
  std::uniform_int_distribution<int> count(0, max_orders);
  const Cents m = mid(rng);
  const Cents h = half(rng);
  return product(id, random_side(rng, count(rng), m + h, 700, true, max_qty),
                 random_side(rng, count(rng), m - h, 700, false, max_qty));
}

}  // namespace ritrade::testing
