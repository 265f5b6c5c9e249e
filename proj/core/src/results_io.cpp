#include "ritrade/results_io.hpp"

#include "ritrade/stream_io.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

namespace ritrade {

namespace {

std::string num(double v) { return fmt::format("{}", v); }

template <typename F>
void write_file(const std::filesystem::path& path, F&& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  body(out);
  if (!out) throw DataError(fmt::format("write to '{}' failed", path.string()));
}

}  // namespace

Summary summarize(const BacktestResult& r) {
  const BacktestCounters& c = r.counters;
  return {
      {"reward", fmt::format("{:.2f}", r.reward)},
      {"gross_cash", fmt::format("{:.2f}", r.gross_cash)},
      {"fees", fmt::format("{:.2f}", r.fees)},
      {"degradation", fmt::format("{:.2f}", r.degradation)},
      {"solves", std::to_string(c.solves)},
      {"relevant_updates", std::to_string(c.relevant_updates)},
      {"interval_triggers", std::to_string(c.interval_triggers)},
      {"orders", std::to_string(c.orders_submitted)},
      {"orders_accepted", std::to_string(c.orders_accepted)},
      {"orders_rejected", std::to_string(c.orders_rejected)},
      {"trades", std::to_string(r.trades.size())},
      {"volume_mwh", num(r.traded_mwh)},
      {"settled_mwh", num(r.settled_mwh)},
      {"cycles_per_day", fmt::format("{:.4f}", r.cycles_per_day)},
      {"imbalances", std::to_string(r.imbalances.size())},
      {"messages_applied", std::to_string(c.messages_applied)},
      {"messages_rejected", std::to_string(c.messages_rejected)},
      {"runtime_s", fmt::format("{:.3f}", r.runtime_s)},
  };
}

void write_trades(std::ostream& out, const BacktestResult& result, const MarketParams& market) {
  out << "exec_time_ms,product_start_iso,side,price,qty,fee\n";
  for (const TradeRecord& t : result.trades) {
    out << t.time << ',' << format_iso_utc(t.product) << ',' << to_string(t.side) << ','
        << format_cents(t.price) << ',' << format_lots(t.qty, market) << ',' << num(t.fee) << '\n';
  }
}

void write_schedule(std::ostream& out, const BacktestResult& result, const MarketParams& market) {
  out << "product_start_iso,final_position_mwh,soc_end_mwh\n";
  for (const ScheduleEntry& s : result.schedule) {
    out << format_iso_utc(s.product) << ',' << format_lots(s.position, market) << ','
        << num(s.soc_end) << '\n';
  }
}

void write_reward_series(std::ostream& out, const BacktestResult& result) {
  out << "time_ms,cum_reward_eur\n";
  for (const RewardPoint& p : result.reward_series) out << p.time << ',' << num(p.reward) << '\n';
}

void write_summary_json(std::ostream& out, const Summary& summary) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : summary) j[k] = v;
  out << j.dump(2) << '\n';
}

void write_results(const std::filesystem::path& dir, const BacktestResult& result,
                   const MarketParams& market) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  write_file(dir / "trades.csv", [&](std::ostream& o) { write_trades(o, result, market); });
  write_file(dir / "schedule.csv", [&](std::ostream& o) { write_schedule(o, result, market); });
  write_file(dir / "reward_series.csv", [&](std::ostream& o) { write_reward_series(o, result); });
  write_file(dir / "summary.json", [&](std::ostream& o) { write_summary_json(o, summarize(result)); });
}

std::vector<TradeRecord> read_trades(std::istream& in, const MarketParams& market) {
  std::vector<TradeRecord> trades;
  std::string line;
  std::size_t lineno = 0;
  const auto fail = [&](const char* what) {
    throw DataError(fmt::format("trades line {}: {}", lineno, what), lineno);
  };
  if (!std::getline(in, line)) return trades;
  ++lineno;
  const std::int64_t unit = std::llround(market.lot_mwh * 1e6);
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t from = 0;
    while (true) {
      const std::size_t comma = line.find(',', from);
      f.push_back(line.substr(from, comma == std::string::npos ? std::string::npos : comma - from));
      if (comma == std::string::npos) break;
      from = comma + 1;
    }
    if (f.size() != 6) fail("expected 6 fields");
    TradeRecord t;
    if (std::from_chars(f[0].data(), f[0].data() + f[0].size(), t.time).ec != std::errc{}) fail("bad time");
    try {
      t.product = parse_iso_utc(f[1]);
    } catch (const std::invalid_argument&) {
      fail("bad product");
    }
    if (f[2] == "buy") t.side = Direction::Buy;
    else if (f[2] == "sell") t.side = Direction::Sell;
    else fail("bad side");
    if (!parse_fixed_point(f[3], 2, t.price)) fail("bad price");
    std::int64_t micro = 0;
    if (!parse_fixed_point(f[4], 6, micro) || micro % unit != 0) fail("bad quantity");
    t.qty = micro / unit;
    if (std::from_chars(f[5].data(), f[5].data() + f[5].size(), t.fee).ec != std::errc{}) fail("bad fee");
    trades.push_back(t);
  }
  return trades;
}

}  // namespace ritrade
