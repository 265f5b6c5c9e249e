#include "ritrade/stream_io.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace ritrade {

namespace {

constexpr int kQtyScale = 6;  // micro-MWh
constexpr std::size_t kMaxRecordedErrors = 10;

std::int64_t lot_micro(const MarketParams& m) {
  return std::llround(m.lot_mwh * 1e6);
}

struct RowError {
  std::string what;
};

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t from = 0;
  while (true) {
    const std::size_t comma = line.find(',', from);
    fields.push_back(line.substr(from, comma == std::string_view::npos ? std::string_view::npos : comma - from));
    if (comma == std::string_view::npos) break;
    from = comma + 1;
  }
  return fields;
}

std::int64_t parse_int(std::string_view text, const char* field) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw RowError{fmt::format("bad {} '{}'", field, text)};
  }
  return v;
}

BookMessage parse_row(std::string_view line, const MarketParams& market) {
  const std::vector<std::string_view> f = split(line);
  if (f.size() != 8) throw RowError{fmt::format("expected 8 fields, got {}", f.size())};

  BookMessage msg;
  msg.timestamp = parse_int(f[0], "timestamp");
  try {
    msg.order.product = parse_iso_utc(f[1]);
  } catch (const std::invalid_argument&) {
    throw RowError{fmt::format("bad product start '{}'", f[1])};
  }
  if (f[2] == "add") {
    msg.kind = MessageKind::Add;
  } else if (f[2] == "modify") {
    msg.kind = MessageKind::Modify;
  } else if (f[2] == "cancel") {
    msg.kind = MessageKind::Cancel;
  } else {
    throw RowError{fmt::format("bad kind '{}'", f[2])};
  }
  msg.order.id = parse_int(f[3], "order id");
  if (f[4] == "bid" || f[4] == "buy") {
    msg.order.side = Side::Bid;
  } else if (f[4] == "ask" || f[4] == "sell") {
    msg.order.side = Side::Ask;
  } else if (!(msg.kind == MessageKind::Cancel && f[4].empty())) {
    throw RowError{fmt::format("bad side '{}'", f[4])};
  }
  msg.order.entry_time = msg.timestamp;
  msg.order.valid_until = f[7].empty() ? kNever : parse_int(f[7], "valid_until");
  if (msg.kind == MessageKind::Cancel && f[5].empty() && f[6].empty()) return msg;

  std::int64_t cents = 0;
  if (!parse_fixed_point(f[5], 2, cents)) throw RowError{fmt::format("bad price '{}'", f[5])};
  if (cents % market.tick != 0) throw RowError{fmt::format("price '{}' is off the tick", f[5])};
  msg.order.price = cents;

  std::int64_t micro = 0;
  if (!parse_fixed_point(f[6], kQtyScale, micro)) throw RowError{fmt::format("bad quantity '{}'", f[6])};
  const std::int64_t unit = lot_micro(market);
  if (micro <= 0 || micro % unit != 0) {
    throw RowError{fmt::format("quantity '{}' is not a positive multiple of the lot size", f[6])};
  }
  msg.order.qty = micro / unit;
  if (msg.order.valid_until <= msg.timestamp) throw RowError{"valid_until must follow the timestamp"};
  return msg;
}

std::string_view trim_cr(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  return s;
}

}  // namespace

ParsedStream parse_stream(std::istream& in, ParseMode mode, const MarketParams& market) {
  market.validate();
  ParsedStream out;
  std::string line;
  std::size_t lineno = 0;
  TimeMs last = std::numeric_limits<TimeMs>::min();

  if (!std::getline(in, line)) throw DataError("stream: empty file", 0);
  ++lineno;
  if (trim_cr(line) != kStreamHeader) throw DataError("stream: unexpected header", lineno);

  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view row = trim_cr(line);
    if (row.empty()) continue;
    ++out.stats.rows;
    try {
      BookMessage msg = parse_row(row, market);
      if (msg.timestamp < last) {
        throw RowError{fmt::format("timestamp {} precedes {}", msg.timestamp, last)};
      }
      last = msg.timestamp;
      out.messages.push_back(msg);
    } catch (const RowError& e) {
      if (mode == ParseMode::Strict) throw DataError(fmt::format("line {}: {}", lineno, e.what), lineno);
      ++out.stats.skipped;
      if (out.stats.errors.size() < kMaxRecordedErrors) {
        out.stats.errors.push_back(fmt::format("line {}: {}", lineno, e.what));
      }
    }
  }
  return out;
}

ParsedStream read_stream(const std::filesystem::path& path, ParseMode mode, const MarketParams& market) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  return parse_stream(in, mode, market);
}

std::string format_lots(Lots lots, const MarketParams& market) {
  const std::int64_t micro = lots * lot_micro(market);
  const char* sign = micro < 0 ? "-" : "";
  const std::int64_t a = micro < 0 ? -micro : micro;
  std::string frac = fmt::format("{:06d}", a % 1'000'000);
  while (!frac.empty() && frac.back() == '0') frac.pop_back();
  return frac.empty() ? fmt::format("{}{}", sign, a / 1'000'000)
                      : fmt::format("{}{}.{}", sign, a / 1'000'000, frac);
}

void write_stream(std::ostream& out, std::span<const BookMessage> messages, const MarketParams& market) {
  out << kStreamHeader << '\n';
  for (const BookMessage& m : messages) {
    const bool bare_cancel = m.kind == MessageKind::Cancel && m.order.qty == 0;
    out << m.timestamp << ',' << format_iso_utc(m.order.product) << ',' << to_string(m.kind) << ','
        << m.order.id << ',' << to_string(m.order.side) << ',';
    if (!bare_cancel) out << format_cents(m.order.price) << ',' << format_lots(m.order.qty, market);
    else out << ',';
    out << ',';
    if (m.order.valid_until != kNever) out << m.order.valid_until;
    out << '\n';
  }
}

void write_stream(const std::filesystem::path& path, std::span<const BookMessage> messages,
                  const MarketParams& market) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  write_stream(out, messages, market);
  if (!out) throw DataError(fmt::format("write to '{}' failed", path.string()));
}

}  // namespace ritrade
