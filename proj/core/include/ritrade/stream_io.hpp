#pragma once

#include "ritrade/battery.hpp"
#include "ritrade/lob.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ritrade {

/// Unreadable or malformed input data. `line` is 1-based, 0 when not tied to a row.
class DataError : public std::runtime_error {
 public:
  DataError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(what), line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

enum class ParseMode : std::uint8_t { Strict, Lenient };

struct ParseStats {
  std::size_t rows = 0;
  std::size_t skipped = 0;
  std::vector<std::string> errors;  // the first few skipped-row reasons
};

struct ParsedStream {
  std::vector<BookMessage> messages;
  ParseStats stats;
};

inline constexpr std::string_view kStreamHeader =
    "timestamp_ms,product_start_iso,kind,order_id,side,price_eur_mwh,qty_mwh,valid_until_ms";

/// Reads the order-message CSV. Prices must sit on the tick, quantities on the lot size, and
/// timestamps must not decrease. Strict mode throws DataError on the first bad row; lenient
/// mode skips it and counts it.
[[nodiscard]] ParsedStream parse_stream(std::istream& in, ParseMode mode, const MarketParams& market);
[[nodiscard]] ParsedStream read_stream(const std::filesystem::path& path, ParseMode mode,
                                       const MarketParams& market);

void write_stream(std::ostream& out, std::span<const BookMessage> messages, const MarketParams& market);
void write_stream(const std::filesystem::path& path, std::span<const BookMessage> messages,
                  const MarketParams& market);

/// Decimal MWh text for a lot count, without trailing zeros ("2.5", "10").
[[nodiscard]] std::string format_lots(Lots lots, const MarketParams& market);

}  // namespace ritrade
