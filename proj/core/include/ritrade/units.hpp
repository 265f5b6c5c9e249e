#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

namespace ritrade {

/// Price in hundredths of EUR/MWh (the exchange tick).
using Cents = std::int64_t;
/// Energy as an integer count of the minimum lot size u.
using Lots = std::int64_t;
/// Milliseconds since the Unix epoch; the exchange clock resolution.
using TimeMs = std::int64_t;
using OrderId = std::int64_t;
/// Products are identified by their delivery start.
using ProductId = TimeMs;

inline constexpr TimeMs kNever = std::numeric_limits<TimeMs>::max();
inline constexpr TimeMs kSecondMs = 1'000;
inline constexpr TimeMs kMinuteMs = 60 * kSecondMs;
inline constexpr TimeMs kHourMs = 60 * kMinuteMs;
inline constexpr TimeMs kDayMs = 24 * kHourMs;

/// Side of the book an order rests on.
enum class Side : std::uint8_t { Bid, Ask };
/// Direction of an aggressing (agent) order.
enum class Direction : std::uint8_t { Buy, Sell };

[[nodiscard]] constexpr Side opposite(Side s) noexcept {
  return s == Side::Bid ? Side::Ask : Side::Bid;
}

[[nodiscard]] constexpr double cents_to_eur(Cents c) noexcept {
  return static_cast<double>(c) / 100.0;
}

[[nodiscard]] std::string_view to_string(Side s) noexcept;
[[nodiscard]] std::string_view to_string(Direction d) noexcept;

/// Parses "YYYY-MM-DDTHH:MM[:SS[.mmm]]" with an optional trailing 'Z'. UTC only.
/// Throws std::invalid_argument on malformed input.
[[nodiscard]] TimeMs parse_iso_utc(std::string_view text);
/// Formats as "YYYY-MM-DDTHH:MM:SSZ" (milliseconds appended only if nonzero).
[[nodiscard]] std::string format_iso_utc(TimeMs t);

/// Parses a decimal string into an integer count of 10^-scale units, exactly.
/// Returns false when the text is not a plain decimal or has more than `scale` fraction digits
/// that are not zero.
[[nodiscard]] bool parse_fixed_point(std::string_view text, int scale, std::int64_t& out) noexcept;

/// "37.50", "-100.00"
[[nodiscard]] std::string format_cents(Cents c);

/// Start of the calendar month containing t (UTC).
[[nodiscard]] TimeMs month_start(TimeMs t);
/// Start of the calendar month after the one containing t (UTC).
[[nodiscard]] TimeMs next_month_start(TimeMs t);

}  // namespace ritrade
