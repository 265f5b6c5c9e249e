#include "ritrade/units.hpp"

#include <fmt/format.h>

#include <charconv>
#include <chrono>
#include <stdexcept>

namespace ritrade {

namespace {

template <typename Int>
bool read_int(std::string_view text, std::size_t pos, std::size_t len, Int& out) {
  if (pos + len > text.size()) return false;
  const char* first = text.data() + pos;
  const char* last = first + len;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

}  // namespace

std::string_view to_string(Side s) noexcept { return s == Side::Bid ? "bid" : "ask"; }

std::string_view to_string(Direction d) noexcept { return d == Direction::Buy ? "buy" : "sell"; }

TimeMs parse_iso_utc(std::string_view text) {
  using namespace std::chrono;
  if (!text.empty() && (text.back() == 'Z' || text.back() == 'z')) text.remove_suffix(1);

  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0, ms = 0;
  const bool head_ok = text.size() >= 16 && text[4] == '-' && text[7] == '-' &&
                       (text[10] == 'T' || text[10] == ' ') && text[13] == ':' &&
                       read_int(text, 0, 4, y) && read_int(text, 5, 2, mo) &&
                       read_int(text, 8, 2, d) && read_int(text, 11, 2, h) &&
                       read_int(text, 14, 2, mi);
  if (!head_ok) throw std::invalid_argument(fmt::format("malformed timestamp '{}'", text));

  std::size_t pos = 16;
  if (pos < text.size()) {
    if (text[pos] != ':' || !read_int(text, pos + 1, 2, s)) {
      throw std::invalid_argument(fmt::format("malformed seconds in '{}'", text));
    }
    pos += 3;
    if (pos < text.size()) {
      if (text[pos] != '.' || text.size() != pos + 4 || !read_int(text, pos + 1, 3, ms)) {
        throw std::invalid_argument(fmt::format("malformed fraction in '{}'", text));
      }
    }
  }

  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) {
    throw std::invalid_argument(fmt::format("timestamp out of range '{}'", text));
  }
  const auto tp = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} + milliseconds{ms};
  return duration_cast<milliseconds>(tp.time_since_epoch()).count();
}

std::string format_iso_utc(TimeMs t) {
  using namespace std::chrono;
  const sys_time<milliseconds> tp{milliseconds{t}};
  const auto day_start = floor<days>(tp);
  const year_month_day ymd{day_start};
  const hh_mm_ss<milliseconds> tod{tp - day_start};
  std::string out = fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}", int(ymd.year()),
                                unsigned(ymd.month()), unsigned(ymd.day()), tod.hours().count(),
                                tod.minutes().count(), tod.seconds().count());
  if (tod.subseconds().count() != 0) out += fmt::format(".{:03d}", tod.subseconds().count());
  out += 'Z';
  return out;
}

bool parse_fixed_point(std::string_view text, int scale, std::int64_t& out) noexcept {
  if (text.empty()) return false;
  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  const auto dot = text.find('.');
  const std::string_view whole = text.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() && frac.empty()) return false;

  std::int64_t value = 0;
  for (char c : whole) {
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
    if (value > (std::int64_t{1} << 52)) return false;
  }
  int digits = 0;
  for (char c : frac) {
    if (c < '0' || c > '9') return false;
    if (digits >= scale) {
      if (c != '0') return false;
      continue;
    }
    value = value * 10 + (c - '0');
    ++digits;
  }
  for (; digits < scale; ++digits) value *= 10;
  out = negative ? -value : value;
  return true;
}

std::string format_cents(Cents c) {
  const char* sign = c < 0 ? "-" : "";
  const Cents a = c < 0 ? -c : c;
  return fmt::format("{}{}.{:02d}", sign, a / 100, a % 100);
}

TimeMs month_start(TimeMs t) {
  using namespace std::chrono;
  const sys_time<milliseconds> tp{milliseconds{t}};
  const year_month_day ymd{floor<days>(tp)};
  const sys_days first{ymd.year() / ymd.month() / 1};
  return duration_cast<milliseconds>(first.time_since_epoch()).count();
}

TimeMs next_month_start(TimeMs t) {
  using namespace std::chrono;
  const sys_time<milliseconds> tp{milliseconds{t}};
  const year_month_day ymd{floor<days>(tp)};
  const year_month next = year_month{ymd.year(), ymd.month()} + months{1};
  const sys_days first{next / 1};
  return duration_cast<milliseconds>(first.time_since_epoch()).count();
}

}  // namespace ritrade
