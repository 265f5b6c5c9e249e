#include "ritrade/config.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>

namespace ritrade::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const KeyValues& kv, const std::string& key) {
  const std::string& text = kv.at(key);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError(fmt::format("config: '{}' must be a number, got '{}'", key, text));
  }
  return v;
}

long long to_int(const KeyValues& kv, const std::string& key) {
  const std::string& text = kv.at(key);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(fmt::format("config: '{}' must be an integer, got '{}'", key, text));
  }
  return v;
}

TimeMs to_time(const KeyValues& kv, const std::string& key, TimeMs fallback) {
  const std::string& text = kv.at(key);
  if (text.empty()) return fallback;
  try {
    return parse_iso_utc(text);
  } catch (const std::invalid_argument&) {
    throw ConfigError(fmt::format("config: '{}' must be an ISO time, got '{}'", key, text));
  }
}

// "2021-02=2.1,2021-03=1.5" -> phi steps at the month starts.
PhiSchedule parse_phi(const KeyValues& kv) {
  PhiSchedule s = PhiSchedule::constant(to_double(kv, "phi"));
  const std::string& table = kv.at("phi_table");
  std::size_t from = 0;
  while (from < table.size()) {
    const std::size_t comma = std::min(table.find(',', from), table.size());
    const std::string item = trim(std::string_view(table).substr(from, comma - from));
    from = comma + 1;
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("config: bad phi_table entry '{}'", item));
    KeyValues one{{"phi_table", item.substr(eq + 1)}};
    TimeMs at = 0;
    try {
      at = parse_iso_utc(item.substr(0, eq) + "-01T00:00Z");
    } catch (const std::invalid_argument&) {
      throw ConfigError(fmt::format("config: bad phi_table month '{}'", item.substr(0, eq)));
    }
    s.steps.emplace_back(at, to_double(one, "phi_table"));
  }
  std::sort(s.steps.begin(), s.steps.end());
  return s;
}

}  // namespace

const KeyValues& default_config() {
  static const KeyValues defaults{
      {"s_max", "10"},         {"f_min", "-10"},        {"f_max", "10"},
      {"eta_in", "0.95"},      {"eta_out", "0.95"},     {"s0", "0"},
      {"nu_trade", "0.09"},    {"nu_deg", "4"},         {"lot_mwh", "0.1"},
      {"kappa", "1"},          {"tick_cents", "1"},     {"m", "11"},
      {"phi", "0"},            {"phi_table", ""},       {"solve_mode", "updates"},
      {"delay_ms", "200"},     {"solve_time", "0"},     {"gate_closure_lead_min", "30"},
      {"open_lead_min", ""},   {"max_active_products", "32"},
      {"start", ""},           {"end", ""},             {"parse_mode", "strict"},
      {"solver", "dp"},        {"oracle_budget", "1e8"},
      {"window", "month"},     {"phi_lo", "0"},         {"phi_hi", "10"},
      {"tol", "0.05"},         {"max_evals", "30"},     {"scan_points", "5"},
  };
  return defaults;
}

void apply_override(KeyValues& kv, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError(fmt::format("config: expected key=value, got '{}'", assignment));
  const std::string key = trim(std::string_view(assignment).substr(0, eq));
  if (!default_config().contains(key)) throw ConfigError(fmt::format("config: unknown key '{}'", key));
  kv[key] = trim(std::string_view(assignment).substr(eq + 1));
}

KeyValues load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("config: cannot open '{}'", path.string()));
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    try {
      apply_override(kv, body);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("{} ({}:{})", e.what(), path.string(), lineno));
    }
  }
  return kv;
}

SolveTrigger parse_solve_mode(const std::string& text) {
  if (text == "updates") return SolveTrigger::every_update();
  constexpr std::string_view prefix = "interval:";
  if (text.starts_with(prefix)) {
    KeyValues one{{"solve_mode", text.substr(prefix.size())}};
    const double minutes = to_double(one, "solve_mode");
    const auto ms = static_cast<TimeMs>(std::llround(minutes * static_cast<double>(kMinuteMs)));
    if (ms > 0) return SolveTrigger::every(ms);
  }
  throw ConfigError(fmt::format("config: solve_mode must be 'updates' or 'interval:<minutes>', got '{}'", text));
}

Settings resolve(const KeyValues& overrides) {
  Settings s;
  s.resolved = default_config();
  for (const auto& [k, v] : overrides) {
    if (!s.resolved.contains(k)) throw ConfigError(fmt::format("config: unknown key '{}'", k));
    s.resolved[k] = v;
  }
  const KeyValues& kv = s.resolved;

  BacktestConfig& b = s.backtest;
  BatteryParams& bat = b.solver.battery;
  bat.s_max = to_double(kv, "s_max");
  bat.f_min = to_double(kv, "f_min");
  bat.f_max = to_double(kv, "f_max");
  bat.eta_in = to_double(kv, "eta_in");
  bat.eta_out = to_double(kv, "eta_out");
  bat.s0 = to_double(kv, "s0");
  b.solver.cost.nu_trade = to_double(kv, "nu_trade");
  b.solver.cost.nu_deg = to_double(kv, "nu_deg");
  b.solver.market.lot_mwh = to_double(kv, "lot_mwh");
  b.solver.market.kappa = static_cast<int>(to_int(kv, "kappa"));
  b.solver.market.tick = to_int(kv, "tick_cents");
  b.solver.grid_size = static_cast<int>(to_int(kv, "m"));
  b.phi = parse_phi(kv);
  b.trigger = parse_solve_mode(kv.at("solve_mode"));
  b.technical_delay_ms = to_int(kv, "delay_ms");
  if (kv.at("solve_time") == "measured") {
    b.solve_time.measured = true;
  } else {
    b.solve_time.fixed_ms = to_int(kv, "solve_time");
  }
  b.gate_closure_lead_ms = to_int(kv, "gate_closure_lead_min") * kMinuteMs;
  if (!kv.at("open_lead_min").empty()) b.open_lead_ms = to_int(kv, "open_lead_min") * kMinuteMs;
  const long long cap = to_int(kv, "max_active_products");
  if (cap < 1) throw ConfigError("config: 'max_active_products' must be >= 1");
  b.max_active_products = static_cast<std::size_t>(cap);
  b.start = to_time(kv, "start", std::numeric_limits<TimeMs>::min());
  b.end = to_time(kv, "end", kNever);

  const std::string& mode = kv.at("parse_mode");
  if (mode == "strict") s.parse_mode = ParseMode::Strict;
  else if (mode == "lenient") s.parse_mode = ParseMode::Lenient;
  else throw ConfigError(fmt::format("config: parse_mode must be strict or lenient, got '{}'", mode));

  s.solver = kv.at("solver");
  if (s.solver != "dp" && s.solver != "exact") {
    throw ConfigError(fmt::format("config: solver must be dp or exact, got '{}'", s.solver));
  }
  s.oracle_budget = to_double(kv, "oracle_budget");

  TuneConfig& t = s.tune;
  const std::string& window = kv.at("window");
  if (window == "month") {
    t.window.calendar_months = true;
  } else if (window.size() > 1 && window.back() == 'd') {
    KeyValues one{{"window", window.substr(0, window.size() - 1)}};
    t.window.calendar_months = false;
    t.window.length_ms = to_int(one, "window") * kDayMs;
  } else {
    throw ConfigError(fmt::format("config: window must be 'month' or '<days>d', got '{}'", window));
  }
  t.phi_lo = to_double(kv, "phi_lo");
  t.phi_hi = to_double(kv, "phi_hi");
  t.tol = to_double(kv, "tol");
  t.max_evals = static_cast<int>(to_int(kv, "max_evals"));
  t.scan_points = static_cast<int>(to_int(kv, "scan_points"));

  try {
    b.validate();
    t.base = b;
    t.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return s;
}

}  // namespace ritrade::cli
