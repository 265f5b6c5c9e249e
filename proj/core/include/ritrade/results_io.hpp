#pragma once

#include "ritrade/engine.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace ritrade {

/// Ordered key/value pairs shared by the summary file and the CLI summary lines.
using Summary = std::vector<std::pair<std::string, std::string>>;

[[nodiscard]] Summary summarize(const BacktestResult& result);

void write_trades(std::ostream& out, const BacktestResult& result, const MarketParams& market);
void write_schedule(std::ostream& out, const BacktestResult& result, const MarketParams& market);
void write_reward_series(std::ostream& out, const BacktestResult& result);
void write_summary_json(std::ostream& out, const Summary& summary);

/// Writes trades.csv, schedule.csv, reward_series.csv and summary.json into `dir`, creating it
/// if needed. Throws DataError when a file cannot be written.
void write_results(const std::filesystem::path& dir, const BacktestResult& result,
                   const MarketParams& market);

/// Parses trades.csv back into records. Throws DataError on malformed rows.
[[nodiscard]] std::vector<TradeRecord> read_trades(std::istream& in, const MarketParams& market);

}  // namespace ritrade
