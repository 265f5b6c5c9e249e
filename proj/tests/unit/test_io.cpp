#include "ritrade/results_io.hpp"
#include "ritrade/stream_io.hpp"
#include "ritrade/synthetic.hpp"

#include "support/builders.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace ritrade {
namespace {

namespace fs = std::filesystem;

std::string with_header(const std::string& rows) { return std::string(kStreamHeader) + "\n" + rows; }

ParsedStream parse(const std::string& text, ParseMode mode = ParseMode::Strict) {
  std::istringstream in(text);
  return parse_stream(in, mode, MarketParams{});
}

TEST(StreamIo, ParsesEveryKind) {
  const ParsedStream s = parse(with_header(
      "1000,2021-01-01T10:00Z,add,7,ask,37.50,2.5,\r\n"
      "1001,2021-01-01T10:00Z,modify,7,sell,37.40,1,90000\n"
      "\n"
      "1002,2021-01-01T10:00Z,cancel,7,,,,\n"
      "1003,2021-01-01T11:00:00Z,add,8,buy,-100,0.1,\n"));
  ASSERT_EQ(s.messages.size(), 4U);
  EXPECT_EQ(s.stats.rows, 4U);
  const BookMessage& a = s.messages[0];
  EXPECT_EQ(a.kind, MessageKind::Add);
  EXPECT_EQ(a.order.product, parse_iso_utc("2021-01-01T10:00:00Z"));
  EXPECT_EQ(a.order.side, Side::Ask);
  EXPECT_EQ(a.order.price, 3750);
  EXPECT_EQ(a.order.qty, 25);
  EXPECT_EQ(a.order.valid_until, kNever);
  EXPECT_EQ(s.messages[1].kind, MessageKind::Modify);
  EXPECT_EQ(s.messages[1].order.valid_until, 90000);
  EXPECT_EQ(s.messages[2].kind, MessageKind::Cancel);
  EXPECT_EQ(s.messages[3].order.side, Side::Bid);
  EXPECT_EQ(s.messages[3].order.price, -10000);
  EXPECT_EQ(s.messages[3].order.qty, 1);
}

TEST(StreamIo, RejectsBadRows) {
  for (const char* row : {
           "1,2021-01-01T10:00Z,add,1,ask,37.505,1,",   // off tick
           "1,2021-01-01T10:00Z,add,1,ask,37.5,0.05,",  // off lot
           "1,2021-01-01T10:00Z,add,1,ask,37.5,0,",
           "1,2021-01-01T10:00Z,add,1,up,37.5,1,",
           "1,2021-01-01T10:00Z,hold,1,ask,37.5,1,",
           "1,2021-13-01T10:00Z,add,1,ask,37.5,1,",
           "1,2021-01-01T10:00Z,add,1,ask,37.5,1",
           "x,2021-01-01T10:00Z,add,1,ask,37.5,1,",
           "5,2021-01-01T10:00Z,add,1,ask,37.5,1,5",
       }) {
    EXPECT_THROW((void)parse(with_header(std::string(row) + "\n")), DataError) << row;
    const ParsedStream lenient = parse(with_header(std::string(row) + "\n"), ParseMode::Lenient);
    EXPECT_EQ(lenient.stats.skipped, 1U) << row;
    EXPECT_TRUE(lenient.messages.empty());
  }
}

TEST(StreamIo, OrderAndHeader) {
  const std::string rows =
      "10,2021-01-01T10:00Z,add,1,ask,30,1,\n"
      "5,2021-01-01T10:00Z,add,2,ask,31,1,\n"
      "12,2021-01-01T10:00Z,add,3,ask,32,1,\n";
  try {
    (void)parse(with_header(rows));
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_EQ(e.line(), 3U);
  }
  const ParsedStream s = parse(with_header(rows), ParseMode::Lenient);
  EXPECT_EQ(s.messages.size(), 2U);
  EXPECT_EQ(s.stats.skipped, 1U);
  EXPECT_EQ(s.stats.errors.size(), 1U);

  EXPECT_THROW((void)parse(""), DataError);
  EXPECT_THROW((void)parse("a,b,c\n"), DataError);
  EXPECT_THROW((void)read_stream("/nonexistent/stream.csv", ParseMode::Strict, {}), DataError);
}

TEST(StreamIo, RoundTripsSyntheticFlow) {
  SyntheticFlowSpec spec;
  spec.days = 2;
  const std::vector<BookMessage> msgs = generate_synthetic(spec);
  std::ostringstream out;
  write_stream(out, msgs, {});
  const ParsedStream back = parse(out.str());
  ASSERT_EQ(back.messages.size(), msgs.size());
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    const BookMessage& a = msgs[i];
    const BookMessage& b = back.messages[i];
    EXPECT_EQ(a.timestamp, b.timestamp);
    EXPECT_EQ(a.kind, b.kind);
    EXPECT_EQ(a.order.id, b.order.id);
    EXPECT_EQ(a.order.product, b.order.product);
    EXPECT_EQ(a.order.valid_until, b.order.valid_until);
    if (a.kind != MessageKind::Cancel) {
      EXPECT_EQ(a.order.side, b.order.side);
      EXPECT_EQ(a.order.price, b.order.price);
      EXPECT_EQ(a.order.qty, b.order.qty);
    }
  }
}

TEST(StreamIo, FormatLots) {
  EXPECT_EQ(format_lots(25, {}), "2.5");
  EXPECT_EQ(format_lots(100, {}), "10");
  EXPECT_EQ(format_lots(-3, {}), "-0.3");
  EXPECT_EQ(format_lots(0, {}), "0");
}

BacktestResult sample_result() {
  BacktestResult r;
  r.trades = {{1000, 36'000'000, Direction::Buy, 2000, 100, 0.9},
              {1000, 39'600'000, Direction::Sell, -1234, 7, 0.063}};
  r.schedule = {{36'000'000, 100, 10.0}, {39'600'000, -7, 9.3}};
  r.reward_series = {{1000, -0.1}, {2000, 1.0 / 3.0}};
  r.reward = 1.0 / 3.0;
  return r;
}

TEST(ResultsIo, TradesRoundTrip) {
  const BacktestResult r = sample_result();
  std::stringstream io;
  write_trades(io, r, {});
  const std::vector<TradeRecord> back = read_trades(io, {});
  EXPECT_EQ(back, r.trades);
}

TEST(ResultsIo, WritesTheResultDirectory) {
  const fs::path dir = fs::temp_directory_path() / "ritrade_results_io_test";
  fs::remove_all(dir);
  const BacktestResult r = sample_result();
  write_results(dir, r, {});
  for (const char* f : {"trades.csv", "schedule.csv", "reward_series.csv", "summary.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  std::ifstream js(dir / "summary.json");
  const auto j = nlohmann::ordered_json::parse(js);
  EXPECT_EQ(j.at("reward").get<std::string>(), "0.33");
  EXPECT_EQ(j.begin().key(), "reward");

  std::ifstream sched(dir / "schedule.csv");
  std::string header, row;
  std::getline(sched, header);
  std::getline(sched, row);
  EXPECT_EQ(header, "product_start_iso,final_position_mwh,soc_end_mwh");
  EXPECT_EQ(row, "1970-01-01T10:00:00Z,10,10");

  std::ifstream series(dir / "reward_series.csv");
  std::getline(series, header);
  std::getline(series, row);
  std::getline(series, row);
  EXPECT_EQ(std::stod(row.substr(row.find(',') + 1)), 1.0 / 3.0);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace ritrade
