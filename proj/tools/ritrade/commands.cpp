#include "ritrade/commands.hpp"

#include "ritrade/config.hpp"
#include "ritrade/manifest.hpp"
#include "ritrade/intrinsic_dp.hpp"
#include "ritrade/oracle.hpp"
#include "ritrade/results_io.hpp"
#include "ritrade/synthetic.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <optional>
#include <ostream>

namespace ritrade::cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<unsigned> workers;
  std::string out;
};

struct RunFlags {
  std::string data;
  std::optional<std::string> solve_mode;
  std::optional<long long> delay_ms;
  std::optional<int> m;
  std::optional<double> phi;
  std::optional<std::string> solver;
  bool lenient = false;
};

struct CompareFlags {
  std::string data;
  std::vector<int> grids{11, 51, 101};
  std::optional<std::string> solve_mode;
  std::optional<long long> delay_ms;
  std::optional<double> budget;
};

struct TuneFlags {
  std::string data;
  std::optional<double> phi_lo, phi_hi, tol;
  std::optional<int> max_evals;
  std::optional<std::string> window;
};

struct GenFlags {
  std::uint64_t seed = 42;
  int days = 1;
  std::optional<std::string> start;
  bool planted_pair = false;
  bool no_background = false;
};

unsigned resolve_workers(const Common& c) {
  if (c.workers) return std::max(1U, *c.workers);
  if (const char* env = std::getenv("RITRADE_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

KeyValues gather(const Common& c) {
  KeyValues kv;
  if (!c.config_path.empty()) kv = load_config_file(c.config_path);
  for (const std::string& s : c.sets) apply_override(kv, s);
  return kv;
}

template <typename T>
void put(KeyValues& kv, const char* key, const std::optional<T>& v) {
  if (v) kv[key] = fmt::format("{}", *v);
}

void print_summary(std::ostream& out, const Summary& summary) {
  for (const auto& [k, v] : summary) fmt::print(out, "{}={}\n", k, v);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ParsedStream load(const std::string& path, const Settings& s, std::ostream& err) {
  ParsedStream data = read_stream(path, s.parse_mode, s.backtest.solver.market);
  for (const std::string& e : data.stats.errors) fmt::print(err, "skipped {}\n", e);
  return data;
}

int cmd_run(const Common& c, const RunFlags& f, std::ostream& out, std::ostream& err) {
  const auto t0 = Clock::now();
  KeyValues kv = gather(c);
  put(kv, "solve_mode", f.solve_mode);
  put(kv, "delay_ms", f.delay_ms);
  put(kv, "m", f.m);
  put(kv, "phi", f.phi);
  put(kv, "solver", f.solver);
  if (f.lenient) kv["parse_mode"] = "lenient";
  const Settings s = resolve(kv);
  const ParsedStream data = load(f.data, s, err);

  std::unique_ptr<Solver> solver;
  if (s.solver == "exact") {
    solver = std::make_unique<ExactSolver>(s.backtest.solver, OracleOptions{s.oracle_budget});
  } else {
    solver = std::make_unique<IntrinsicDp>(s.backtest.solver);
  }
  const BacktestResult result = run_backtest(s.backtest, data.messages, *solver);

  const fs::path dir = c.out.empty() ? fs::path("out") : fs::path(c.out);
  write_results(dir, result, s.backtest.solver.market);
  RunManifest manifest{"run", s.resolved, {f.data}, {}, resolve_workers(c), seconds_since(t0)};
  for (const char* name : {"trades.csv", "schedule.csv", "reward_series.csv", "summary.json"}) {
    manifest.outputs.push_back(dir / name);
  }
  write_manifest(dir, manifest);

  Summary summary = summarize(result);
  summary.emplace_back("rows", std::to_string(data.stats.rows));
  summary.emplace_back("skipped", std::to_string(data.stats.skipped));
  summary.emplace_back("wall_s", fmt::format("{:.3f}", seconds_since(t0)));
  print_summary(out, summary);
  return kExitOk;
}

struct SolveGap {
  TimeMs time = 0;
  std::size_t products = 0;
  double dp = 0.0;
  std::optional<double> exact;
  double dp_us = 0.0;
  double exact_us = 0.0;
};

int cmd_compare(const Common& c, const CompareFlags& f, std::ostream& out, std::ostream& err) {
  const auto t0 = Clock::now();
  KeyValues kv = gather(c);
  put(kv, "solve_mode", f.solve_mode);
  put(kv, "delay_ms", f.delay_ms);
  put(kv, "oracle_budget", f.budget);
  if (f.grids.empty()) throw ConfigError("compare: at least one grid size is required");
  kv["m"] = std::to_string(f.grids.front());
  const Settings s = resolve(kv);
  const ParsedStream data = load(f.data, s, err);
  const OracleOptions options{s.oracle_budget};

  // Per solve: the oracle sees every snapshot the DP run produced.
  std::vector<SolveGap> gaps;
  {
    IntrinsicDp dp(s.backtest.solver);
    ExactSolver exact(s.backtest.solver, options);
    Backtest bt(s.backtest, &dp);
    bt.set_observer([&](const Snapshot& snap, const TargetPositions& plan) {
      SolveGap g{snap.time, snap.products.size(), plan.objective, std::nullopt, 0.0, 0.0};
      IntrinsicDp again(s.backtest.solver);
      const auto a = Clock::now();
      (void)again.solve(snap);
      g.dp_us = seconds_since(a) * 1e6;
      try {
        const auto b = Clock::now();
        g.exact = exact.solve(snap).objective;
        g.exact_us = seconds_since(b) * 1e6;
      } catch (const OracleBudgetExceeded&) {
      }
      gaps.push_back(g);
    });
    (void)bt.run(data.messages);
  }

  // Per run: one backtest per grid size and one driven by the oracle.
  const unsigned workers = resolve_workers(c);
  const auto run_dp = [&](int m) {
    BacktestConfig cfg = s.backtest;
    cfg.solver.grid_size = m;
    return run_backtest(cfg, data.messages).reward;
  };
  std::vector<double> dp_rewards(f.grids.size());
  std::vector<std::future<double>> pending;
  for (std::size_t i = 0; i < f.grids.size(); ++i) {
    if (workers > 1) {
      pending.push_back(std::async(std::launch::async, run_dp, f.grids[i]));
    } else {
      dp_rewards[i] = run_dp(f.grids[i]);
    }
  }
  std::optional<double> exact_reward;
  try {
    ExactSolver exact(s.backtest.solver, options);
    exact_reward = run_backtest(s.backtest, data.messages, exact).reward;
  } catch (const OracleBudgetExceeded& e) {
    fmt::print(err, "oracle backtest skipped: {}\n", e.what());
  }
  for (std::size_t i = 0; i < pending.size(); ++i) dp_rewards[i] = pending[i].get();

  const fs::path dir = c.out.empty() ? fs::path("out") : fs::path(c.out);
  fs::create_directories(dir);
  const fs::path table = dir / "compare.csv";
  {
    std::ofstream csv(table, std::ios::binary);
    if (!csv) throw DataError(fmt::format("cannot write '{}'", table.string()));
    csv << "time_ms,products,dp_objective,exact_objective,gap,dp_us,exact_us,status\n";
    for (const SolveGap& g : gaps) {
      if (g.exact) {
        fmt::print(csv, "{},{},{},{},{},{:.1f},{:.1f},ok\n", g.time, g.products, g.dp, *g.exact,
                   *g.exact - g.dp, g.dp_us, g.exact_us);
      } else {
        fmt::print(csv, "{},{},{},,,{:.1f},,skipped\n", g.time, g.products, g.dp, g.dp_us);
      }
    }
  }

  std::size_t compared = 0;
  double max_gap = 0.0, sum_gap = 0.0, dp_us = 0.0, exact_us = 0.0;
  for (const SolveGap& g : gaps) {
    if (!g.exact) continue;
    ++compared;
    max_gap = std::max(max_gap, std::abs(*g.exact - g.dp));
    sum_gap += *g.exact - g.dp;
    dp_us += g.dp_us;
    exact_us += g.exact_us;
  }
  Summary summary{
      {"solves", std::to_string(gaps.size())},
      {"solves_compared", std::to_string(compared)},
      {"solves_skipped", std::to_string(gaps.size() - compared)},
      {"max_abs_gap", fmt::format("{:.6f}", max_gap)},
      {"mean_gap", fmt::format("{:.6f}", compared ? sum_gap / static_cast<double>(compared) : 0.0)},
      {"speed_ratio", fmt::format("{:.2f}", dp_us > 0.0 ? exact_us / dp_us : 0.0)},
      {"reward_exact", exact_reward ? fmt::format("{:.2f}", *exact_reward) : "skipped"},
  };
  for (std::size_t i = 0; i < f.grids.size(); ++i) {
    summary.emplace_back(fmt::format("reward_m{}", f.grids[i]), fmt::format("{:.2f}", dp_rewards[i]));
    if (exact_reward && *exact_reward != 0.0) {
      const double pct = 100.0 * (*exact_reward - dp_rewards[i]) / std::abs(*exact_reward);
      summary.emplace_back(fmt::format("gap_pct_m{}", f.grids[i]), fmt::format("{:.3f}", pct));
    }
  }
  summary.emplace_back("wall_s", fmt::format("{:.3f}", seconds_since(t0)));
  write_manifest(dir, {"compare", s.resolved, {f.data}, {table}, workers, seconds_since(t0)});
  print_summary(out, summary);
  return kExitOk;
}

int cmd_tune(const Common& c, const TuneFlags& f, std::ostream& out, std::ostream& err) {
  const auto t0 = Clock::now();
  KeyValues kv = gather(c);
  put(kv, "phi_lo", f.phi_lo);
  put(kv, "phi_hi", f.phi_hi);
  put(kv, "tol", f.tol);
  put(kv, "max_evals", f.max_evals);
  put(kv, "window", f.window);
  Settings s = resolve(kv);
  const ParsedStream data = load(f.data, s, err);
  s.tune.workers = resolve_workers(c);
  const TuneResult result = sliding_schedule(data.messages, s.tune);

  const fs::path dir = c.out.empty() ? fs::path("out") : fs::path(c.out);
  fs::create_directories(dir);
  const fs::path table = dir / "tune_report.csv";
  {
    std::ofstream csv(table, std::ios::binary);
    if (!csv) throw DataError(fmt::format("cannot write '{}'", table.string()));
    csv << "window,begin_iso,phi,evals,in_sample,out_of_sample,baseline,flags\n";
    for (const WindowReport& r : result.windows) {
      std::string flags;
      if (r.search.flat) flags += "flat;";
      if (r.search.budget_exhausted) flags += "budget;";
      if (r.search.scan_disagreement) flags += "scan;";
      fmt::print(csv, "{},{},{},{},{:.2f},{:.2f},{:.2f},{}\n", r.index, format_iso_utc(r.begin),
                 r.search.phi, r.search.evaluations, r.in_sample, r.out_of_sample, r.baseline, flags);
      if (r.search.budget_exhausted) fmt::print(err, "window {}: evaluation budget exhausted\n", r.index);
    }
  }
  write_manifest(dir, {"tune", s.resolved, {f.data}, {table}, s.tune.workers, seconds_since(t0)});
  print_summary(out, {
                         {"windows", std::to_string(result.windows.size())},
                         {"stitched_reward", fmt::format("{:.2f}", result.stitched_reward)},
                         {"baseline_reward", fmt::format("{:.2f}", result.baseline_reward)},
                         {"wall_s", fmt::format("{:.3f}", seconds_since(t0))},
                     });
  return kExitOk;
}

int cmd_gen(const Common& c, const GenFlags& f, std::ostream& out) {
  KeyValues kv = gather(c);
  const Settings s = resolve(kv);
  SyntheticFlowSpec spec;
  spec.seed = f.seed;
  spec.days = f.days;
  spec.background = !f.no_background;
  if (f.start) {
    try {
      spec.start = parse_iso_utc(*f.start);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(fmt::format("gen: bad --start: {}", e.what()));
    }
  }
  if (f.planted_pair) {
    // Ask 10 MWh @ 20 in the first product, bid 10 MWh @ 60 in the second, both from the start.
    const TimeMs at = spec.start - 2 * kHourMs;
    spec.planted.push_back({at, spec.start, spec.start + kHourMs, 2000, 6000,
                            static_cast<Lots>(std::llround(10.0 / s.backtest.solver.market.lot_mwh))});
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const std::vector<BookMessage> msgs = generate_synthetic(spec, s.backtest.solver.market);
  const fs::path path = c.out.empty() ? fs::path("stream.csv") : fs::path(c.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_stream(path, msgs, s.backtest.solver.market);
  print_summary(out, {{"messages", std::to_string(msgs.size())},
                      {"file", path.string()},
                      {"sha256", sha256_file(path)}});
  return kExitOk;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "Flat key=value config file")->check(CLI::ExistingFile);
  app->add_option("--set", c.sets, "Override one config key (key=value); repeatable");
  app->add_option("--workers", c.workers, "Parallel backtests (default: $RITRADE_WORKERS or 1)");
  app->add_option("--out", c.out, "Output directory (file for gen)");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rolling-intrinsic battery trading backtester"};
  app.require_subcommand(1);
  app.set_version_flag("--version", RITRADE_VERSION);

  Common common;
  RunFlags run;
  CompareFlags compare;
  TuneFlags tune;
  GenFlags gen;

  CLI::App* run_cmd = app.add_subcommand("run", "Backtest one message stream");
  add_common(run_cmd, common);
  run_cmd->add_option("--data", run.data, "Order-message CSV")->required();
  run_cmd->add_option("--solve-mode", run.solve_mode, "updates | interval:<minutes>");
  run_cmd->add_option("--delay-ms", run.delay_ms, "Technical delay in ms");
  run_cmd->add_option("--m", run.m, "Grid points of the value functions");
  run_cmd->add_option("--phi", run.phi, "Spread penalty");
  run_cmd->add_option("--solver", run.solver, "dp | exact");
  run_cmd->add_flag("--lenient", run.lenient, "Skip malformed rows instead of failing");

  CLI::App* cmp_cmd = app.add_subcommand("compare", "DP against the exact solver");
  add_common(cmp_cmd, common);
  cmp_cmd->add_option("--data", compare.data, "Order-message CSV")->required();
  cmp_cmd->add_option("--m", compare.grids, "Grid sizes to compare")->delimiter(',');
  cmp_cmd->add_option("--solve-mode", compare.solve_mode, "updates | interval:<minutes>");
  cmp_cmd->add_option("--delay-ms", compare.delay_ms, "Technical delay in ms");
  cmp_cmd->add_option("--budget", compare.budget, "Oracle state-action budget");

  CLI::App* tune_cmd = app.add_subcommand("tune", "Sliding-window training of phi");
  add_common(tune_cmd, common);
  tune_cmd->add_option("--data", tune.data, "Order-message CSV")->required();
  tune_cmd->add_option("--phi-lo", tune.phi_lo);
  tune_cmd->add_option("--phi-hi", tune.phi_hi);
  tune_cmd->add_option("--tol", tune.tol);
  tune_cmd->add_option("--max-evals", tune.max_evals);
  tune_cmd->add_option("--window", tune.window, "month | <days>d");

  CLI::App* gen_cmd = app.add_subcommand("gen", "Write a synthetic message stream");
  add_common(gen_cmd, common);
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--days", gen.days);
  gen_cmd->add_option("--start", gen.start, "First delivery, ISO UTC");
  gen_cmd->add_flag("--planted-pair", gen.planted_pair, "Add the two-product arbitrage pair");
  gen_cmd->add_flag("--no-background", gen.no_background, "Only planted orders");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(common, run, out, err);
    if (*cmp_cmd) return cmd_compare(common, compare, out, err);
    if (*tune_cmd) return cmd_tune(common, tune, out, err);
    if (*gen_cmd) return cmd_gen(common, gen, out);
  } catch (const ConfigError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitConfig;
  } catch (const DataError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitData;
  } catch (const BacktestError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitData;
  } catch (const std::invalid_argument& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace ritrade::cli
