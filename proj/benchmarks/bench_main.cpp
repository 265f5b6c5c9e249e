#include "ritrade/engine.hpp"
#include "ritrade/intrinsic_dp.hpp"
#include "ritrade/lob.hpp"
#include "ritrade/oracle.hpp"
#include "ritrade/synthetic.hpp"

#include "support/builders.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <map>
#include <random>

namespace {

using namespace ritrade;
namespace tb = ritrade::testing;

Snapshot wide_snapshot(int products, int depth) {
  std::mt19937_64 rng(3);
  Snapshot s;
  s.soc = 4.0;
  for (int t = 0; t < products; ++t) {
    const Cents mid = 5000 + static_cast<Cents>(2000.0 * std::sin(t / 4.0));
    s.products.push_back(tb::product((t + 1) * kHourMs, tb::random_side(rng, depth, mid + 50, 40, true, 20),
                                     tb::random_side(rng, depth, mid - 50, 40, false, 20)));
  }
  return s;
}

void BM_IntrinsicSolve(benchmark::State& state) {
  const Snapshot s = wide_snapshot(32, 50);
  SolverParams p;
  p.grid_size = static_cast<int>(state.range(0));
  IntrinsicDp dp(p);
  for (auto _ : state) benchmark::DoNotOptimize(dp.solve(s).objective);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_IntrinsicSolve)->Arg(11)->Arg(51)->Arg(101);

void BM_ExactSolve(benchmark::State& state) {
  const Snapshot s = wide_snapshot(static_cast<int>(state.range(0)), 10);
  const SolverParams p = tb::small_params(1.0, 1.0, 0.95, 0.09, 4.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_exact(s, p).objective);
}
BENCHMARK(BM_ExactSolve)->Arg(4)->Arg(8)->Arg(16);

void BM_BookReplay(benchmark::State& state) {
  SyntheticFlowSpec spec;
  spec.days = 7;
  const auto stream = generate_synthetic(spec);
  for (auto _ : state) {
    std::map<ProductId, OrderBook> books;
    for (const BookMessage& m : stream) {
      auto [it, _] = books.try_emplace(m.order.product, m.order.product);
      benchmark::DoNotOptimize(it->second.apply(m));
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(stream.size()));
}
BENCHMARK(BM_BookReplay)->Unit(benchmark::kMillisecond);

void BM_BacktestWeek(benchmark::State& state) {
  SyntheticFlowSpec spec;
  spec.days = 7;
  const auto stream = generate_synthetic(spec);
  BacktestConfig c;
  for (auto _ : state) benchmark::DoNotOptimize(run_backtest(c, stream).reward);
}
BENCHMARK(BM_BacktestWeek)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
