#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "cuesync/offset_kernels.hpp"

using namespace cuesync;

namespace {

const SchedulerParams kParams{1000, 4000, true};

struct Case {
  std::vector<Token> tokens;
  BoundaryList boundaries;
};

// Music-like stream: mostly notes and short shifts, a CHORD every few seconds,
// and one boundary per CHORD region plus some unmatched ones.
Case make_case(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> steps(1, 60);
  Case c;
  c.tokens.push_back(Token::start());
  Millis t = 0;
  std::vector<Millis> b;
  while (c.tokens.size() < n) {
    const double r = u(rng);
    if (r < 0.4) {
      const int s = 8 * steps(rng);
      c.tokens.push_back(Token::time_shift(s));
      t += s;
    } else if (r < 0.42) {
      c.tokens.push_back(Token::chord());
      b.push_back(t + static_cast<Millis>(u(rng) * 1600) - 800);
    } else {
      c.tokens.push_back(Token::on(Instrument::Piano, 60));
    }
    if (u(rng) < 0.005) b.push_back(t + 3000);
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  b.erase(std::remove_if(b.begin(), b.end(), [](Millis x) { return x < 0; }), b.end());
  c.boundaries = BoundaryList::from_millis(b);
  return c;
}

void BM_Stepwise(benchmark::State& state) {
  const auto c = make_case(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(stepwise_offsets_ms(c.tokens, c.boundaries, kParams));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Grid(benchmark::State& state) {
  const auto c = make_case(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(offsets_for_sequence(c.tokens, c.boundaries, kParams));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Batch(benchmark::State& state) {
  std::vector<Case> cases;
  for (std::uint64_t i = 0; i < 64; ++i) cases.push_back(make_case(static_cast<std::size_t>(state.range(0)), i));
  std::vector<OffsetJob> jobs;
  for (const auto& c : cases) jobs.push_back({c.tokens, &c.boundaries});
  for (auto _ : state) benchmark::DoNotOptimize(offsets_for_batch(jobs, kParams));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 64);
}

}  // namespace

BENCHMARK(BM_Stepwise)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_Grid)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_Batch)->RangeMultiplier(4)->Range(1 << 10, 1 << 14);

BENCHMARK_MAIN();
