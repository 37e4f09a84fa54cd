#include <benchmark/benchmark.h>

#include <algorithm>
#include <cstdint>

#include "epiwalk/engine.hpp"
#include "epiwalk/graph.hpp"
#include "epiwalk/rng.hpp"
#include "epiwalk/weights.hpp"

using namespace epiwalk;

namespace {

WeightedGraph bench_graph(std::size_t n) {
  GraphParams params{n, 0.15, 0.0, 1.2, 0.002, 12345};
  params.p_r = 0.0;
  params.p_R = 0.0;
  const auto positions = generate_graph(params).positions();
  params.p_r = calibrate_bond_probability(positions, 0.15, false, 20.0);
  params.p_R = 0.002;
  return assign_baseline_weights(generate_graph(params, positions), WeightPolicy{0.1, 0.1});
}

void bm_generate_graph(benchmark::State& state) {
  GraphParams params{static_cast<std::size_t>(state.range(0)), 0.15, 0.2, 1.2, 0.002, 99};
  for (auto _ : state) {
    WeightedGraph g = generate_graph(params);
    benchmark::DoNotOptimize(g.n_bonds());
    ++params.seed;  // fresh layout each iteration
  }
}
BENCHMARK(bm_generate_graph)->Arg(200)->Arg(500)->Arg(1000);

void bm_transfer_matrix_build(benchmark::State& state) {
  const WeightedGraph g = bench_graph(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    TransferMatrix t(g);
    benchmark::DoNotOptimize(t.n());
  }
}
BENCHMARK(bm_transfer_matrix_build)->Arg(200)->Arg(500)->Arg(1000);

void bm_transfer_matrix_apply(benchmark::State& state) {
  const WeightedGraph g = bench_graph(static_cast<std::size_t>(state.range(0)));
  const TransferMatrix t(g);
  std::vector<double> x = init_state(g, 0, 100).eta_vector();
  for (auto _ : state) {
    x = t.apply(x);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(bm_transfer_matrix_apply)->Arg(200)->Arg(500)->Arg(1000);

void bm_step_stochastic(benchmark::State& state) {
  const WeightedGraph g = bench_graph(static_cast<std::size_t>(state.range(0)));
  Rng rng(7);
  EpidemicState s = init_state(g, 0, 100);
  for (auto _ : state) {
    step_stochastic(s, g, rng);
    benchmark::DoNotOptimize(s.n_walkers);
    if (std::count(s.infected.begin(), s.infected.end(), std::uint8_t{1}) == 0)
      s = init_state(g, 0, 100);  // reignite after extinction
  }
}
BENCHMARK(bm_step_stochastic)->Arg(200)->Arg(500)->Arg(1000);

void bm_full_run(benchmark::State& state) {
  const WeightedGraph g = bench_graph(500);
  RunOptions opts;
  opts.record_history = false;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Rng rng(seed_combine(1, seed++));
    RunResult r = run(g, 0, static_cast<std::size_t>(state.range(0)), rng, opts);
    benchmark::DoNotOptimize(r.trace.n_steps());
  }
}
BENCHMARK(bm_full_run)->Arg(50)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
