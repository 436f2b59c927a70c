// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "perco/generators.hpp"
#include "perco/percolation.hpp"
#include "perco/rng.hpp"
#include "perco/spectral.hpp"
#include "perco/walks.hpp"

using namespace perco;

namespace {

const Graph& cubic() {
  static const Graph g = random_regular(100'000, 3, 1);
  return g;
}

const RootedBall& fp_ball() {
  static const RootedBall b = free_product_ball(7, 7);
  return b;
}

std::vector<double> vec(std::size_t n, std::uint64_t seed) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = hashed_uniform(seed, i);
  return x;
}

template <bool Parallel>
void BM_percolation_trials(benchmark::State& state) {
  const Graph& g = cubic();
  for (auto _ : state) {
    auto r = Parallel ? percolation_trials(g, 0.5, 16, 3) : serial::percolation_trials(g, 0.5, 16, 3);
    benchmark::DoNotOptimize(r.data());
  }
}

template <bool Parallel>
void BM_root_reach(benchmark::State& state) {
  const RootedBall& b = fp_ball();
  for (auto _ : state) {
    auto r = Parallel ? root_reach(b, 0.3, 2000, 3) : serial::root_reach(b, 0.3, 2000, 3);
    benchmark::DoNotOptimize(r.data());
  }
}

template <bool Parallel>
void BM_walk_apply(benchmark::State& state) {
  const WalkOperator op(cubic(), 1.0 / 3.0, true);
  const auto x = vec(op.size(), 5);
  std::vector<double> y(op.size());
  for (auto _ : state) {
    if (Parallel)
      op.apply(x, y);
    else
      serial::apply(op, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

template <bool Parallel>
void BM_blocked_dot(benchmark::State& state) {
  const auto x = vec(1 << 22, 1), y = vec(1 << 22, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Parallel ? blocked_dot(x, y) : serial::blocked_dot(x, y));
}

template <bool Parallel>
void BM_escape_mc(benchmark::State& state) {
  EscapeQuery q;
  q.ball = std::make_shared<const RootedBall>(fp_ball());
  std::vector<Vertex> A;
  for (Vertex v = 0; v < q.ball->graph.vertex_count(); ++v)
    if (q.ball->dist[v] <= 1) A.push_back(v);
  q.A = VertexSet(q.ball->graph.vertex_count(), A);
  q.trials = 20'000;
  q.seed = 4;
  for (auto _ : state) {
    auto r = Parallel ? escape_mc(q) : serial::escape_mc(q);
    benchmark::DoNotOptimize(r.estimate);
  }
}

}  // namespace

BENCHMARK(BM_percolation_trials<true>)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_percolation_trials<false>)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_root_reach<true>)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_root_reach<false>)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_walk_apply<true>)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_walk_apply<false>)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_blocked_dot<true>)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_blocked_dot<false>)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_escape_mc<true>)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_escape_mc<false>)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
