#include <benchmark/benchmark.h>

#include "linenet/experiments.hpp"
#include "linenet/network.hpp"
#include "linenet/routing.hpp"
#include "linenet/sampler.hpp"

using namespace linenet;

static void BM_SampleProcess(benchmark::State& state) {
  const double v_min = 1.0 / static_cast<double>(state.range(0));
  std::uint64_t seed = 0;
  std::size_t lines = 0;
  for (auto _ : state) {
    const auto s = sample_process(ProcessParams{2, 3.0, Ball(origin(2), 1.5), v_min, seed++});
    lines += s.size();
    benchmark::DoNotOptimize(s.lines.data());
  }
  state.counters["lines"] = benchmark::Counter(static_cast<double>(lines), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_SampleProcess)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

static void BM_BuildNetwork2d(benchmark::State& state) {
  const double v_min = 1.0 / static_cast<double>(state.range(0));
  const auto s = sample_process(ProcessParams{2, 3.0, Ball(origin(2), 1.5), v_min, 7});
  const auto terms = internal_net(Ball(origin(2), 0.5), 0.24);
  std::size_t nodes = 0;
  for (auto _ : state) {
    const auto net = build_network_2d(s, terms, v_min);
    nodes = net.node_count();
    benchmark::DoNotOptimize(nodes);
  }
  state.counters["lines"] = static_cast<double>(s.size());
  state.counters["nodes"] = static_cast<double>(nodes);
}
BENCHMARK(BM_BuildNetwork2d)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

static void BM_ShortestTimes(benchmark::State& state) {
  const double v_min = 1.0 / static_cast<double>(state.range(0));
  const auto s = sample_process(ProcessParams{2, 3.0, Ball(origin(2), 1.5), v_min, 7});
  const auto terms = internal_net(Ball(origin(2), 0.5), 0.24);
  const auto net = build_network_2d(s, terms, v_min);
  for (auto _ : state) {
    const auto tree = shortest_times(net, net.terminal(0));
    benchmark::DoNotOptimize(tree);
  }
  state.counters["nodes"] = static_cast<double>(net.node_count());
}
BENCHMARK(BM_ShortestTimes)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

static void BM_BuildNetworkJump(benchmark::State& state) {
  const double v_min = 1.0 / static_cast<double>(state.range(0));
  const auto s = sample_process(ProcessParams{3, 4.0, Ball(origin(3), 1.0), v_min, 7});
  JumpOptions opt;
  opt.eps = 0.05;
  for (auto _ : state) {
    const auto net = build_network_jump(s, std::vector<Vec>{}, opt);
    benchmark::DoNotOptimize(net.edge_count());
  }
  state.counters["lines"] = static_cast<double>(s.size());
}
BENCHMARK(BM_BuildNetworkJump)->Arg(2)->Arg(4)->Arg(8);

BENCHMARK_MAIN();
