#include "bpmatch/blossom.hpp"
#include "bpmatch/comp_tree.hpp"
#include "bpmatch/harness.hpp"
#include "bpmatch/lp_relax.hpp"
#include "bpmatch/max_product.hpp"
#include "bpmatch/oracle.hpp"

#include <benchmark/benchmark.h>

using namespace bpmatch;

namespace {

weighted_graph instance(std::size_t nodes, std::uint64_t seed, std::size_t max_edges = 24)
{
  instance_spec s;
  s.kind = instance_kind::random_general;
  s.nodes = nodes;
  s.edge_probability = 0.4;
  s.seed = seed;
  s.max_edges = max_edges;
  return generate(s, max_edges).graph;
}

void bm_oracle(benchmark::State& state)
{
  auto g = instance(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(brute_force_max_matching(g));
  state.counters["edges"] = static_cast<double>(g.edge_count());
}
BENCHMARK(bm_oracle)->Arg(6)->Arg(9)->Arg(12);

void bm_lp(benchmark::State& state)
{
  auto g = instance(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_lp(g));
  state.counters["edges"] = static_cast<double>(g.edge_count());
}
BENCHMARK(bm_lp)->Arg(6)->Arg(9)->Arg(12);

void bm_max_product_sync(benchmark::State& state)
{
  auto g = instance(static_cast<std::size_t>(state.range(0)), 3);
  run_options opts;
  opts.max_steps = 200;
  for (auto _ : state)
    benchmark::DoNotOptimize(run_max_product(g, schedule::synchronous(), opts));
}
BENCHMARK(bm_max_product_sync)->Arg(6)->Arg(12);

void bm_max_product_loose_triangle(benchmark::State& state)
{
  instance_spec s;
  s.kind = instance_kind::odd_cycle;
  s.nodes = 3;
  auto g = generate(s).graph;
  run_options opts;
  opts.max_steps = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(run_max_product(g, schedule::synchronous(), opts));
}
BENCHMARK(bm_max_product_loose_triangle)->Arg(100)->Arg(1000);

void bm_tree_dp(benchmark::State& state)
{
  auto g = instance(8, 4);
  auto t = build_tree(g, 0, static_cast<std::uint32_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(tree_optimal_matching(t));
  state.counters["tree_edges"] = static_cast<double>(t.edge_count());
}
BENCHMARK(bm_tree_dp)->Arg(3)->Arg(5)->Arg(7);

void bm_certificate(benchmark::State& state)
{
  instance_spec s;
  s.kind = instance_kind::blossom_gadget;
  s.cycle_length = static_cast<std::size_t>(state.range(0));
  s.stem_length = 4;
  auto g = generate(s).graph;
  auto lp = solve_lp(g);
  auto mstar = brute_force_max_matching(g).best;
  auto sg = support_graph_of(g, lp.x, mstar);
  for (auto _ : state)
    benchmark::DoNotOptimize(find_bad_certificate(g, sg, mstar));
}
BENCHMARK(bm_certificate)->Arg(3)->Arg(7)->Arg(11);

} // namespace
BENCHMARK_MAIN();
