#ifndef BPMATCH_TESTS_FIXTURES_HPP
#define BPMATCH_TESTS_FIXTURES_HPP

#include "bpmatch/graph.hpp"

#include <random>
#include <string>
#include <tuple>
#include <vector>

namespace bpmatch::testing {

rational q(const std::string& text);

/// Graph from (u, v, "w") triples on `n` nodes.
weighted_graph make_graph(std::size_t n,
                          const std::vector<std::tuple<node_id, node_id, std::string>>& edges);

/// Triangle 0-1 (w01), 1-2 (w12), 0-2 (w02).
weighted_graph triangle(const std::string& w01, const std::string& w12, const std::string& w02);
/// Cycle 0-1-...-(k-1)-0; edge i joins i and i+1 mod k.
weighted_graph cycle(const std::vector<std::string>& weights);
/// Path a-b-c with weights (2, 1): edges ab = 0, bc = 1.
weighted_graph path_abc();
/// 4-cycle abcd with ab=3, bc=1, cd=3, da=1.
weighted_graph four_cycle_3131();
/// Triangle weights 1.0, 1.1, 1.2 in edge order.
weighted_graph loose_triangle();
/// 5-cycle weights 1.0 .. 1.4 in edge order.
weighted_graph loose_c5();
weighted_graph single_edge(const std::string& w);

/// G(n, p) with integer weights in [1, max_weight] plus a small distinct
/// per-edge offset so that optima are generically unique.
weighted_graph random_graph(std::mt19937_64& rng, std::size_t n, double p, int max_weight,
                            bool perturb = true);
/// Uniform random labelled tree (random parent for each node), weights 1..max_weight.
weighted_graph random_tree(std::mt19937_64& rng, std::size_t n, int max_weight);

matching matching_of(const weighted_graph& g, std::vector<edge_id> edges);

} // namespace bpmatch::testing

#endif
