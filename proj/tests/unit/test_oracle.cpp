#include "doctest.h"

#include "bpmatch/error.hpp"
#include "bpmatch/oracle.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <random>

using namespace bpmatch;
using namespace bpmatch::testing;

TEST_CASE("oracle: loose triangle picks the heaviest edge")
{
  auto g = loose_triangle();
  auto subsets = max_matching_by_subsets(g);
  REQUIRE(subsets.weight == rational(6, 5));
  REQUIRE(subsets.optimal_count == 1);

  auto r = brute_force_max_matching(g);
  CHECK(r.best == matching_of(g, {2}));
  CHECK(r.best_weight == rational(6, 5));
  CHECK(r.unique);
  CHECK(r.runner_up_weight == rational(11, 10));
}

TEST_CASE("oracle: 4-cycle 3,1,3,1")
{
  auto g = four_cycle_3131();
  auto r = brute_force_max_matching(g);
  CHECK(r.best == matching_of(g, {0, 2}));
  CHECK(r.best_weight == 6);
  CHECK(r.unique);
}

TEST_CASE("oracle: zero-weight edge ties with the empty matching")
{
  auto g = single_edge("0");
  auto r = brute_force_max_matching(g);
  CHECK(r.best_weight == 0);
  CHECK_FALSE(r.unique);
  CHECK(r.runner_up_weight == rational(0));
  // Lexicographic tie-break: the empty set precedes {e}.
  CHECK(r.best.empty());
}

TEST_CASE("check_a1")
{
  CHECK_FALSE(check_a1(triangle("1", "1", "1")));
  CHECK(check_a1(loose_triangle()));
  CHECK(check_a1(weighted_graph(4, {})));
  auto empty = brute_force_max_matching(weighted_graph(0, {}));
  CHECK(empty.unique);
  CHECK_FALSE(empty.runner_up_weight.has_value());
}

TEST_CASE("oracle enforces its edge limit")
{
  std::mt19937_64 rng(3);
  auto g = random_graph(rng, 10, 0.9, 5);
  REQUIRE(g.edge_count() > 24);
  CHECK_THROWS_AS(brute_force_max_matching(g), size_limit_error);
  CHECK_NOTHROW(brute_force_max_matching(g, 64));
}

TEST_CASE("property: branch and bound agrees with subset enumeration")
{
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 150; ++trial) {
    // Small integer weights without offsets produce plenty of ties.
    bool perturb = trial % 2 == 0;
    auto g = random_graph(rng, 3 + trial % 6, 0.55, 4, perturb);
    if (g.edge_count() > 14)
      continue;
    auto ref = max_matching_by_subsets(g);
    auto r = brute_force_max_matching(g);
    REQUIRE(r.best_weight == ref.weight);
    REQUIRE(r.unique == (ref.optimal_count == 1));
    REQUIRE(std::vector<edge_id>(r.best.edges().begin(), r.best.edges().end()) ==
            ref.lexicographically_first);
    if (r.runner_up_weight)
      REQUIRE(r.unique == (*r.runner_up_weight < r.best_weight));
    for (const auto& set : all_matchings(g)) {
      rational w;
      for (edge_id e : set)
        w += g.edge_at(e).weight;
      REQUIRE(w <= r.best_weight);
    }
  }
}
