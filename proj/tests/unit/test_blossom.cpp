#include "doctest.h"

#include "bpmatch/blossom.hpp"
#include "bpmatch/error.hpp"
#include "bpmatch/lp_relax.hpp"
#include "bpmatch/oracle.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <random>

using namespace bpmatch;
using namespace bpmatch::testing;

namespace {

struct loose_setup {
  weighted_graph g;
  lp_result lp;
  matching mstar;
  support_graph sg;
};

loose_setup prepare(weighted_graph g)
{
  loose_setup s{std::move(g), {}, {}, {}};
  s.lp = solve_lp(s.g);
  s.mstar = brute_force_max_matching(s.g).best;
  s.sg = support_graph_of(s.g, s.lp.x, s.mstar);
  return s;
}

certificate_fault fault_of(const blossom_certificate& c, const weighted_graph& g, const matching& m)
{
  try {
    verify_certificate(c, g, m);
  } catch (const certificate_error& e) {
    return e.fault();
  }
  FAIL("certificate unexpectedly verified");
  return certificate_fault::unknown_edge;
}

// Two triangles (a b c) and (d e f), bases a and d joined by edge a-d.
// Edges: ab ac bc de df ef ad.
weighted_graph triangle_pair()
{
  return make_graph(6, {{0, 1, "1.0"},
                        {0, 2, "1.1"},
                        {1, 2, "1.2"},
                        {3, 4, "1.0"},
                        {3, 5, "1.1"},
                        {4, 5, "1.2"},
                        {0, 3, "0.5"}});
}

} // namespace

TEST_CASE("support graph of the loose triangle")
{
  auto s = prepare(loose_triangle());
  REQUIRE_FALSE(s.lp.tight());
  CHECK(s.mstar.edges().size() == 1);
  CHECK(s.mstar.contains(2));
  CHECK(s.sg.edges() == std::vector<edge_id>{0, 1, 2});
  CHECK(s.sg.kind[1] == node_class::unsaturated);
  CHECK(s.sg.kind[0] == node_class::interior);
  CHECK(s.sg.kind[2] == node_class::interior);
  CHECK_FALSE(find_augmentation(s.g, s.sg, s.mstar).has_value());
}

TEST_CASE("support graph of the loose 5-cycle")
{
  auto s = prepare(loose_c5());
  CHECK(s.sg.edges().size() == 5);
  // M* = {2-3 (1.2), 4-0 (1.4)}
  CHECK(s.mstar.contains(2));
  CHECK(s.mstar.contains(4));
  CHECK(s.sg.kind[1] == node_class::unsaturated);
}

TEST_CASE("support graph rejects a tight solution")
{
  auto g = path_abc();
  auto lp = solve_lp(g);
  REQUIRE(lp.tight());
  CHECK_THROWS_AS(support_graph_of(g, lp.x, integral_support(g, lp)), precondition_error);
  CHECK_THROWS_AS(support_graph_of(g, {rational(1)}, matching{}), precondition_error);
}

TEST_CASE("find_augmentation negative controls")
{
  SUBCASE("alternating 4-cycle")
  {
    auto g = four_cycle_3131();
    auto m = matching_of(g, {0, 2});
    std::vector<rational> x(4, rational(1, 2));
    auto sg = support_graph_of(g, x, m);
    auto aug = find_augmentation(g, sg, m);
    REQUIRE(aug.has_value());
    CHECK(aug->kind == component_kind::cycle);
    CHECK(aug->edges.size() == 4);
    CHECK(aug->nodes.front() == aug->nodes.back());
  }
  SUBCASE("path between unsaturated nodes")
  {
    auto g = make_graph(4, {{0, 1, "1"}, {1, 2, "1"}, {2, 3, "1"}});
    auto m = matching_of(g, {1});
    std::vector<rational> x{rational(1, 2), rational(1, 2), rational(1, 2)};
    auto sg = support_graph_of(g, x, m);
    auto aug = find_augmentation(g, sg, m);
    REQUIRE(aug.has_value());
    CHECK(aug->kind == component_kind::path);
    CHECK(aug->edges == std::vector<edge_id>{0, 1, 2});
    CHECK(aug->in_first == std::vector<bool>{false, true, false});
  }
}

TEST_CASE("certificate for the loose triangle")
{
  auto s = prepare(loose_triangle());
  auto c = find_bad_certificate(s.g, s.sg, s.mstar);
  CHECK(c.kind == certificate_kind::stemmed_blossom);
  CHECK(c.cycle == std::vector<edge_id>{0, 2, 1});
  CHECK(c.path.empty());
  CHECK(c.margin == rational(9, 10));
  CHECK(verify_certificate(c, s.g, s.mstar) == rational(9, 10));
  CHECK(blossom_base(s.g, s.mstar, c.cycle) == node_id{1});
  CHECK(format_certificate(c, s.g) ==
        "kind stemmed_blossom\ncycle 0-1 2-0 1-2\npath\nmargin 9/10\n");
}

TEST_CASE("certificate for the loose 5-cycle")
{
  auto s = prepare(loose_c5());
  auto c = find_bad_certificate(s.g, s.sg, s.mstar);
  CHECK(c.kind == certificate_kind::stemmed_blossom);
  CHECK(c.cycle.size() == 5);
  CHECK(c.path.empty());
  // (1.0 + 1.1 + 1.3) - (1.2 + 1.4)
  CHECK(c.margin == rational(4, 5));
  CHECK(blossom_base(s.g, s.mstar, c.cycle) == node_id{1});
}

TEST_CASE("certificate for two triangles joined at their bases")
{
  auto s = prepare(triangle_pair());
  REQUIRE_FALSE(s.lp.tight());
  CHECK(s.mstar.edges().size() == 3);
  REQUIRE_FALSE(find_augmentation(s.g, s.sg, s.mstar).has_value());
  auto c = find_bad_certificate(s.g, s.sg, s.mstar);
  CHECK(c.kind == certificate_kind::blossom_pair);
  CHECK(c.path == std::vector<edge_id>{6});
  // 0.9 + 0.9 - 2 * 0.5
  CHECK(c.margin == rational(4, 5));
  CHECK(verify_certificate(c, s.g, s.mstar) == rational(4, 5));
  CHECK_THROWS_AS(tree_refutation(c, s.g, s.mstar, 2), precondition_error);
}

TEST_CASE("certificate for triangles joined by a three-edge path")
{
  // a-g and h-d matched, g-h not; pair margin 1.8 + 2(0.6) - 2(1.0) = 1.
  auto g = make_graph(8, {{0, 1, "1.0"},
                          {0, 2, "1.1"},
                          {1, 2, "1.2"},
                          {3, 4, "1.0"},
                          {3, 5, "1.1"},
                          {4, 5, "1.2"},
                          {0, 6, "0.5"},
                          {6, 7, "0.6"},
                          {7, 3, "0.5"}});
  auto s = prepare(g);
  auto c = find_bad_certificate(s.g, s.sg, s.mstar);
  CHECK(c.kind == certificate_kind::blossom_pair);
  CHECK(c.path.size() == 3);
  CHECK(c.margin == 1);
}

TEST_CASE("verify_certificate reports each defect")
{
  auto s = prepare(loose_triangle());
  blossom_certificate good{certificate_kind::stemmed_blossom, {0, 2, 1}, {}, {}, rational(9, 10)};
  CHECK(verify_certificate(good, s.g, s.mstar) == rational(9, 10));

  auto bad = good;
  bad.margin = 1;
  CHECK(fault_of(bad, s.g, s.mstar) == certificate_fault::margin_mismatch);

  bad = good;
  bad.cycle = {0, 9, 1};
  CHECK(fault_of(bad, s.g, s.mstar) == certificate_fault::unknown_edge);

  bad = good;
  bad.cycle = {0, 1};
  CHECK(fault_of(bad, s.g, s.mstar) == certificate_fault::cycle_not_closed);

  // Even cycle on the 4-cycle.
  auto c4 = four_cycle_3131();
  auto m4 = matching_of(c4, {0, 2});
  blossom_certificate even{certificate_kind::stemmed_blossom, {0, 1, 2, 3}, {}, {}, 0};
  CHECK(fault_of(even, c4, m4) == certificate_fault::cycle_even);

  // Not bad: heavy matched edge.
  auto heavy = triangle("1", "1", "3");
  auto mh = matching_of(heavy, {2});
  blossom_certificate weak{certificate_kind::stemmed_blossom, {0, 2, 1}, {}, {}, -1};
  CHECK(fault_of(weak, heavy, mh) == certificate_fault::not_bad);

  // Wrong number of matched edges.
  CHECK(fault_of(good, s.g, matching{}) == certificate_fault::not_a_blossom);

  // Stems: triangle 0-1-2 with base 1, stem 1-3 (matched) 3-4 (unmatched).
  auto st = make_graph(5, {{0, 1, "1.0"}, {1, 2, "1.1"}, {0, 2, "1.2"}, {1, 3, "1"}, {3, 4, "5"}});
  auto ms = matching_of(st, {2, 3});
  blossom_certificate stem{certificate_kind::stemmed_blossom, {0, 2, 1}, {}, {3}, 0};
  stem.margin = badness_margin(st, ms, stem);
  CHECK(stem.margin == rational(-11, 10));
  CHECK(fault_of(stem, st, ms) == certificate_fault::not_bad);
  stem.path = {3, 4};
  stem.margin = badness_margin(st, ms, stem);
  CHECK(sgn(stem.margin) > 0);
  CHECK(verify_certificate(stem, st, ms) == stem.margin);
  stem.path = {4};
  CHECK(fault_of(stem, st, ms) == certificate_fault::path_misrooted);
  stem.path = {3, 3};
  CHECK(fault_of(stem, st, ms) == certificate_fault::path_not_alternating);
  // Empty stem but the base is matched outside the cycle.
  blossom_certificate bare{certificate_kind::stemmed_blossom, {0, 2, 1}, {}, {}, rational(9, 10)};
  CHECK(fault_of(bare, st, ms) == certificate_fault::path_end_saturated);
  // Stem ending on an unmatched edge at a saturated node.
  auto st2 = make_graph(6, {{0, 1, "1.0"}, {1, 2, "1.1"}, {0, 2, "1.2"}, {1, 3, "1"}, {3, 4, "5"},
                            {4, 5, "1"}});
  auto ms2 = matching_of(st2, {2, 3, 5});
  blossom_certificate sat{certificate_kind::stemmed_blossom, {0, 2, 1}, {}, {3, 4}, 0};
  sat.margin = badness_margin(st2, ms2, sat);
  CHECK(fault_of(sat, st2, ms2) == certificate_fault::path_end_saturated);
  // Stem running back into the cycle.
  auto loop = make_graph(4, {{0, 1, "1.0"}, {1, 2, "1.1"}, {0, 2, "1.2"}, {1, 3, "1"}, {3, 0, "9"}});
  auto ml = matching_of(loop, {2, 3});
  blossom_certificate back{certificate_kind::stemmed_blossom, {0, 2, 1}, {}, {3, 4}, 0};
  back.margin = badness_margin(loop, ml, back);
  CHECK(fault_of(back, loop, ml) == certificate_fault::overlap);
}

TEST_CASE("tree refutation of the triangle")
{
  auto s = prepare(loose_triangle());
  auto c = find_bad_certificate(s.g, s.sg, s.mstar);
  auto r = tree_refutation(c, s.g, s.mstar, 3);
  CHECK(r.root == 2);
  CHECK(r.tree.depth() == 6);
  CHECK(r.gain == rational(9, 10));
  CHECK(r.d1 + r.d2 - s.g.edge_at(2).weight == r.gain);
  CHECK(r.improved.weight - r.projected.weight == rational(9, 10));
  CHECK(is_tree_matching(r.tree, r.improved.edges));
  CHECK(tree_optimal_matching(r.tree).weight >= r.improved.weight);
  // Each lifted path takes one step round the cycle and ends at a base copy.
  REQUIRE(r.first_path.size() == 1);
  REQUIRE(r.second_path.size() == 1);
  CHECK(r.tree.node(r.tree.edge_at(r.first_path[0]).lower).copy_of == 1);
  CHECK(r.tree.node(r.tree.edge_at(r.second_path[0]).lower).copy_of == 1);

  CHECK_THROWS_AS(tree_refutation(c, s.g, s.mstar, 0), precondition_error);
}

TEST_CASE("tree refutation with a stem")
{
  // Triangle base 1 with stem 1-3 (matched) 3-4 (heavy unmatched).
  auto g = make_graph(5, {{0, 1, "1.0"}, {1, 2, "1.1"}, {0, 2, "1.2"}, {1, 3, "1"}, {3, 4, "5"}});
  auto m = matching_of(g, {2, 3});
  blossom_certificate c{certificate_kind::stemmed_blossom, {0, 2, 1}, {}, {3, 4}, 0};
  c.margin = badness_margin(g, m, c);
  auto r = tree_refutation(c, g, m, 2);
  CHECK(r.gain == c.margin);
  CHECK(r.first_path.size() == 3);
  CHECK(r.second_path.size() == 3);
}

TEST_CASE("property: every loose instance has a verified bad structure")
{
  std::mt19937_64 rng(1717);
  int loose = 0, pairs = 0;
  for (int trial = 0; trial < 400 && loose < 60; ++trial) {
    auto g = random_graph(rng, 7, 0.5, 20, true);
    if (g.edge_count() == 0 || g.edge_count() > 16)
      continue;
    auto lp = solve_lp(g);
    if (lp.tight())
      continue;
    auto oracle = brute_force_max_matching(g);
    REQUIRE(oracle.unique);
    ++loose;
    auto sg = support_graph_of(g, lp.x, oracle.best);
    REQUIRE_FALSE(find_augmentation(g, sg, oracle.best).has_value());
    auto c = find_bad_certificate(g, sg, oracle.best);
    REQUIRE(verify_certificate(c, g, oracle.best) == c.margin);
    REQUIRE(sgn(c.margin) > 0);
    if (c.kind == certificate_kind::blossom_pair) {
      ++pairs;
    } else if (tree_edge_count(g, c.cycle.front(), 2 + static_cast<std::uint32_t>(g.node_count())) <
               200000) {
      auto r = tree_refutation(c, g, oracle.best, 2);
      REQUIRE(r.gain == c.margin);
    }

    // The exhaustive enumeration over the support graph agrees that
    // nothing beats the returned margin.
    rational best(0);
    for_each_blossom_structure(
        g, oracle.best,
        [&](const blossom_certificate& x) {
          if (x.margin > best)
            best = x.margin;
          return true;
        },
        &sg.in_support);
    REQUIRE(best == c.margin);
  }
  CHECK(loose >= 30);
  MESSAGE("loose ", loose, ", blossom pairs ", pairs);
}

TEST_CASE("property: tight instances have no bad structure")
{
  std::mt19937_64 rng(606);
  int tight = 0;
  for (int trial = 0; trial < 120; ++trial) {
    auto g = random_graph(rng, 8, 0.4, 20, true);
    if (g.edge_count() == 0 || g.edge_count() > 16)
      continue;
    auto lp = solve_lp(g);
    if (!lp.tight())
      continue;
    ++tight;
    auto m = integral_support(g, lp);
    std::size_t seen = 0;
    for_each_blossom_structure(g, m, [&](const blossom_certificate& x) {
      ++seen;
      REQUIRE(sgn(x.margin) <= 0);
      REQUIRE(x.margin == badness_margin(g, m, x));
      return true;
    });
  }
  CHECK(tight > 40);
}

TEST_CASE("enumerated structures are well formed")
{
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    auto g = random_graph(rng, 7, 0.5, 20, true);
    if (g.edge_count() == 0 || g.edge_count() > 14)
      continue;
    auto m = brute_force_max_matching(g).best;
    for_each_blossom_structure(g, m, [&](const blossom_certificate& x) {
      if (sgn(x.margin) > 0)
        REQUIRE(verify_certificate(x, g, m) == x.margin);
      else
        REQUIRE(fault_of(x, g, m) == certificate_fault::not_bad);
      return true;
    });
  }
}
