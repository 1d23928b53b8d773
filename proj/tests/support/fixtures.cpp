#include "fixtures.hpp"

#include "bpmatch/error.hpp"

namespace bpmatch::testing {

rational q(const std::string& text)
{
  auto r = parse_rational(text);
  if (!r)
    throw precondition_error("bad rational literal in test: " + text);
  return *r;
}

weighted_graph make_graph(std::size_t n,
                          const std::vector<std::tuple<node_id, node_id, std::string>>& edges)
{
  std::vector<edge> es;
  for (const auto& [u, v, w] : edges)
    es.push_back(edge{u, v, q(w)});
  return weighted_graph(n, std::move(es));
}

weighted_graph triangle(const std::string& w01, const std::string& w12, const std::string& w02)
{
  return make_graph(3, {{0, 1, w01}, {1, 2, w12}, {0, 2, w02}});
}

weighted_graph cycle(const std::vector<std::string>& weights)
{
  std::vector<std::tuple<node_id, node_id, std::string>> es;
  const auto k = static_cast<node_id>(weights.size());
  for (node_id i = 0; i < k; ++i)
    es.emplace_back(i, (i + 1) % k, weights[i]);
  return make_graph(k, es);
}

weighted_graph path_abc() { return make_graph(3, {{0, 1, "2"}, {1, 2, "1"}}); }

weighted_graph four_cycle_3131() { return cycle({"3", "1", "3", "1"}); }

weighted_graph loose_triangle() { return cycle({"1.0", "1.1", "1.2"}); }

weighted_graph loose_c5() { return cycle({"1.0", "1.1", "1.2", "1.3", "1.4"}); }

weighted_graph single_edge(const std::string& w) { return make_graph(2, {{0, 1, w}}); }

weighted_graph random_graph(std::mt19937_64& rng, std::size_t n, double p, int max_weight,
                            bool perturb)
{
  std::bernoulli_distribution coin(p);
  std::uniform_int_distribution<int> weight(1, max_weight);
  std::uniform_int_distribution<int> offset(1, 997);
  std::vector<edge> es;
  for (node_id u = 0; u < n; ++u)
    for (node_id v = u + 1; v < n; ++v)
      if (coin(rng)) {
        rational w(weight(rng));
        if (perturb)
          w += rational(offset(rng), 1000 * 64);
        es.push_back(edge{u, v, w});
      }
  return weighted_graph(n, std::move(es));
}

weighted_graph random_tree(std::mt19937_64& rng, std::size_t n, int max_weight)
{
  std::uniform_int_distribution<int> weight(1, max_weight);
  std::vector<edge> es;
  for (node_id v = 1; v < n; ++v) {
    std::uniform_int_distribution<node_id> parent(0, v - 1);
    es.push_back(edge{parent(rng), v, rational(weight(rng))});
  }
  return weighted_graph(n, std::move(es));
}

matching matching_of(const weighted_graph& g, std::vector<edge_id> edges)
{
  return matching::from_edges(g, std::move(edges));
}

} // namespace bpmatch::testing
