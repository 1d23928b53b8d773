#include "bpmatch/comp_tree.hpp"

#include "bpmatch/error.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <tuple>
#include <sstream>

namespace bpmatch {

bool computation_tree::truncated(const weighted_graph& g, tree_node_id v) const
{
  const tree_node& n = nodes_.at(v);
  return n.child_edges.empty() && g.degree(n.copy_of) > 1;
}

namespace {

constexpr std::size_t saturated = std::numeric_limits<std::size_t>::max();

std::size_t add_sat(std::size_t a, std::size_t b)
{
  return a > saturated - b ? saturated : a + b;
}

// Edges hanging below a copy of `x` entered through base edge `via`, with
// `levels` more levels to expand.
std::size_t count_below(const weighted_graph& g, node_id x, edge_id via, std::uint32_t levels,
                        std::map<std::tuple<node_id, edge_id, std::uint32_t>, std::size_t>& memo)
{
  if (levels == 0)
    return 0;
  auto key = std::make_tuple(x, via, levels);
  if (auto it = memo.find(key); it != memo.end())
    return it->second;
  std::size_t total = 0;
  for (edge_id f : g.incident(x)) {
    if (f == via)
      continue;
    total = add_sat(total, 1);
    total = add_sat(total, count_below(g, g.edge_at(f).other(x), f, levels - 1, memo));
  }
  memo.emplace(key, total);
  return total;
}

} // namespace

std::size_t tree_edge_count(const weighted_graph& g, edge_id root, std::uint32_t k)
{
  if (k == 0)
    throw precondition_error("computation tree depth must be at least 1");
  if (root >= g.edge_count())
    throw precondition_error("unknown root edge " + std::to_string(root));
  std::map<std::tuple<node_id, edge_id, std::uint32_t>, std::size_t> memo;
  const edge& r = g.edge_at(root);
  std::size_t total = 1;
  total = add_sat(total, count_below(g, r.u, root, k - 1, memo));
  total = add_sat(total, count_below(g, r.v, root, k - 1, memo));
  return total;
}

computation_tree build_tree(const weighted_graph& g, edge_id root, std::uint32_t k,
                            std::size_t edge_limit)
{
  const std::size_t expected = tree_edge_count(g, root, k);
  if (expected > edge_limit)
    throw size_limit_error("computation tree of depth " + std::to_string(k) + " needs " +
                           (expected == saturated ? std::string("too many")
                                                  : std::to_string(expected)) +
                           " edges, limit " + std::to_string(edge_limit));

  computation_tree t;
  t.depth_ = k;
  t.nodes_.reserve(expected + 1);
  t.edges_.reserve(expected);
  const edge& r = g.edge_at(root);
  t.edges_.push_back({root, r.weight, 0, 1});
  t.nodes_.push_back({r.u, 0, 0, {}});
  t.nodes_.push_back({r.v, 0, 0, {}});

  // Nodes are appended in BFS order, so a single sweep expands every level.
  for (tree_node_id v = 0; v < t.nodes_.size(); ++v) {
    if (t.nodes_[v].depth + 1 >= k)
      continue;
    const node_id x = t.nodes_[v].copy_of;
    const edge_id via = t.edges_[t.nodes_[v].parent_edge].copy_of;
    for (edge_id f : g.incident(x)) {
      if (f == via)
        continue;
      const tree_edge_id te = t.edges_.size();
      const tree_node_id child = t.nodes_.size();
      t.edges_.push_back({f, g.edge_at(f).weight, v, child});
      t.nodes_.push_back({g.edge_at(f).other(x), t.nodes_[v].depth + 1, te, {}});
      t.nodes_[v].child_edges.push_back(te);
    }
  }
  return t;
}

bool tree_matching::contains(tree_edge_id e) const
{
  return std::binary_search(edges.begin(), edges.end(), e);
}

bool is_tree_matching(const computation_tree& t, const std::vector<tree_edge_id>& edges)
{
  std::vector<bool> used(t.node_count(), false);
  for (tree_edge_id e : edges) {
    if (e >= t.edge_count())
      return false;
    const tree_edge& te = t.edge_at(e);
    if (used[te.upper] || used[te.lower])
      return false;
    used[te.upper] = used[te.lower] = true;
  }
  return true;
}

tree_matching project_matching(const computation_tree& t, const matching& m)
{
  tree_matching out;
  for (tree_edge_id e = 0; e < t.edge_count(); ++e) {
    if (m.contains(t.edge_at(e).copy_of)) {
      out.edges.push_back(e);
      out.weight += t.edge_at(e).weight;
    }
  }
  return out;
}

namespace {

// Per tree node, over the subtree hanging below it (root edge excluded):
//   free  - best weight with no restriction on the node
//   open  - best weight with the node not matched to a child
// together with whether that best is achieved by exactly one matching.
struct dp_table {
  std::vector<rational> open;
  std::vector<rational> free;
  std::vector<bool> open_unique;
  std::vector<bool> free_unique;
  // Child edge chosen when the node is matched downwards; `none` when staying
  // unmatched is at least as good.
  std::vector<tree_edge_id> pick;
};

constexpr tree_edge_id none = std::numeric_limits<tree_edge_id>::max();

dp_table solve_dp(const computation_tree& t)
{
  const std::size_t n = t.node_count();
  dp_table d;
  d.open.assign(n, rational(0));
  d.free.assign(n, rational(0));
  d.open_unique.assign(n, true);
  d.free_unique.assign(n, true);
  d.pick.assign(n, none);

  for (std::size_t i = n; i-- > 0;) {
    const tree_node& node = t.node(i);
    rational open(0);
    std::size_t ambiguous_children = 0;
    for (tree_edge_id ce : node.child_edges) {
      tree_node_id c = t.edge_at(ce).lower;
      open += d.free[c];
      if (!d.free_unique[c])
        ++ambiguous_children;
    }
    d.open[i] = open;
    d.open_unique[i] = ambiguous_children == 0;

    std::optional<rational> matched;
    bool matched_unique = false;
    tree_edge_id best_edge = none;
    for (tree_edge_id ce : node.child_edges) {
      tree_node_id c = t.edge_at(ce).lower;
      rational value = t.edge_at(ce).weight + d.open[c] + open - d.free[c];
      bool unique = d.open_unique[c] &&
                    ambiguous_children == (d.free_unique[c] ? 0u : 1u);
      if (!matched || value > *matched) {
        matched = value;
        matched_unique = unique;
        best_edge = ce;
      } else if (value == *matched) {
        matched_unique = false;
      }
    }

    if (!matched || *matched < open) {
      d.free[i] = open;
      d.free_unique[i] = d.open_unique[i];
    } else if (*matched > open) {
      d.free[i] = *matched;
      d.free_unique[i] = matched_unique;
      d.pick[i] = best_edge;
    } else {
      d.free[i] = open;
      d.free_unique[i] = false;
    }
  }
  return d;
}

void collect(const computation_tree& t, const dp_table& d, tree_node_id v, bool open_only,
             std::vector<tree_edge_id>& out)
{
  // Explicit stack; trees can be deep.
  std::vector<std::pair<tree_node_id, bool>> stack{{v, open_only}};
  while (!stack.empty()) {
    auto [x, only_open] = stack.back();
    stack.pop_back();
    const tree_edge_id chosen = only_open ? none : d.pick[x];
    for (tree_edge_id ce : t.node(x).child_edges) {
      tree_node_id c = t.edge_at(ce).lower;
      if (ce == chosen) {
        out.push_back(ce);
        stack.emplace_back(c, true);
      } else {
        stack.emplace_back(c, false);
      }
    }
  }
}

} // namespace

tree_matching tree_optimal_matching(const computation_tree& t)
{
  dp_table d = solve_dp(t);
  const rational with = t.edge_at(0).weight + d.open[0] + d.open[1];
  const rational without = d.free[0] + d.free[1];

  tree_matching out;
  const bool take_root = with > without;
  if (take_root) {
    out.edges.push_back(0);
    collect(t, d, 0, true, out.edges);
    collect(t, d, 1, true, out.edges);
    out.weight = with;
    out.tie = !(d.open_unique[0] && d.open_unique[1]);
  } else {
    collect(t, d, 0, false, out.edges);
    collect(t, d, 1, false, out.edges);
    out.weight = without;
    out.tie = with == without || !(d.free_unique[0] && d.free_unique[1]);
  }
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

rational root_advantage(const computation_tree& t)
{
  dp_table d = solve_dp(t);
  return rational(t.edge_at(0).weight + d.open[0] + d.open[1] - d.free[0] - d.free[1]);
}

const char* to_string(membership m) noexcept
{
  switch (m) {
  case membership::in:
    return "in";
  case membership::out:
    return "out";
  case membership::tie:
    return "tie";
  }
  return "tie";
}

membership root_membership(const computation_tree& t)
{
  const int s = sgn(root_advantage(t));
  return s > 0 ? membership::in : s < 0 ? membership::out : membership::tie;
}

std::string format_tree(const computation_tree& t, const weighted_graph& g,
                        const tree_matching* m)
{
  std::vector<bool> covered(t.node_count(), false);
  if (m) {
    for (tree_edge_id e : m->edges) {
      covered[t.edge_at(e).upper] = true;
      covered[t.edge_at(e).lower] = true;
    }
  }
  std::ostringstream out;
  std::vector<tree_node_id> stack{1, 0};
  while (!stack.empty()) {
    tree_node_id v = stack.back();
    stack.pop_back();
    const tree_node& n = t.node(v);
    out << std::string(2 * n.depth, ' ') << n.depth << ' ' << g.label(n.copy_of) << ' '
        << (covered[v] ? '*' : '-') << '\n';
    for (auto it = n.child_edges.rbegin(); it != n.child_edges.rend(); ++it)
      stack.push_back(t.edge_at(*it).lower);
  }
  return out.str();
}

} // namespace bpmatch
