#ifndef BPMATCH_COMP_TREE_HPP
#define BPMATCH_COMP_TREE_HPP

#include "bpmatch/graph.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bpmatch {

inline constexpr std::size_t default_tree_edge_limit = 1'000'000;

using tree_node_id = std::size_t;
using tree_edge_id = std::size_t;

struct tree_node {
  node_id copy_of = 0;
  /// Distance from the root edge; both root endpoints sit at depth 0.
  std::uint32_t depth = 0;
  /// Edge towards the root. For the two root endpoints this is the root edge.
  tree_edge_id parent_edge = 0;
  std::vector<tree_edge_id> child_edges;
};

struct tree_edge {
  edge_id copy_of = 0;
  rational weight;
  tree_node_id upper = 0; ///< endpoint closer to the root
  tree_node_id lower = 0;
};

/// Explicit unrolled tree. Tree edge 0 is the root, joining tree nodes 0
/// (copy of the base edge's u) and 1 (copy of v). Nodes and edges are
/// numbered breadth first, children in increasing base edge id.
class computation_tree {
public:
  const std::vector<tree_node>& nodes() const noexcept { return nodes_; }
  const std::vector<tree_edge>& edges() const noexcept { return edges_; }
  const tree_node& node(tree_node_id v) const { return nodes_.at(v); }
  const tree_edge& edge_at(tree_edge_id e) const { return edges_.at(e); }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  edge_id root_copy() const { return edges_.front().copy_of; }
  std::uint32_t depth() const noexcept { return depth_; }

  /// A childless node whose base node has other neighbours, i.e. a node the
  /// unrolling cut off rather than a genuine leaf of the base graph.
  bool truncated(const weighted_graph& g, tree_node_id v) const;

private:
  friend computation_tree build_tree(const weighted_graph&, edge_id, std::uint32_t,
                                     std::size_t);
  std::vector<tree_node> nodes_;
  std::vector<tree_edge> edges_;
  std::uint32_t depth_ = 0;
};

/// Number of edges build_tree(g, root, k) would produce, saturating at
/// SIZE_MAX.
std::size_t tree_edge_count(const weighted_graph& g, edge_id root, std::uint32_t k);

/// Full depth-k computation tree rooted at `root`: depth 1 is the root edge
/// alone; each further level hangs, under every frontier node, a copy of
/// each base neighbour except the one it came from.
/// Throws precondition_error for k == 0 or an unknown root, and
/// size_limit_error when the tree would exceed `edge_limit` edges.
computation_tree build_tree(const weighted_graph& g, edge_id root, std::uint32_t k,
                            std::size_t edge_limit = default_tree_edge_limit);

struct tree_matching {
  std::vector<tree_edge_id> edges; ///< sorted
  rational weight;
  /// Set by tree_optimal_matching when another matching has the same weight.
  bool tie = false;

  bool contains(tree_edge_id e) const;
};

bool is_tree_matching(const computation_tree& t, const std::vector<tree_edge_id>& edges);

/// Tree edges whose base copy lies in `m`.
tree_matching project_matching(const computation_tree& t, const matching& m);

/// Maximum-weight matching on the tree by leaf-to-root dynamic programming.
/// Among optima the root edge is left out when possible; below the root each
/// node prefers staying unmatched to its children, then the child edge with
/// the smallest id.
tree_matching tree_optimal_matching(const computation_tree& t);

enum class membership { in, out, tie };

const char* to_string(membership m) noexcept;

/// (best weight with the root edge) - (best weight without it), exactly.
rational root_advantage(const computation_tree& t);

/// in / out / tie from the sign of root_advantage.
membership root_membership(const computation_tree& t);

/// Indented text: one node per line, "<depth> <label> <flag>" with flag '*'
/// when the node is covered by `m` (or '-' when not, or when no matching is
/// given), children indented two spaces below their parent.
std::string format_tree(const computation_tree& t, const weighted_graph& g,
                        const tree_matching* m = nullptr);

} // namespace bpmatch

#endif
