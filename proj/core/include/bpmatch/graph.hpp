#ifndef BPMATCH_GRAPH_HPP
#define BPMATCH_GRAPH_HPP

#include "bpmatch/rational.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bpmatch {

using node_id = std::uint32_t;
using edge_id = std::uint32_t;

struct edge {
  node_id u = 0;
  node_id v = 0;
  rational weight;

  node_id other(node_id x) const noexcept { return x == u ? v : u; }
  bool touches(node_id x) const noexcept { return x == u || x == v; }
};

/// Simple undirected graph with non-negative exact weights. Nodes are dense
/// ids 0..n-1; each keeps the label it had in the input file. Immutable once
/// constructed.
class weighted_graph {
public:
  weighted_graph() = default;

  /// Validates the edge list (no self-loops, no parallel edges, no negative
  /// weights, endpoints < node_count). Throws precondition_error otherwise.
  /// `labels` may be empty, in which case node i is labelled "i".
  weighted_graph(std::size_t node_count, std::vector<edge> edges,
                 std::vector<std::string> labels = {});

  std::size_t node_count() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const edge& edge_at(edge_id e) const { return edges_.at(e); }
  std::span<const edge> edges() const noexcept { return edges_; }

  /// Incident edge ids of `v`, in increasing id order.
  std::span<const edge_id> incident(node_id v) const { return adjacency_.at(v); }
  std::size_t degree(node_id v) const { return adjacency_.at(v).size(); }

  std::optional<edge_id> find_edge(node_id a, node_id b) const;

  /// Heaviest edge weight; zero for an edgeless graph.
  const rational& max_weight() const noexcept { return max_weight_; }

  const std::string& label(node_id v) const { return labels_.at(v); }
  std::optional<node_id> node_by_label(std::string_view label) const;

  bool operator==(const weighted_graph& other) const;

private:
  std::vector<edge> edges_;
  std::vector<std::vector<edge_id>> adjacency_;
  std::vector<std::string> labels_;
  rational max_weight_;
};

/// Throws precondition_error for an unknown id.
bool is_matching(const weighted_graph& g, std::span<const edge_id> edges);

/// A validated matching: sorted edge ids plus their total weight.
class matching {
public:
  matching() = default;

  /// Throws precondition_error on unknown ids or duplicates and
  /// structural_error if two edges share an endpoint.
  static matching from_edges(const weighted_graph& g, std::vector<edge_id> edges);

  std::span<const edge_id> edges() const noexcept { return edges_; }
  const rational& weight() const noexcept { return weight_; }
  std::size_t size() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return edges_.empty(); }
  bool contains(edge_id e) const;

  /// Per node: the matched edge, or nullopt when the node is unsaturated.
  std::vector<std::optional<edge_id>> mates(const weighted_graph& g) const;

  bool operator==(const matching& other) const { return edges_ == other.edges_; }

private:
  std::vector<edge_id> edges_;
  rational weight_;
};

enum class component_kind { path, cycle };

/// One connected piece of the symmetric difference of two matchings.
/// `nodes` lists the walk (size edges+1); for a cycle front() == back().
struct alternating_component {
  component_kind kind = component_kind::path;
  std::vector<edge_id> edges;
  std::vector<node_id> nodes;
  std::vector<bool> in_first;
};

/// Decomposes m1 xor m2 into vertex-disjoint alternating paths and even
/// cycles. Paths are traced from their lower-id endpoint; paths come first,
/// then cycles, each group ordered by smallest node id.
std::vector<alternating_component> symmetric_difference(const weighted_graph& g,
                                                        const matching& m1,
                                                        const matching& m2);

/// Toggles the component's edges in `m`. The component's flags must agree
/// with membership in `m` (precondition_error otherwise); a toggle that
/// breaks the matching property raises structural_error.
matching apply_alternation(const weighted_graph& g, const matching& m,
                           const alternating_component& component);

/// Edge-list reader. Lines are "u v w" with w a decimal or "p/q"; '#' starts
/// a comment line. An optional leading "nodes N" directive fixes the node set
/// to labels 0..N-1 (allowing isolated nodes); without it labels are
/// remapped to dense ids in order of first appearance.
weighted_graph parse_graph(std::string_view text);

/// Writes the "nodes N" form, which parse_graph reads back exactly.
std::string format_graph(const weighted_graph& g);

} // namespace bpmatch

#endif
