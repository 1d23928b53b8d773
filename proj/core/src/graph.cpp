#include "bpmatch/graph.hpp"

#include "bpmatch/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <utility>

namespace bpmatch {

weighted_graph::weighted_graph(std::size_t node_count, std::vector<edge> edges,
                               std::vector<std::string> labels)
    : edges_(std::move(edges)), adjacency_(node_count), labels_(std::move(labels))
{
  if (labels_.empty()) {
    labels_.reserve(node_count);
    for (std::size_t i = 0; i < node_count; ++i)
      labels_.push_back(std::to_string(i));
  }
  if (labels_.size() != node_count)
    throw precondition_error("label count does not match node count");

  std::set<std::pair<node_id, node_id>> seen;
  for (edge_id e = 0; e < edges_.size(); ++e) {
    edges_[e].weight.canonicalize();
    const edge& ed = edges_[e];
    if (ed.u >= node_count || ed.v >= node_count)
      throw precondition_error("edge " + std::to_string(e) + " has an endpoint out of range");
    if (ed.u == ed.v)
      throw precondition_error("edge " + std::to_string(e) + " is a self-loop");
    if (sgn(ed.weight) < 0)
      throw precondition_error("edge " + std::to_string(e) + " has negative weight");
    if (!seen.emplace(std::min(ed.u, ed.v), std::max(ed.u, ed.v)).second)
      throw precondition_error("edge " + std::to_string(e) + " duplicates an earlier edge");
    adjacency_[ed.u].push_back(e);
    adjacency_[ed.v].push_back(e);
    if (ed.weight > max_weight_)
      max_weight_ = ed.weight;
  }
}

std::optional<edge_id> weighted_graph::find_edge(node_id a, node_id b) const
{
  if (a >= node_count() || b >= node_count())
    return std::nullopt;
  for (edge_id e : adjacency_[a])
    if (edges_[e].other(a) == b)
      return e;
  return std::nullopt;
}

std::optional<node_id> weighted_graph::node_by_label(std::string_view label) const
{
  for (node_id v = 0; v < labels_.size(); ++v)
    if (labels_[v] == label)
      return v;
  return std::nullopt;
}

bool weighted_graph::operator==(const weighted_graph& other) const
{
  if (node_count() != other.node_count() || edge_count() != other.edge_count())
    return false;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const edge& a = edges_[e];
    const edge& b = other.edges_[e];
    if (a.u != b.u || a.v != b.v || a.weight != b.weight)
      return false;
  }
  return true;
}

bool is_matching(const weighted_graph& g, std::span<const edge_id> edges)
{
  std::vector<bool> used(g.node_count(), false);
  std::set<edge_id> distinct;
  bool ok = true;
  for (edge_id e : edges) {
    if (e >= g.edge_count())
      throw precondition_error("unknown edge id " + std::to_string(e));
    if (!distinct.insert(e).second)
      continue;
    const edge& ed = g.edge_at(e);
    if (used[ed.u] || used[ed.v])
      ok = false;
    used[ed.u] = used[ed.v] = true;
  }
  return ok;
}

matching matching::from_edges(const weighted_graph& g, std::vector<edge_id> edges)
{
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw precondition_error("duplicate edge id in matching");
  if (!is_matching(g, edges))
    throw structural_error("edge set is not a matching");

  matching m;
  for (edge_id e : edges)
    m.weight_ += g.edge_at(e).weight;
  m.edges_ = std::move(edges);
  return m;
}

bool matching::contains(edge_id e) const
{
  return std::binary_search(edges_.begin(), edges_.end(), e);
}

std::vector<std::optional<edge_id>> matching::mates(const weighted_graph& g) const
{
  std::vector<std::optional<edge_id>> result(g.node_count());
  for (edge_id e : edges_) {
    result[g.edge_at(e).u] = e;
    result[g.edge_at(e).v] = e;
  }
  return result;
}

std::vector<alternating_component> symmetric_difference(const weighted_graph& g,
                                                        const matching& m1,
                                                        const matching& m2)
{
  // Each node touches at most one edge of each matching, so at most two
  // edges of the difference.
  std::vector<std::vector<edge_id>> diff_adj(g.node_count());
  for (edge_id e = 0; e < g.edge_count(); ++e) {
    if (m1.contains(e) != m2.contains(e)) {
      diff_adj[g.edge_at(e).u].push_back(e);
      diff_adj[g.edge_at(e).v].push_back(e);
    }
  }

  std::vector<bool> visited(g.edge_count(), false);
  auto trace = [&](node_id start) {
    alternating_component c;
    c.nodes.push_back(start);
    node_id at = start;
    for (;;) {
      auto next = std::find_if(diff_adj[at].begin(), diff_adj[at].end(),
                               [&](edge_id e) { return !visited[e]; });
      if (next == diff_adj[at].end())
        break;
      visited[*next] = true;
      c.edges.push_back(*next);
      c.in_first.push_back(m1.contains(*next));
      at = g.edge_at(*next).other(at);
      c.nodes.push_back(at);
    }
    c.kind = (c.nodes.size() > 1 && c.nodes.front() == c.nodes.back()) ? component_kind::cycle
                                                                          : component_kind::path;
    return c;
  };

  std::vector<alternating_component> out;
  for (node_id v = 0; v < g.node_count(); ++v)
    if (diff_adj[v].size() == 1 && !visited[diff_adj[v].front()])
      out.push_back(trace(v));
  for (node_id v = 0; v < g.node_count(); ++v)
    if (diff_adj[v].size() == 2 && !visited[diff_adj[v].front()])
      out.push_back(trace(v));
  return out;
}

matching apply_alternation(const weighted_graph& g, const matching& m,
                           const alternating_component& component)
{
  if (component.in_first.size() != component.edges.size())
    throw precondition_error("component flags do not match its edge list");

  std::vector<bool> member(g.edge_count(), false);
  for (edge_id e : m.edges())
    member[e] = true;
  for (std::size_t i = 0; i < component.edges.size(); ++i) {
    edge_id e = component.edges[i];
    if (e >= g.edge_count())
      throw precondition_error("unknown edge id " + std::to_string(e));
    if (member[e] != component.in_first[i])
      throw precondition_error("component is not alternating with respect to the matching");
  }
  for (edge_id e : component.edges)
    member[e] = !member[e];

  std::vector<edge_id> result;
  for (edge_id e = 0; e < g.edge_count(); ++e)
    if (member[e])
      result.push_back(e);
  if (!is_matching(g, result))
    throw structural_error("alternation produced a non-matching");
  return matching::from_edges(g, std::move(result));
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])))
      ++j;
    if (j > i)
      out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<unsigned long long> parse_index(std::string_view s)
{
  unsigned long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    return std::nullopt;
  return v;
}

} // namespace

weighted_graph parse_graph(std::string_view text)
{
  std::vector<edge> edges;
  std::vector<std::string> labels;
  std::unordered_map<std::string, node_id> ids;
  std::optional<std::size_t> fixed_nodes;
  std::set<std::pair<node_id, node_id>> seen;

  auto node_for = [&](std::string_view token, std::size_t line_no) -> node_id {
    auto index = parse_index(token);
    if (!index)
      throw parse_error(line_no, "node id '" + std::string(token) + "' is not a non-negative integer");
    std::string label = std::to_string(*index);
    if (fixed_nodes) {
      if (*index >= *fixed_nodes)
        throw parse_error(line_no, "node " + label + " outside declared range");
      return static_cast<node_id>(*index);
    }
    auto [it, inserted] = ids.emplace(label, static_cast<node_id>(labels.size()));
    if (inserted)
      labels.push_back(label);
    return it->second;
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool seen_data = false;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos)
      end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.remove_suffix(1);

    auto tokens = split_ws(line);
    if (tokens.empty() || tokens.front().front() == '#')
      continue;

    if (tokens.front() == "nodes") {
      if (seen_data || fixed_nodes)
        throw parse_error(line_no, "'nodes' directive must precede all edges and appear once");
      auto n = tokens.size() == 2 ? parse_index(tokens[1]) : std::nullopt;
      if (!n)
        throw parse_error(line_no, "expected 'nodes N'");
      fixed_nodes = *n;
      continue;
    }

    if (tokens.size() != 3)
      throw parse_error(line_no, "expected 'u v w', got " + std::to_string(tokens.size()) + " fields");
    seen_data = true;
    node_id u = node_for(tokens[0], line_no);
    node_id v = node_for(tokens[1], line_no);
    if (u == v)
      throw parse_error(line_no, "self-loop on node " + std::string(tokens[0]));
    if (!tokens[2].empty() && tokens[2].front() == '-')
      throw parse_error(line_no, "negative weight " + std::string(tokens[2]));
    auto w = parse_rational(tokens[2]);
    if (!w)
      throw parse_error(line_no, "malformed weight '" + std::string(tokens[2]) + "'");
    if (!seen.emplace(std::min(u, v), std::max(u, v)).second)
      throw parse_error(line_no, "duplicate edge " + std::string(tokens[0]) + " " +
                                     std::string(tokens[1]));
    edges.push_back(edge{u, v, *w});
  }

  if (fixed_nodes)
    return weighted_graph(*fixed_nodes, std::move(edges));
  std::size_t n = labels.size();
  return weighted_graph(n, std::move(edges), std::move(labels));
}

std::string format_graph(const weighted_graph& g)
{
  std::ostringstream out;
  out << "nodes " << g.node_count() << '\n';
  for (const edge& e : g.edges())
    out << e.u << ' ' << e.v << ' ' << to_string(e.weight) << '\n';
  return out.str();
}

} // namespace bpmatch
