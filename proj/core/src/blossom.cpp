#include "bpmatch/blossom.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace bpmatch {

std::vector<edge_id> support_graph::edges() const
{
  std::vector<edge_id> out;
  for (edge_id e = 0; e < in_support.size(); ++e)
    if (in_support[e])
      out.push_back(e);
  return out;
}

support_graph support_graph_of(const weighted_graph& g, const std::vector<rational>& x,
                               const matching& mstar)
{
  if (x.size() != g.edge_count())
    throw precondition_error("LP solution does not match the graph");
  support_graph sg;
  sg.in_support.assign(g.edge_count(), false);
  bool outside = false;
  for (edge_id e = 0; e < g.edge_count(); ++e) {
    const bool in_m = mstar.contains(e);
    sg.in_support[e] = in_m || sgn(x[e]) > 0;
    outside = outside || (!in_m && sgn(x[e]) > 0);
  }
  if (!outside)
    throw precondition_error("support graph has no edge outside M*; the relaxation is tight");

  auto mates = mstar.mates(g);
  sg.saturated.assign(g.node_count(), false);
  sg.kind.assign(g.node_count(), node_class::unsaturated);
  for (node_id v = 0; v < g.node_count(); ++v) {
    if (!mates[v])
      continue;
    sg.saturated[v] = true;
    bool other = false;
    for (edge_id e : g.incident(v))
      other = other || (sg.in_support[e] && !mstar.contains(e));
    sg.kind[v] = other ? node_class::interior : node_class::saturated_leaf;
  }
  return sg;
}

namespace {

// Alternating depth-first search over the support graph. Paths are simple;
// `want_matched` says which kind of edge must come next.
struct alternating_search {
  const weighted_graph& g;
  const support_graph& sg;
  const matching& m;
  std::vector<std::optional<edge_id>> mate;
  std::vector<bool> on_path;
  std::vector<node_id> nodes;
  std::vector<edge_id> edges;

  alternating_search(const weighted_graph& graph, const support_graph& s, const matching& mm)
      : g(graph), sg(s), m(mm), mate(mm.mates(graph)), on_path(graph.node_count(), false)
  {
  }

  bool matched(edge_id e) const { return m.contains(e); }

  template <class Fn>
  void for_next(node_id x, bool want_matched, Fn&& fn) const
  {
    if (want_matched) {
      if (mate[x] && sg.in_support[*mate[x]])
        fn(*mate[x]);
      return;
    }
    for (edge_id f : g.incident(x))
      if (sg.in_support[f] && !matched(f))
        fn(f);
  }

  void push(edge_id e)
  {
    const node_id y = g.edge_at(e).other(nodes.back());
    edges.push_back(e);
    nodes.push_back(y);
    on_path[y] = true;
  }

  void pop()
  {
    on_path[nodes.back()] = false;
    nodes.pop_back();
    edges.pop_back();
  }
};

alternating_component as_component(const matching& m, component_kind kind,
                                   std::vector<node_id> nodes, std::vector<edge_id> edges)
{
  alternating_component c;
  c.kind = kind;
  c.nodes = std::move(nodes);
  c.edges = std::move(edges);
  for (edge_id e : c.edges)
    c.in_first.push_back(m.contains(e));
  return c;
}

bool find_cycle_from(alternating_search& s, node_id start, std::optional<alternating_component>& out)
{
  // Path starts with the matched edge at `start`; a cycle closes when an
  // unmatched edge returns to `start`.
  const bool want = s.edges.size() % 2 == 0;
  bool found = false;
  s.for_next(s.nodes.back(), want, [&](edge_id f) {
    if (found)
      return;
    const node_id y = s.g.edge_at(f).other(s.nodes.back());
    if (y == start && !want && s.edges.size() >= 3) {
      auto nodes = s.nodes;
      auto edges = s.edges;
      nodes.push_back(start);
      edges.push_back(f);
      out = as_component(s.m, component_kind::cycle, std::move(nodes), std::move(edges));
      found = true;
      return;
    }
    if (s.on_path[y])
      return;
    s.push(f);
    found = find_cycle_from(s, start, out);
    s.pop();
  });
  return found;
}

bool find_path_from(alternating_search& s, std::optional<alternating_component>& out)
{
  // Path starts with an unmatched edge at an unsaturated node.
  const bool want = s.edges.size() % 2 == 1;
  bool found = false;
  s.for_next(s.nodes.back(), want, [&](edge_id f) {
    if (found)
      return;
    const node_id y = s.g.edge_at(f).other(s.nodes.back());
    if (s.on_path[y])
      return;
    s.push(f);
    if (!want && !s.sg.saturated[y]) {
      out = as_component(s.m, component_kind::path, s.nodes, s.edges);
      found = true;
    } else {
      found = find_path_from(s, out);
    }
    s.pop();
  });
  return found;
}

} // namespace

std::optional<alternating_component> find_augmentation(const weighted_graph& g,
                                                       const support_graph& sg,
                                                       const matching& mstar)
{
  alternating_search s(g, sg, mstar);
  std::optional<alternating_component> out;
  for (node_id v = 0; v < g.node_count(); ++v) {
    s.nodes = {v};
    s.on_path[v] = true;
    bool found = sg.saturated[v] ? find_cycle_from(s, v, out) : find_path_from(s, out);
    s.on_path[v] = false;
    if (found)
      return out;
  }
  return std::nullopt;
}

const char* to_string(certificate_kind k) noexcept
{
  return k == certificate_kind::stemmed_blossom ? "stemmed_blossom" : "blossom_pair";
}

const char* to_string(certificate_fault f) noexcept
{
  switch (f) {
  case certificate_fault::unknown_edge:
    return "unknown_edge";
  case certificate_fault::cycle_not_closed:
    return "cycle_not_closed";
  case certificate_fault::cycle_even:
    return "cycle_even";
  case certificate_fault::not_a_blossom:
    return "not_a_blossom";
  case certificate_fault::path_not_alternating:
    return "path_not_alternating";
  case certificate_fault::path_misrooted:
    return "path_misrooted";
  case certificate_fault::path_end_saturated:
    return "path_end_saturated";
  case certificate_fault::overlap:
    return "overlap";
  case certificate_fault::not_bad:
    return "not_bad";
  case certificate_fault::margin_mismatch:
    return "margin_mismatch";
  }
  return "unknown";
}

namespace {

// nodes[i] is where cycle edge i starts; the walk must close and be simple.
std::optional<std::vector<node_id>> cycle_walk(const weighted_graph& g,
                                               const std::vector<edge_id>& cycle)
{
  const std::size_t len = cycle.size();
  if (len < 3)
    return std::nullopt;
  const edge& first = g.edge_at(cycle.front());
  const edge& last = g.edge_at(cycle.back());
  node_id start;
  if (last.touches(first.u))
    start = first.u;
  else if (last.touches(first.v))
    start = first.v;
  else
    return std::nullopt;

  std::vector<node_id> nodes{start};
  std::vector<bool> seen(g.node_count(), false);
  seen[start] = true;
  node_id x = start;
  for (std::size_t i = 0; i < len; ++i) {
    const edge& e = g.edge_at(cycle[i]);
    if (!e.touches(x))
      return std::nullopt;
    x = e.other(x);
    if (i + 1 == len)
      break;
    if (seen[x])
      return std::nullopt;
    seen[x] = true;
    nodes.push_back(x);
  }
  if (x != start)
    return std::nullopt;
  return nodes;
}

struct checked_cycle {
  std::vector<node_id> nodes;
  node_id base = 0;
};

checked_cycle check_cycle(const weighted_graph& g, const matching& m,
                          const std::vector<edge_id>& cycle)
{
  auto nodes = cycle_walk(g, cycle);
  if (!nodes)
    throw certificate_error(certificate_fault::cycle_not_closed,
                            "edges do not form a simple closed cycle");
  if (cycle.size() % 2 == 0)
    throw certificate_error(certificate_fault::cycle_even,
                            "cycle has " + std::to_string(cycle.size()) + " edges");
  std::size_t in_m = 0;
  for (edge_id e : cycle)
    in_m += m.contains(e);
  if (in_m != (cycle.size() - 1) / 2)
    throw certificate_error(certificate_fault::not_a_blossom,
                            std::to_string(in_m) + " matched edges on a cycle of length " +
                                std::to_string(cycle.size()));
  checked_cycle c;
  c.nodes = std::move(*nodes);
  const std::size_t len = cycle.size();
  for (std::size_t i = 0; i < len; ++i)
    if (!m.contains(cycle[i]) && !m.contains(cycle[(i + len - 1) % len]))
      c.base = c.nodes[i];
  return c;
}

// Follows `path` from `start`, matched edge first, avoiding `blocked` nodes
// except possibly `finish` as the very last node. Returns the end node.
node_id check_path(const weighted_graph& g, const matching& m, const std::vector<edge_id>& path,
                   node_id start, const std::vector<bool>& blocked,
                   std::optional<node_id> finish)
{
  std::vector<bool> seen(g.node_count(), false);
  seen[start] = true;
  node_id x = start;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const edge& e = g.edge_at(path[i]);
    const bool want = i % 2 == 0;
    if (!e.touches(x))
      throw certificate_error(i == 0 ? certificate_fault::path_misrooted
                                     : certificate_fault::path_not_alternating,
                              "path edge " + std::to_string(i) + " does not continue the path");
    if (m.contains(path[i]) != want)
      throw certificate_error(i == 0 ? certificate_fault::path_misrooted
                                     : certificate_fault::path_not_alternating,
                              "path edge " + std::to_string(i) + " breaks the alternation");
    x = e.other(x);
    const bool last = i + 1 == path.size();
    if (seen[x] || (blocked[x] && !(last && finish && x == *finish)))
      throw certificate_error(certificate_fault::overlap,
                              "path revisits node " + g.label(x));
    seen[x] = true;
  }
  return x;
}

void require_edges(const weighted_graph& g, const std::vector<edge_id>& edges)
{
  for (edge_id e : edges)
    if (e >= g.edge_count())
      throw certificate_error(certificate_fault::unknown_edge, "edge " + std::to_string(e));
}

rational signed_weight(const weighted_graph& g, const matching& m,
                       const std::vector<edge_id>& edges)
{
  rational total(0);
  for (edge_id e : edges) {
    if (m.contains(e))
      total -= g.edge_at(e).weight;
    else
      total += g.edge_at(e).weight;
  }
  return total;
}

} // namespace

std::optional<node_id> blossom_base(const weighted_graph& g, const matching& mstar,
                                    const std::vector<edge_id>& cycle)
{
  for (edge_id e : cycle)
    if (e >= g.edge_count())
      return std::nullopt;
  try {
    return check_cycle(g, mstar, cycle).base;
  } catch (const certificate_error&) {
    return std::nullopt;
  }
}

rational badness_margin(const weighted_graph& g, const matching& mstar,
                        const blossom_certificate& cert)
{
  rational margin = signed_weight(g, mstar, cert.cycle) + 2 * signed_weight(g, mstar, cert.path);
  if (cert.kind == certificate_kind::blossom_pair)
    margin += signed_weight(g, mstar, cert.cycle2);
  return margin;
}

rational verify_certificate(const blossom_certificate& cert, const weighted_graph& g,
                            const matching& mstar)
{
  require_edges(g, cert.cycle);
  require_edges(g, cert.cycle2);
  require_edges(g, cert.path);
  auto mates = mstar.mates(g);

  const checked_cycle c1 = check_cycle(g, mstar, cert.cycle);
  std::vector<bool> blocked(g.node_count(), false);
  for (node_id v : c1.nodes)
    blocked[v] = true;

  if (cert.kind == certificate_kind::stemmed_blossom) {
    if (!cert.cycle2.empty())
      throw certificate_error(certificate_fault::overlap,
                              "a stemmed blossom has a single cycle");
    const node_id end = check_path(g, mstar, cert.path, c1.base, blocked, std::nullopt);
    // The structure must leave its far end free after alternation.
    const bool entered_unmatched = cert.path.empty() || cert.path.size() % 2 == 0;
    if (entered_unmatched && mates[end])
      throw certificate_error(certificate_fault::path_end_saturated,
                              "stem ends at node " + g.label(end) +
                                  " which M* saturates outside the structure");
  } else {
    const checked_cycle c2 = check_cycle(g, mstar, cert.cycle2);
    for (node_id v : c2.nodes) {
      if (blocked[v])
        throw certificate_error(certificate_fault::overlap,
                                "cycles share node " + g.label(v));
      blocked[v] = true;
    }
    if (cert.path.empty())
      throw certificate_error(certificate_fault::path_misrooted,
                              "a blossom pair needs a path between the bases");
    const node_id end = check_path(g, mstar, cert.path, c1.base, blocked, c2.base);
    if (end != c2.base)
      throw certificate_error(certificate_fault::path_misrooted,
                              "path ends at " + g.label(end) + ", not at the second base");
    if (!mstar.contains(cert.path.back()))
      throw certificate_error(certificate_fault::path_not_alternating,
                              "path must reach the second base through an M* edge");
  }

  const rational margin = badness_margin(g, mstar, cert);
  if (sgn(margin) <= 0)
    throw certificate_error(certificate_fault::not_bad, "margin " + to_string(margin));
  if (margin != cert.margin)
    throw certificate_error(certificate_fault::margin_mismatch,
                            "recomputed " + to_string(margin) + ", recorded " +
                                to_string(cert.margin));
  return margin;
}

namespace {

// Cycle listed from its base, turned so the smaller base edge comes first.
std::vector<edge_id> oriented(std::vector<edge_id> cycle)
{
  if (cycle.back() < cycle.front())
    std::reverse(cycle.begin(), cycle.end());
  return cycle;
}

void canonicalize(blossom_certificate& c)
{
  c.cycle = oriented(std::move(c.cycle));
  if (c.kind == certificate_kind::blossom_pair) {
    c.cycle2 = oriented(std::move(c.cycle2));
    if (c.cycle2 < c.cycle) {
      std::swap(c.cycle, c.cycle2);
      std::reverse(c.path.begin(), c.path.end());
    }
  }
}

bool better(const blossom_certificate& a, const blossom_certificate& b)
{
  if (a.margin != b.margin)
    return a.margin > b.margin;
  return std::tie(a.cycle, a.cycle2, a.path) < std::tie(b.cycle, b.cycle2, b.path);
}

struct end_blossom {
  std::size_t base_index; ///< index into the path's node list
  std::vector<edge_id> cycle;
};

enum class end_kind { leaf, interior, unsaturated };

// Classifies the last node of (nodes, edges) and lists the blossoms that its
// support edges close back onto the path.
end_kind analyse_end(const weighted_graph& g, const support_graph& sg, const matching& m,
                     const std::vector<node_id>& nodes, const std::vector<edge_id>& edges,
                     std::vector<end_blossom>& blossoms)
{
  const std::size_t len = edges.size();
  const node_id x = nodes.back();
  if (!m.contains(edges.back())) {
    if (sg.saturated[x])
      throw structural_error("support graph holds an augmentation ending at node " + g.label(x));
    return end_kind::unsaturated;
  }
  if (sg.kind[x] == node_class::saturated_leaf)
    return end_kind::leaf;

  std::vector<std::size_t> index(g.node_count(), len + 1);
  for (std::size_t i = 0; i <= len; ++i)
    index[nodes[i]] = i;
  for (edge_id f : g.incident(x)) {
    if (!sg.in_support[f] || m.contains(f))
      continue;
    const std::size_t j = index[g.edge_at(f).other(x)];
    if (j > len)
      throw structural_error("alternating path is not maximal");
    if (m.contains(edges[j]))
      throw structural_error("support graph holds an even alternating cycle");
    end_blossom b;
    b.base_index = j;
    b.cycle.assign(edges.begin() + static_cast<std::ptrdiff_t>(j), edges.end());
    b.cycle.push_back(f);
    blossoms.push_back(std::move(b));
  }
  return end_kind::interior;
}

struct maximal_path_search {
  const weighted_graph& g;
  const support_graph& sg;
  const matching& m;
  std::vector<std::optional<edge_id>> mate;
  std::vector<bool> on_path;
  std::vector<node_id> nodes;
  std::vector<edge_id> edges;
  std::function<void()> emit;

  std::vector<edge_id> continuations(node_id x, bool want_matched) const
  {
    std::vector<edge_id> out;
    if (want_matched) {
      if (mate[x] && sg.in_support[*mate[x]] && !on_path[g.edge_at(*mate[x]).other(x)])
        out.push_back(*mate[x]);
      return out;
    }
    for (edge_id f : g.incident(x))
      if (sg.in_support[f] && !m.contains(f) && !on_path[g.edge_at(f).other(x)])
        out.push_back(f);
    return out;
  }

  void extend()
  {
    const bool want = !m.contains(edges.back());
    auto next = continuations(nodes.back(), want);
    if (next.empty()) {
      emit();
      return;
    }
    for (edge_id f : next) {
      const node_id y = g.edge_at(f).other(nodes.back());
      edges.push_back(f);
      nodes.push_back(y);
      on_path[y] = true;
      extend();
      on_path[y] = false;
      nodes.pop_back();
      edges.pop_back();
    }
  }

  bool backward_maximal() const
  {
    return continuations(nodes.front(), !m.contains(edges.front())).empty();
  }
};

} // namespace

blossom_certificate find_bad_certificate(const weighted_graph& g, const support_graph& sg,
                                         const matching& mstar)
{
  std::optional<blossom_certificate> best;
  auto offer = [&](blossom_certificate c) {
    canonicalize(c);
    c.margin = badness_margin(g, mstar, c);
    if (sgn(c.margin) <= 0)
      return;
    try {
      verify_certificate(c, g, mstar);
    } catch (const certificate_error&) {
      return;
    }
    if (!best || better(c, *best))
      best = std::move(c);
  };

  maximal_path_search s{g, sg, mstar, mstar.mates(g), std::vector<bool>(g.node_count(), false),
                        {}, {}, {}};
  s.emit = [&] {
    if (!s.backward_maximal())
      return;
    if (s.nodes.back() < s.nodes.front())
      return; // the reversed walk is handled instead
    if (std::all_of(s.edges.begin(), s.edges.end(), [&](edge_id e) { return mstar.contains(e); }))
      return;

    const std::size_t len = s.edges.size();
    std::vector<end_blossom> back, front;
    const end_kind back_kind = analyse_end(g, sg, mstar, s.nodes, s.edges, back);
    std::vector<node_id> rnodes(s.nodes.rbegin(), s.nodes.rend());
    std::vector<edge_id> redges(s.edges.rbegin(), s.edges.rend());
    const end_kind front_kind = analyse_end(g, sg, mstar, rnodes, redges, front);

    if (back_kind != end_kind::interior && front_kind != end_kind::interior) {
      if (back_kind == end_kind::unsaturated && front_kind == end_kind::unsaturated)
        throw structural_error("support graph holds an augmenting path");
      throw structural_error("maximal alternating path with both ends at saturated leaves or "
                             "unsaturated nodes; ruled out by LP optimality");
    }

    for (const auto& b : back) {
      blossom_certificate c;
      c.cycle = b.cycle;
      for (std::size_t i = b.base_index; i-- > 0;)
        c.path.push_back(s.edges[i]);
      offer(std::move(c));
    }
    for (const auto& b : front) {
      blossom_certificate c;
      c.cycle = b.cycle;
      for (std::size_t i = b.base_index; i-- > 0;)
        c.path.push_back(redges[i]);
      offer(std::move(c));
    }
    for (const auto& bb : back) {
      for (const auto& fb : front) {
        const std::size_t i = len - fb.base_index; // front base, in forward indexing
        const std::size_t j = bb.base_index;
        if (i >= j)
          continue;
        blossom_certificate c;
        c.kind = certificate_kind::blossom_pair;
        c.cycle = fb.cycle;
        c.cycle2 = bb.cycle;
        c.path.assign(s.edges.begin() + static_cast<std::ptrdiff_t>(i),
                      s.edges.begin() + static_cast<std::ptrdiff_t>(j));
        offer(std::move(c));
      }
    }
  };

  for (node_id v = 0; v < g.node_count(); ++v) {
    for (edge_id f : g.incident(v)) {
      if (!sg.in_support[f])
        continue;
      const node_id y = g.edge_at(f).other(v);
      s.nodes = {v, y};
      s.edges = {f};
      s.on_path[v] = s.on_path[y] = true;
      s.extend();
      s.on_path[v] = s.on_path[y] = false;
    }
  }

  if (!best)
    throw structural_error("no bad blossom structure found in the support graph");
  return *best;
}

namespace {

struct structure_search {
  const weighted_graph& g;
  const matching& m;
  const std::vector<bool>* allowed;
  std::vector<std::optional<edge_id>> mate;

  bool usable(edge_id e) const { return !allowed || (*allowed)[e]; }

  struct blossom {
    std::vector<edge_id> cycle;
    std::vector<bool> on_cycle;
    node_id base;
  };

  // Alternating simple paths from `start`, matched edge first. `visit` sees
  // every prefix; returning false aborts the whole search.
  template <class Visit>
  bool paths_from(node_id start, std::vector<bool>& blocked, Visit&& visit) const
  {
    std::vector<edge_id> path;
    std::vector<node_id> nodes{start};
    return extend_path(path, nodes, blocked, visit);
  }

  template <class Visit>
  bool extend_path(std::vector<edge_id>& path, std::vector<node_id>& nodes,
                   std::vector<bool>& blocked, Visit& visit) const
  {
    const node_id x = nodes.back();
    const bool want = path.size() % 2 == 0;
    std::vector<edge_id> next;
    if (want) {
      if (mate[x] && usable(*mate[x]))
        next.push_back(*mate[x]);
    } else {
      for (edge_id f : g.incident(x))
        if (usable(f) && !m.contains(f))
          next.push_back(f);
    }
    for (edge_id f : next) {
      const node_id y = g.edge_at(f).other(x);
      const bool free_node = !blocked[y];
      path.push_back(f);
      nodes.push_back(y);
      if (!visit(path, y, free_node))
        return false;
      if (free_node) {
        blocked[y] = true;
        bool go = extend_path(path, nodes, blocked, visit);
        blocked[y] = false;
        if (!go)
          return false;
      }
      path.pop_back();
      nodes.pop_back();
    }
    return true;
  }

  std::vector<blossom> blossoms() const
  {
    std::vector<blossom> out;
    for (node_id b = 0; b < g.node_count(); ++b) {
      std::vector<bool> on(g.node_count(), false);
      on[b] = true;
      std::vector<edge_id> path;
      collect_cycles(b, b, path, on, out);
    }
    return out;
  }

  // Cycle through base b: unmatched edge out, alternate, unmatched edge back.
  void collect_cycles(node_id b, node_id x, std::vector<edge_id>& path, std::vector<bool>& on,
                      std::vector<blossom>& out) const
  {
    const bool want = path.size() % 2 == 1;
    if (want) {
      if (!mate[x] || !usable(*mate[x]))
        return;
      const edge_id f = *mate[x];
      const node_id y = g.edge_at(f).other(x);
      if (on[y])
        return;
      on[y] = true;
      path.push_back(f);
      collect_cycles(b, y, path, on, out);
      path.pop_back();
      on[y] = false;
      return;
    }
    for (edge_id f : g.incident(x)) {
      if (!usable(f) || m.contains(f))
        continue;
      const node_id y = g.edge_at(f).other(x);
      if (y == b && path.size() >= 2) {
        if (path.front() < f) {
          blossom bl;
          bl.cycle = path;
          bl.cycle.push_back(f);
          bl.on_cycle = on;
          bl.base = b;
          out.push_back(std::move(bl));
        }
        continue;
      }
      if (on[y])
        continue;
      on[y] = true;
      path.push_back(f);
      collect_cycles(b, y, path, on, out);
      path.pop_back();
      on[y] = false;
    }
  }
};

} // namespace

void for_each_blossom_structure(const weighted_graph& g, const matching& mstar,
                                const std::function<bool(const blossom_certificate&)>& visit,
                                const std::vector<bool>* allowed)
{
  if (allowed && allowed->size() != g.edge_count())
    throw precondition_error("edge filter does not match the graph");
  structure_search s{g, mstar, allowed, mstar.mates(g)};
  const auto all = s.blossoms();

  for (const auto& bl : all) {
    if (!s.mate[bl.base]) {
      blossom_certificate c;
      c.cycle = bl.cycle;
      c.margin = badness_margin(g, mstar, c);
      if (!visit(c))
        return;
    }
    std::vector<bool> blocked = bl.on_cycle;
    bool go = s.paths_from(bl.base, blocked,
                           [&](const std::vector<edge_id>& path, node_id end, bool free_node) {
                             if (!free_node)
                               return true;
                             if (path.size() % 2 == 0 && s.mate[end])
                               return true;
                             blossom_certificate c;
                             c.cycle = bl.cycle;
                             c.path = path;
                             c.margin = badness_margin(g, mstar, c);
                             return visit(c);
                           });
    if (!go)
      return;
  }

  for (std::size_t a = 0; a < all.size(); ++a) {
    for (std::size_t b = a + 1; b < all.size(); ++b) {
      bool disjoint = true;
      for (node_id v = 0; v < g.node_count() && disjoint; ++v)
        disjoint = !(all[a].on_cycle[v] && all[b].on_cycle[v]);
      if (!disjoint)
        continue;
      std::vector<bool> blocked(g.node_count(), false);
      for (node_id v = 0; v < g.node_count(); ++v)
        blocked[v] = all[a].on_cycle[v] || all[b].on_cycle[v];
      const node_id target = all[b].base;
      bool go = s.paths_from(all[a].base, blocked,
                             [&](const std::vector<edge_id>& path, node_id end, bool) {
                               if (end != target || path.size() % 2 == 0)
                                 return true;
                               blossom_certificate c;
                               c.kind = certificate_kind::blossom_pair;
                               c.cycle = all[a].cycle;
                               c.cycle2 = all[b].cycle;
                               c.path = path;
                               c.margin = badness_margin(g, mstar, c);
                               return visit(c);
                             });
      if (!go)
        return;
    }
  }
}

tree_refutation_report tree_refutation(const blossom_certificate& cert, const weighted_graph& g,
                                       const matching& mstar, std::uint32_t k)
{
  if (k == 0)
    throw precondition_error("tree refutation needs depth k >= 1");
  if (cert.kind != certificate_kind::stemmed_blossom)
    throw precondition_error("tree refutation is implemented for stemmed blossoms only");
  verify_certificate(cert, g, mstar);

  // Cycle nodes from the base: edge i joins ring[i] and ring[i + 1].
  const checked_cycle cc = check_cycle(g, mstar, cert.cycle);
  const std::size_t len = cert.cycle.size();
  const std::size_t shift =
      static_cast<std::size_t>(std::find(cc.nodes.begin(), cc.nodes.end(), cc.base) - cc.nodes.begin());
  std::vector<edge_id> ring;
  std::vector<node_id> ring_nodes;
  for (std::size_t i = 0; i < len; ++i) {
    ring.push_back(cert.cycle[(i + shift) % len]);
    ring_nodes.push_back(cc.nodes[(i + shift) % len]);
  }
  ring_nodes.push_back(cc.base);

  std::size_t pos = len;
  for (std::size_t i = 0; i < len; ++i)
    if (mstar.contains(ring[i]) && (pos == len || ring[i] < ring[pos]))
      pos = i;
  const edge_id root = ring[pos];

  // P_a leaves ring_nodes[pos] backwards round the cycle, P_b leaves
  // ring_nodes[pos + 1] forwards; both continue down the stem.
  std::vector<edge_id> pa, pb;
  for (std::size_t i = pos; i-- > 0;)
    pa.push_back(ring[i]);
  for (std::size_t i = pos + 1; i < len; ++i)
    pb.push_back(ring[i]);
  pa.insert(pa.end(), cert.path.begin(), cert.path.end());
  pb.insert(pb.end(), cert.path.begin(), cert.path.end());

  tree_refutation_report r;
  r.root = root;
  r.tree = build_tree(g, root, k + static_cast<std::uint32_t>(g.node_count()));
  const bool a_is_upper = g.edge_at(root).u == ring_nodes[pos];

  auto lift = [&](tree_node_id from, const std::vector<edge_id>& base_path) {
    std::vector<tree_edge_id> out;
    tree_node_id x = from;
    for (edge_id f : base_path) {
      const auto& kids = r.tree.node(x).child_edges;
      auto it = std::find_if(kids.begin(), kids.end(),
                             [&](tree_edge_id ce) { return r.tree.edge_at(ce).copy_of == f; });
      if (it == kids.end())
        throw structural_error("alternating path does not fit in the computation tree");
      out.push_back(*it);
      x = r.tree.edge_at(*it).lower;
    }
    return out;
  };
  r.first_path = lift(0, a_is_upper ? pa : pb);
  r.second_path = lift(1, a_is_upper ? pb : pa);

  r.d1 = signed_weight(g, mstar, a_is_upper ? pa : pb);
  r.d2 = signed_weight(g, mstar, a_is_upper ? pb : pa);
  r.gain = r.d1 + r.d2 - g.edge_at(root).weight;

  r.projected = project_matching(r.tree, mstar);
  std::vector<bool> toggle(r.tree.edge_count(), false);
  toggle[0] = true;
  for (auto e : r.first_path)
    toggle[e] = true;
  for (auto e : r.second_path)
    toggle[e] = true;
  r.improved.weight = 0;
  for (tree_edge_id e = 0; e < r.tree.edge_count(); ++e) {
    if (r.projected.contains(e) != toggle[e]) {
      r.improved.edges.push_back(e);
      r.improved.weight += r.tree.edge_at(e).weight;
    }
  }
  if (!is_tree_matching(r.tree, r.improved.edges))
    throw structural_error("alternating the lifted path does not give a tree matching");
  if (r.improved.weight - r.projected.weight != r.gain)
    throw structural_error("tree gain differs from d1 + d2 - w(e)");
  return r;
}

std::string format_certificate(const blossom_certificate& cert, const weighted_graph& g)
{
  auto list = [&](const std::vector<edge_id>& edges) {
    std::string s;
    for (edge_id e : edges) {
      const edge& ed = g.edge_at(e);
      s += ' ' + g.label(ed.u) + '-' + g.label(ed.v);
    }
    return s;
  };
  std::ostringstream out;
  out << "kind " << to_string(cert.kind) << '\n';
  out << "cycle" << list(cert.cycle) << '\n';
  if (cert.kind == certificate_kind::blossom_pair)
    out << "cycle2" << list(cert.cycle2) << '\n';
  out << "path" << list(cert.path) << '\n';
  out << "margin " << to_string(cert.margin) << '\n';
  return out.str();
}

} // namespace bpmatch
