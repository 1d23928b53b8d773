#include "bpmatch/max_product.hpp"

#include "bpmatch/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>

namespace bpmatch {

char to_symbol(edge_decision d) noexcept
{
  switch (d) {
  case edge_decision::zero:
    return '0';
  case edge_decision::one:
    return '1';
  case edge_decision::tie:
    return '?';
  }
  return '?';
}

const char* to_string(mp_verdict v) noexcept
{
  return v == mp_verdict::converged ? "converged" : "no_convergence";
}

message_selector::message_selector(const schedule& sched, std::size_t message_count)
    : sched_(sched), window_(std::max<std::size_t>(message_count, 1)), rng_(sched.seed),
      selected_(message_count, 1), idle_(message_count, 0)
{
}

const std::vector<std::uint8_t>& message_selector::next()
{
  if (sched_.kind == schedule_kind::synchronous)
    return selected_;

  // One fair coin per bit of each draw.
  std::uint64_t bits = 0;
  bool any = false;
  for (std::size_t i = 0; i < selected_.size(); ++i) {
    if (i % 64 == 0)
      bits = rng_();
    const bool coin = (bits >> (i % 64)) & 1U;
    selected_[i] = coin || idle_[i] + 1 >= window_ ? 1 : 0;
    any = any || selected_[i];
  }
  if (!any && !selected_.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, selected_.size() - 1);
    selected_[pick(rng_)] = 1;
  }
  for (std::size_t i = 0; i < selected_.size(); ++i)
    idle_[i] = selected_[i] ? 0 : idle_[i] + 1;
  return selected_;
}

namespace {

template <class Value>
Value weight_as(const rational& w);

template <>
double weight_as<double>(const rational& w)
{
  return to_double(w);
}

template <>
rational weight_as<rational>(const rational& w)
{
  return w;
}

constexpr std::uint64_t depth_cap = std::numeric_limits<std::uint64_t>::max() / 4;

// Slot of edge e at node x.
std::size_t slot(const weighted_graph& g, edge_id e, node_id x)
{
  return 2 * std::size_t{e} + (g.edge_at(e).u == x ? 0 : 1);
}

} // namespace

template <class Value>
basic_message_state<Value> init_messages(const weighted_graph& g)
{
  basic_message_state<Value> s;
  const std::size_t slots = 2 * g.edge_count();
  s.node_to_edge.assign(slots, Value(0));
  s.edge_to_node.assign(slots, Value(0));
  s.node_to_edge_depth.assign(slots, 0);
  s.edge_to_node_depth.assign(slots, 0);
  return s;
}

namespace {

template <class Value>
std::vector<Value> weights_as(const weighted_graph& g)
{
  std::vector<Value> w;
  w.reserve(g.edge_count());
  for (edge_id e = 0; e < g.edge_count(); ++e)
    w.push_back(weight_as<Value>(g.edge_at(e).weight));
  return w;
}

template <class Value>
void update_into(basic_message_state<Value>& next, const basic_message_state<Value>& s,
                 const weighted_graph& g, std::span<const Value> weights,
                 std::span<const std::uint8_t> selected)
{
  const std::size_t slots = 2 * g.edge_count();
  if (s.node_to_edge.size() != slots)
    throw precondition_error("message state does not match the graph");
  if (!selected.empty() && selected.size() != 2 * slots)
    throw precondition_error("selection does not cover every message");
  auto chosen = [&](std::size_t id) { return selected.empty() || selected[id]; };

  next = s;
  next.step = s.step + 1;

  for (edge_id e = 0; e < g.edge_count(); ++e) {
    const Value& w = weights[e];
    for (std::size_t side = 0; side < 2; ++side) {
      const std::size_t to = 2 * std::size_t{e} + side;
      const std::size_t from = 2 * std::size_t{e} + (1 - side);
      if (!chosen(slots + to))
        continue;
      // Edge -> node: the other endpoint's opinion plus this edge's weight.
      next.edge_to_node[to] = w + s.node_to_edge[from];
      next.edge_to_node_depth[to] = std::min(s.node_to_edge_depth[from] + 1, depth_cap);
    }
  }

  for (node_id i = 0; i < g.node_count(); ++i) {
    auto inc = g.incident(i);
    // Largest two incoming values and smallest two depths, so that each
    // outgoing message can exclude its own edge in O(1).
    Value top1(0), top2(0);
    edge_id top_edge = 0;
    std::uint64_t low1 = depth_cap, low2 = depth_cap;
    edge_id low_edge = 0;
    for (edge_id f : inc) {
      const std::size_t in = slot(g, f, i);
      const Value& v = s.edge_to_node[in];
      if (v > top1) {
        top2 = top1;
        top1 = v;
        top_edge = f;
      } else if (v > top2) {
        top2 = v;
      }
      const std::uint64_t d = s.edge_to_node_depth[in];
      if (d < low1) {
        low2 = low1;
        low1 = d;
        low_edge = f;
      } else if (d < low2) {
        low2 = d;
      }
    }
    for (edge_id e : inc) {
      const std::size_t out = slot(g, e, i);
      if (!chosen(out))
        continue;
      next.node_to_edge[out] = -(e == top_edge && top1 > 0 ? top2 : top1);
      // A node with no other neighbours has a complete subtree already.
      next.node_to_edge_depth[out] = inc.size() > 1 ? (e == low_edge ? low2 : low1)
                                                    : std::min(s.node_to_edge_depth[out] + 1, depth_cap);
    }
  }
}

template <class Value>
void beliefs_into(basic_belief_state<Value>& b, const basic_message_state<Value>& s,
                  std::span<const Value> weights, const Value& tolerance)
{
  const std::size_t edges = weights.size();
  b.beta.resize(edges);
  b.decision.resize(edges);
  b.depth.resize(edges);
  for (std::size_t e = 0; e < edges; ++e) {
    const std::size_t a = 2 * e;
    b.beta[e] = weights[e] + s.node_to_edge[a] + s.node_to_edge[a + 1];
    if (b.beta[e] > tolerance)
      b.decision[e] = edge_decision::one;
    else if (b.beta[e] < -tolerance)
      b.decision[e] = edge_decision::zero;
    else
      b.decision[e] = edge_decision::tie;
    b.depth[e] = 1 + std::min(s.node_to_edge_depth[a], s.node_to_edge_depth[a + 1]);
  }
}

} // namespace

template <class Value>
basic_message_state<Value> update_step(const basic_message_state<Value>& s,
                                       const weighted_graph& g, std::span<const std::uint8_t> selected)
{
  const auto w = weights_as<Value>(g);
  basic_message_state<Value> next;
  update_into<Value>(next, s, g, w, selected);
  return next;
}

template <class Value>
basic_belief_state<Value> compute_beliefs(const basic_message_state<Value>& s,
                                          const weighted_graph& g, const Value& tolerance)
{
  if (s.node_to_edge.size() != 2 * g.edge_count())
    throw precondition_error("message state does not match the graph");
  const auto w = weights_as<Value>(g);
  basic_belief_state<Value> b;
  beliefs_into<Value>(b, s, w, tolerance);
  return b;
}


template basic_message_state<double> init_messages<double>(const weighted_graph&);
template basic_message_state<rational> init_messages<rational>(const weighted_graph&);
template basic_message_state<double> update_step<double>(const basic_message_state<double>&,
                                                         const weighted_graph&,
                                                         std::span<const std::uint8_t>);
template basic_message_state<rational> update_step<rational>(
    const basic_message_state<rational>&, const weighted_graph&, std::span<const std::uint8_t>);
template basic_belief_state<double> compute_beliefs<double>(const basic_message_state<double>&,
                                                            const weighted_graph&,
                                                            const double&);
template basic_belief_state<rational> compute_beliefs<rational>(
    const basic_message_state<rational>&, const weighted_graph&, const rational&);

double default_tie_tolerance(const weighted_graph& g)
{
  return 1e-9 * (1.0 + to_double(g.max_weight()));
}

std::uint64_t predicted_bound(const rational& w_max, const epsilon_gap& epsilon)
{
  if (epsilon.infinite)
    return 1;
  if (sgn(epsilon.value) <= 0)
    throw precondition_error("convergence bound needs a positive gap");
  long long k = ceil_to_integer(2 * w_max / epsilon.value);
  return static_cast<std::uint64_t>(std::max<long long>(k, 1));
}

void write_trace_header(std::ostream& out) { out << "step,edge,beta,decision\n"; }

namespace {

std::uint64_t layer_of(const belief_state& b)
{
  if (b.depth.empty())
    return 0;
  return *std::min_element(b.depth.begin(), b.depth.end());
}

bool forms_matching(const weighted_graph& g, const std::vector<edge_decision>& a)
{
  std::vector<bool> used(g.node_count(), false);
  for (edge_id e = 0; e < a.size(); ++e) {
    if (a[e] != edge_decision::one)
      continue;
    const edge& ed = g.edge_at(e);
    if (used[ed.u] || used[ed.v])
      return false;
    used[ed.u] = used[ed.v] = true;
  }
  return true;
}

std::optional<std::uint64_t> detect_period(const std::deque<std::vector<edge_decision>>& history)
{
  const std::size_t h = history.size();
  for (std::size_t p = 1; p <= h / 2; ++p) {
    bool ok = true;
    for (std::size_t i = p; i < h && ok; ++i)
      ok = history[i] == history[i - p];
    if (ok)
      return p;
  }
  return std::nullopt;
}

} // namespace

mp_outcome run_max_product(const weighted_graph& g, const schedule& sched,
                           const run_options& options)
{
  const std::uint64_t window =
      options.stability_window > 0 ? options.stability_window
                                   : std::max<std::uint64_t>(g.node_count(), 1);
  if (options.max_steps < window)
    throw precondition_error("max_steps must be at least the stability window");
  const double tolerance =
      options.tie_tolerance >= 0 ? options.tie_tolerance : default_tie_tolerance(g);

  mp_outcome out;
  if (g.edge_count() == 0) {
    out.verdict = mp_verdict::converged;
    out.result = matching{};
    out.step = 1;
    out.diagnostics.last_is_matching = true;
    return out;
  }

  auto state = init_messages<double>(g);
  auto scratch = state;
  const auto weights = weights_as<double>(g);
  belief_state b;
  message_selector selector(sched, state.message_count());
  // Each message is refreshed at least once per fairness window, and a tree
  // layer needs one refresh of each message kind, so this caps the updates.
  const std::uint64_t update_cap =
      2 * (options.max_steps + 2) * selector.fairness_window() + 16;

  constexpr std::size_t history_limit = 64;
  std::deque<std::vector<edge_decision>> history;
  std::optional<std::vector<edge_decision>> stable;
  std::uint64_t stable_since = 0;
  std::uint64_t last_layer = 0;
  double min_abs = 0, max_abs = 0;

  if (options.trace)
    write_trace_header(*options.trace);

  for (;;) {
    beliefs_into<double>(b, state, weights, tolerance);
    const std::uint64_t layer = layer_of(b);

    if (options.trace && state.step % std::max<std::uint64_t>(options.trace_every, 1) == 0)
      for (edge_id e = 0; e < g.edge_count(); ++e)
        *options.trace << state.step << ',' << e << ',' << b.beta[e] << ','
                       << to_symbol(b.decision[e]) << '\n';

    min_abs = std::numeric_limits<double>::infinity();
    max_abs = 0;
    for (double v : b.beta) {
      min_abs = std::min(min_abs, std::fabs(v));
      max_abs = std::max(max_abs, std::fabs(v));
    }

    const bool tie_free = std::none_of(b.decision.begin(), b.decision.end(),
                                       [](edge_decision d) { return d == edge_decision::tie; });
    if (!tie_free) {
      stable.reset();
    } else if (!stable || *stable != b.decision) {
      stable = b.decision;
      stable_since = layer;
    }

    if (layer != last_layer) {
      history.push_back(b.decision);
      if (history.size() > history_limit)
        history.pop_front();
      last_layer = layer;
    }

    out.diagnostics.layers = layer;
    out.diagnostics.updates = state.step;
    out.diagnostics.last_assignment = b.decision;

    if (stable && layer >= stable_since + window && layer >= options.settle_layers) {
      if (!forms_matching(g, *stable))
        throw structural_error("max-product settled on an assignment that is not a matching");
      std::vector<edge_id> edges;
      for (edge_id e = 0; e < stable->size(); ++e)
        if ((*stable)[e] == edge_decision::one)
          edges.push_back(e);
      out.verdict = mp_verdict::converged;
      out.result = matching::from_edges(g, std::move(edges));
      out.step = stable_since;
      break;
    }
    if (layer > options.max_steps || state.step >= update_cap)
      break;

    update_into<double>(scratch, state, g, weights, selector.next());
    std::swap(state, scratch);
  }

  auto& d = out.diagnostics;
  d.period = detect_period(history);
  d.ties_in_last = static_cast<std::size_t>(
      std::count(d.last_assignment.begin(), d.last_assignment.end(), edge_decision::tie));
  for (std::size_t i = 1; i < history.size(); ++i)
    d.changes_in_history += history[i] != history[i - 1];
  d.min_abs_belief = min_abs;
  d.max_abs_belief = max_abs;
  d.last_is_matching = forms_matching(g, d.last_assignment);
  return out;
}

} // namespace bpmatch
