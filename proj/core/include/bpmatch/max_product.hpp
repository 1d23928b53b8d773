#ifndef BPMATCH_MAX_PRODUCT_HPP
#define BPMATCH_MAX_PRODUCT_HPP

#include "bpmatch/graph.hpp"
#include "bpmatch/lp_relax.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace bpmatch {

/// Max-product messages on the edge/node factor graph, stored as log-ratios
/// log(m[1] / m[0]). Slot 2*e + s refers to edge e and its endpoint s
/// (0 = edge.u, 1 = edge.v):
///   node_to_edge[2e+s]  message from that endpoint to e
///   edge_to_node[2e+s]  message from e to that endpoint
///
/// Depth counters record how many computation-tree layers each message has
/// absorbed; they are a lower bound on tree fullness and drive convergence
/// detection under asynchronous schedules.
template <class Value>
struct basic_message_state {
  std::vector<Value> node_to_edge;
  std::vector<Value> edge_to_node;
  std::vector<std::uint64_t> node_to_edge_depth;
  std::vector<std::uint64_t> edge_to_node_depth;
  std::uint64_t step = 0;

  std::size_t message_count() const noexcept
  {
    return node_to_edge.size() + edge_to_node.size();
  }
};

using message_state = basic_message_state<double>;
using exact_message_state = basic_message_state<rational>;

enum class edge_decision { zero, one, tie };

char to_symbol(edge_decision d) noexcept;

template <class Value>
struct basic_belief_state {
  std::vector<Value> beta; ///< log(b_e[1] / b_e[0]) per edge
  std::vector<edge_decision> decision;
  /// Computation tree of each edge is full at least up to this depth.
  std::vector<std::uint64_t> depth;
};

using belief_state = basic_belief_state<double>;
using exact_belief_state = basic_belief_state<rational>;

enum class schedule_kind { synchronous, asynchronous };

struct schedule {
  schedule_kind kind = schedule_kind::synchronous;
  std::uint64_t seed = 0;

  static schedule synchronous() { return {}; }
  static schedule asynchronous(std::uint64_t seed) { return {schedule_kind::asynchronous, seed}; }
};

/// Deterministic stream of message subsets. A synchronous schedule selects
/// everything; an asynchronous one selects each message with probability
/// 1/2 and forces any message idle for fairness_window() - 1 steps, so every
/// message is updated at least once per window.
class message_selector {
public:
  message_selector(const schedule& sched, std::size_t message_count);

  /// Selection for the next step; message ids below 2|E| are node->edge
  /// slots, the rest are edge->node slots offset by 2|E|.
  const std::vector<std::uint8_t>& next();

  std::size_t fairness_window() const noexcept { return window_; }

private:
  schedule sched_;
  std::size_t window_;
  std::mt19937_64 rng_;
  std::vector<std::uint8_t> selected_;
  std::vector<std::size_t> idle_;
};

template <class Value>
basic_message_state<Value> init_messages(const weighted_graph& g);

/// One update: every selected message is recomputed from the previous
/// state's values. An empty selection means "all messages".
template <class Value>
basic_message_state<Value> update_step(const basic_message_state<Value>& s,
                                       const weighted_graph& g,
                                       std::span<const std::uint8_t> selected = {});

/// Beliefs beta_e = w_e + lambda(u->e) + lambda(v->e). |beta| <= tolerance
/// decodes as a tie.
template <class Value>
basic_belief_state<Value> compute_beliefs(const basic_message_state<Value>& s,
                                          const weighted_graph& g, const Value& tolerance);

/// Default tie tolerance 1e-9 * (1 + w_max).
double default_tie_tolerance(const weighted_graph& g);

/// ceil(2 w_max / epsilon), at least 1; an infinite gap gives 1.
/// Throws precondition_error for epsilon <= 0.
std::uint64_t predicted_bound(const rational& w_max, const epsilon_gap& epsilon);

struct run_options {
  /// Budget and window are counted in full computation-tree layers.
  std::uint64_t max_steps = 1000;
  /// 0 selects the default, |V| layers (at least 1).
  std::uint64_t stability_window = 0;
  /// Convergence is not declared before the tree reaches this depth, however
  /// long the assignment has been constant.
  std::uint64_t settle_layers = 0;
  /// Negative selects default_tie_tolerance.
  double tie_tolerance = -1.0;
  /// Optional CSV trace: step,edge,beta,decision; every trace_every updates.
  std::ostream* trace = nullptr;
  std::uint64_t trace_every = 1;
};

enum class mp_verdict { converged, no_convergence };

const char* to_string(mp_verdict v) noexcept;

struct mp_diagnostics {
  std::uint64_t layers = 0;  ///< tree depth reached
  std::uint64_t updates = 0; ///< update steps performed
  /// Smallest period of the per-layer decoded assignment over the trailing
  /// history, when one exists.
  std::optional<std::uint64_t> period;
  std::size_t ties_in_last = 0;
  std::size_t changes_in_history = 0;
  double min_abs_belief = 0;
  double max_abs_belief = 0;
  std::vector<edge_decision> last_assignment;
  bool last_is_matching = false;
};

struct mp_outcome {
  mp_verdict verdict = mp_verdict::no_convergence;
  std::optional<matching> result;
  /// Tree depth from which the decoded assignment stayed constant.
  std::uint64_t step = 0;
  mp_diagnostics diagnostics;

  bool converged() const noexcept { return verdict == mp_verdict::converged; }
};

/// Runs max-product until the decoded assignment is tie-free, forms a
/// matching and stays constant for the stability window, or until the layer
/// budget is spent. A stable tie-free assignment that is not a matching
/// raises structural_error.
mp_outcome run_max_product(const weighted_graph& g, const schedule& sched,
                           const run_options& options = {});

void write_trace_header(std::ostream& out);

} // namespace bpmatch

#endif
