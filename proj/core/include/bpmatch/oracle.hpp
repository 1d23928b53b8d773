#ifndef BPMATCH_ORACLE_HPP
#define BPMATCH_ORACLE_HPP

#include "bpmatch/graph.hpp"

#include <cstddef>
#include <optional>

namespace bpmatch {

inline constexpr std::size_t default_oracle_edge_limit = 24;

struct oracle_result {
  matching best;
  rational best_weight;
  bool unique = true;
  /// Heaviest matching other than `best`; absent only when the graph has a
  /// single matching (no edges).
  std::optional<rational> runner_up_weight;
};

/// Exhaustive maximum-weight matching. Branch and bound over edges sorted by
/// descending weight; among several optima the lexicographically smallest
/// sorted edge-id set is reported and `unique` is false.
/// Throws size_limit_error when the graph has more than `edge_limit` edges.
oracle_result brute_force_max_matching(const weighted_graph& g,
                                       std::size_t edge_limit = default_oracle_edge_limit);

/// Uniqueness of the maximum-weight matching.
bool check_a1(const weighted_graph& g, std::size_t edge_limit = default_oracle_edge_limit);

} // namespace bpmatch

#endif
