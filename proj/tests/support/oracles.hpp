#ifndef BPMATCH_TESTS_ORACLES_HPP
#define BPMATCH_TESTS_ORACLES_HPP

// Independent reference computations used to freeze expected values. None
// of these share code paths with the library algorithms they check.

#include "bpmatch/graph.hpp"

#include <cstdint>
#include <vector>

namespace bpmatch::testing {

/// Every matching of g, by plain subset enumeration (|E| <= 20).
std::vector<std::vector<edge_id>> all_matchings(const weighted_graph& g);

struct subset_optimum {
  rational weight;
  std::size_t optimal_count = 0;
  std::vector<edge_id> lexicographically_first;
};

/// Maximum-weight matching by subset enumeration.
subset_optimum max_matching_by_subsets(const weighted_graph& g);

struct half_integral_optimum {
  rational value;
  std::size_t maximizers = 0;
  std::vector<rational> x; ///< one maximizer
};

/// Maximum of w.x over x in {0, 1/2, 1}^E with degree sums <= 1. Vertices of
/// the fractional matching polytope are half-integral, so this is the LP
/// optimum, and the LP optimum is unique iff there is exactly one maximizer.
/// Exponential: 3^|E|, |E| <= 12.
half_integral_optimum lp_by_half_integral_points(const weighted_graph& g);

} // namespace bpmatch::testing

#endif
