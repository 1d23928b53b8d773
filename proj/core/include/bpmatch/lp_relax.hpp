#ifndef BPMATCH_LP_RELAX_HPP
#define BPMATCH_LP_RELAX_HPP

#include "bpmatch/graph.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bpmatch {

enum class tightness { tight, loose };

const char* to_string(tightness t) noexcept;

/// Minimum dual slack over non-matching edges. `infinite` when every edge is
/// in the matching (the minimization is empty).
struct epsilon_gap {
  rational value;
  bool infinite = false;
};

struct lp_result {
  std::vector<rational> x; ///< per edge, in [0, 1]
  std::vector<rational> z; ///< per node, >= 0
  rational primal_objective;
  rational dual_objective;
  tightness verdict = tightness::loose;
  bool primal_unique = false;
  /// Present iff the relaxation is tight (which also implies A1 and A2).
  std::optional<epsilon_gap> epsilon;
  /// Set when the simplex multipliers were replaced by a point found by
  /// searching the optimal dual face.
  bool dual_face_searched = false;
  std::size_t pivots = 0;

  bool tight() const noexcept { return verdict == tightness::tight; }
};

/// Solves the degree-constrained relaxation exactly and picks an optimal
/// dual. The dual is the simplex multiplier vector unless it violates
/// z_i <= w_max or leaves zero slack on an edge with x_e = 0; then the optimal
/// dual face is searched for a point inside the box that maximizes the
/// smallest such slack.
lp_result solve_lp(const weighted_graph& g);

bool check_a2(const lp_result& r) noexcept;

/// The four complementary-slackness clauses for a tight relaxation.
struct slackness_report {
  bool matched_edges_tight = false;     ///< w_ij == z_i + z_j on matched edges
  bool unmatched_edges_covered = false; ///< w_ij <= z_i + z_j elsewhere
  bool unsaturated_nodes_zero = false;  ///< z_i == 0 where no matched edge
  bool duals_bounded = false;           ///< z_i <= max_e w_e

  bool all() const noexcept
  {
    return matched_edges_tight && unmatched_edges_covered && unsaturated_nodes_zero &&
           duals_bounded;
  }
};

/// Throws precondition_error on a loose result.
slackness_report check_complementary_slackness(const weighted_graph& g, const matching& m,
                                               const lp_result& r);

/// min over e not in m of z_u + z_v - w_e, no sign checks.
epsilon_gap min_dual_slack(const weighted_graph& g, const matching& m,
                           const std::vector<rational>& z);

/// Same minimum, for a tight result. Throws precondition_error on a loose
/// result and structural_error when the gap is not strictly positive.
epsilon_gap compute_epsilon(const weighted_graph& g, const matching& m, const lp_result& r);

/// Edges with x_e == 1, as a matching. Only meaningful for integral x.
matching integral_support(const weighted_graph& g, const lp_result& r);

/// JSON diagnostic dump: x and z as "p/q" strings, objectives, verdict, gap.
std::string lp_dump(const weighted_graph& g, const lp_result& r);

} // namespace bpmatch

#endif
