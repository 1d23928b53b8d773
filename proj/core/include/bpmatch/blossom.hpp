#ifndef BPMATCH_BLOSSOM_HPP
#define BPMATCH_BLOSSOM_HPP

#include "bpmatch/comp_tree.hpp"
#include "bpmatch/error.hpp"
#include "bpmatch/graph.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bpmatch {

enum class node_class { saturated_leaf, unsaturated, interior };

/// Edges of M* plus every edge with positive LP value, and a classification
/// of nodes relative to M*.
struct support_graph {
  std::vector<bool> in_support; ///< per edge
  std::vector<bool> saturated;  ///< per node, by M*
  std::vector<node_class> kind; ///< per node

  std::vector<edge_id> edges() const;
};

/// Throws precondition_error when x and mstar do not fit the graph, or when
/// every positive-x edge is already in M* (a tight relaxation).
support_graph support_graph_of(const weighted_graph& g, const std::vector<rational>& x,
                               const matching& mstar);

/// An even alternating cycle or an alternating path between two M*-unsaturated
/// nodes inside the support graph. `in_first` flags membership in M*.
std::optional<alternating_component> find_augmentation(const weighted_graph& g,
                                                       const support_graph& sg,
                                                       const matching& mstar);

enum class certificate_kind { stemmed_blossom, blossom_pair };

const char* to_string(certificate_kind k) noexcept;

/// Cycles are listed starting at their base. A stem runs from the base
/// outwards; the path of a pair runs from the base of `cycle` to the base of
/// `cycle2`.
struct blossom_certificate {
  certificate_kind kind = certificate_kind::stemmed_blossom;
  std::vector<edge_id> cycle;
  std::vector<edge_id> cycle2; ///< pairs only
  std::vector<edge_id> path;
  rational margin;

  bool operator==(const blossom_certificate&) const = default;
};

enum class certificate_fault {
  unknown_edge,
  cycle_not_closed,
  cycle_even,
  not_a_blossom,
  path_not_alternating,
  path_misrooted,
  path_end_saturated,
  overlap,
  not_bad,
  margin_mismatch,
};

const char* to_string(certificate_fault f) noexcept;

class certificate_error : public structural_error {
public:
  certificate_error(certificate_fault fault, const std::string& what)
      : structural_error(std::string(to_string(fault)) + ": " + what), fault_(fault) {}

  certificate_fault fault() const noexcept { return fault_; }

private:
  certificate_fault fault_;
};

/// Base of an odd cycle with (|C|-1)/2 edges of `mstar`: the one node the
/// cycle's matched edges leave uncovered. nullopt when `cycle` is not such a
/// cycle.
std::optional<node_id> blossom_base(const weighted_graph& g, const matching& mstar,
                                    const std::vector<edge_id>& cycle);

/// Badness margin from the certificate's edge lists (no structural checks):
///   stemmed: w(C-M) + 2w(P-M) - w(C&M) - 2w(P&M)
///   pair:    w(C1-M) + w(C2-M) + 2w(P-M) - w(C1&M) - w(C2&M) - 2w(P&M)
rational badness_margin(const weighted_graph& g, const matching& mstar,
                        const blossom_certificate& cert);

/// Checks every structural requirement, recomputes the margin exactly and
/// returns it. Throws certificate_error naming the first violated rule,
/// including a non-positive margin or one that differs from cert.margin.
rational verify_certificate(const blossom_certificate& cert, const weighted_graph& g,
                            const matching& mstar);

/// Searches maximal alternating paths of the support graph, closes blossoms
/// at their endpoints and returns the bad structure with the largest margin
/// (ties: smallest edge lists). Throws structural_error when an endpoint
/// configuration that optimality rules out is met, or when nothing bad is
/// found.
blossom_certificate find_bad_certificate(const weighted_graph& g, const support_graph& sg,
                                         const matching& mstar);

/// Visits every stemmed blossom and blossom pair of `g` relative to `mstar`,
/// bad or not, with its margin filled in. Only edges flagged in `allowed`
/// are used when it is given. Stops early when `visit` returns false.
void for_each_blossom_structure(const weighted_graph& g, const matching& mstar,
                                const std::function<bool(const blossom_certificate&)>& visit,
                                const std::vector<bool>* allowed = nullptr);

/// Lifting of a stemmed blossom into the computation tree of one of its
/// matched cycle edges: two alternating tree paths leave the root, wind
/// around the cycle in opposite directions and run down the stem.
struct tree_refutation_report {
  computation_tree tree;
  edge_id root = 0;
  std::vector<tree_edge_id> first_path;  ///< from the root's upper endpoint
  std::vector<tree_edge_id> second_path; ///< from the root's lower endpoint
  rational d1; ///< w(P1 - M) - w(P1 & M)
  rational d2;
  rational gain; ///< d1 + d2 - w(root)
  tree_matching projected;
  tree_matching improved;
};

/// Uses the tree of depth k + |V|. Throws precondition_error for k == 0 or a
/// blossom pair, certificate_error for an invalid certificate.
tree_refutation_report tree_refutation(const blossom_certificate& cert, const weighted_graph& g,
                                       const matching& mstar, std::uint32_t k);

/// kind / cycle / cycle2 / path / margin, one per line; edges as "u-v" labels.
std::string format_certificate(const blossom_certificate& cert, const weighted_graph& g);

} // namespace bpmatch

#endif
