#ifndef BPMATCH_SIMPLEX_HPP
#define BPMATCH_SIMPLEX_HPP

#include "bpmatch/rational.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace bpmatch {

enum class relation { less_equal, greater_equal, equal };

struct linear_constraint {
  std::vector<std::pair<std::size_t, rational>> terms;
  relation rel = relation::less_equal;
  rational rhs;
};

/// maximize objective . x  subject to constraints, x >= 0.
struct linear_program {
  std::size_t variable_count = 0;
  std::vector<rational> objective;
  std::vector<linear_constraint> constraints;
};

enum class lp_status { optimal, infeasible, unbounded };

/// Dense two-phase tableau simplex over exact rationals, Bland's rule for
/// both entering and leaving choices (no cycling). Intended for the small
/// programs this library builds; rows and columns are not sparsified.
///
/// After solve() returns optimal, the tableau stays available for dual
/// extraction and for re-optimizing other objectives over the optimal face.
class exact_simplex {
public:
  explicit exact_simplex(const linear_program& lp);

  lp_status solve();

  /// Structural variable values.
  std::vector<rational> primal() const;
  rational objective_value() const;

  /// One multiplier per constraint, sign-normalized so that for a maximize
  /// problem a <= row has a non-negative dual.
  std::vector<rational> duals() const;

  /// Reduced cost of a structural variable (>= 0 at optimality).
  rational reduced_cost(std::size_t variable) const;

  /// True iff no other point attains the optimum: every nonbasic column with
  /// zero reduced cost is maximized over the optimal face and must stay at 0.
  bool optimum_unique() const;

  std::size_t pivot_count() const noexcept { return pivots_; }

private:
  using row = std::vector<rational>;

  void pivot(std::size_t r, std::size_t c);
  void load_objective(const std::vector<rational>& costs);
  lp_status optimize(const std::vector<bool>& allowed);
  rational column_value(std::size_t c) const;

  std::size_t structural_ = 0;
  std::size_t columns_ = 0;
  std::vector<row> tableau_;
  std::vector<rational> rhs_;
  std::vector<std::size_t> basis_;

  // Reduced-cost row and the cost vector it was built from.
  row reduced_;
  rational value_;
  std::vector<rational> costs_;

  std::vector<bool> artificial_;
  // For each constraint: the column that started as its unit vector, and
  // whether the row was negated to make its right-hand side non-negative.
  std::vector<std::size_t> identity_column_;
  std::vector<bool> negated_;
  std::vector<relation> relation_;
  std::vector<rational> structural_costs_;
  std::size_t pivots_ = 0;
  bool solved_ = false;
};

} // namespace bpmatch

#endif
