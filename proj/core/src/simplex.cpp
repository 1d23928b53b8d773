#include "bpmatch/simplex.hpp"

#include "bpmatch/error.hpp"

namespace bpmatch {

exact_simplex::exact_simplex(const linear_program& lp) : structural_(lp.variable_count)
{
  if (lp.objective.size() != lp.variable_count)
    throw precondition_error("objective length does not match variable count");
  structural_costs_ = lp.objective;

  const std::size_t m = lp.constraints.size();
  tableau_.assign(m, row(structural_));
  rhs_.resize(m);
  basis_.resize(m);
  identity_column_.resize(m);
  negated_.assign(m, false);
  relation_.resize(m);

  for (std::size_t i = 0; i < m; ++i) {
    const auto& c = lp.constraints[i];
    for (const auto& [var, coef] : c.terms) {
      if (var >= structural_)
        throw precondition_error("constraint references unknown variable");
      tableau_[i][var] += coef;
    }
    rhs_[i] = c.rhs;
    relation_[i] = c.rel;
    if (sgn(rhs_[i]) < 0) {
      negated_[i] = true;
      rhs_[i] = -rhs_[i];
      for (auto& a : tableau_[i])
        a = -a;
      if (relation_[i] == relation::less_equal)
        relation_[i] = relation::greater_equal;
      else if (relation_[i] == relation::greater_equal)
        relation_[i] = relation::less_equal;
    }
  }

  columns_ = structural_;
  artificial_.assign(structural_, false);
  auto add_column = [&](std::size_t row_index, int coefficient, bool is_artificial) {
    for (std::size_t i = 0; i < m; ++i)
      tableau_[i].push_back(i == row_index ? rational(coefficient) : rational(0));
    artificial_.push_back(is_artificial);
    return columns_++;
  };

  for (std::size_t i = 0; i < m; ++i) {
    switch (relation_[i]) {
    case relation::less_equal:
      basis_[i] = identity_column_[i] = add_column(i, 1, false);
      break;
    case relation::greater_equal:
      add_column(i, -1, false);
      basis_[i] = identity_column_[i] = add_column(i, 1, true);
      break;
    case relation::equal:
      basis_[i] = identity_column_[i] = add_column(i, 1, true);
      break;
    }
  }
}

void exact_simplex::pivot(std::size_t r, std::size_t c)
{
  const rational p = tableau_[r][c];
  for (auto& a : tableau_[r])
    a /= p;
  rhs_[r] /= p;

  for (std::size_t i = 0; i < tableau_.size(); ++i) {
    if (i == r || sgn(tableau_[i][c]) == 0)
      continue;
    const rational f = tableau_[i][c];
    for (std::size_t j = 0; j < columns_; ++j)
      if (sgn(tableau_[r][j]) != 0)
        tableau_[i][j] -= f * tableau_[r][j];
    rhs_[i] -= f * rhs_[r];
  }
  if (sgn(reduced_[c]) != 0) {
    const rational f = reduced_[c];
    for (std::size_t j = 0; j < columns_; ++j)
      if (sgn(tableau_[r][j]) != 0)
        reduced_[j] -= f * tableau_[r][j];
    value_ -= f * rhs_[r];
  }
  basis_[r] = c;
  ++pivots_;
}

void exact_simplex::load_objective(const std::vector<rational>& costs)
{
  costs_ = costs;
  reduced_.assign(columns_, rational(0));
  value_ = 0;
  for (std::size_t j = 0; j < columns_; ++j)
    reduced_[j] = -costs_[j];
  for (std::size_t i = 0; i < tableau_.size(); ++i) {
    const rational& cb = costs_[basis_[i]];
    if (sgn(cb) == 0)
      continue;
    for (std::size_t j = 0; j < columns_; ++j)
      reduced_[j] += cb * tableau_[i][j];
    value_ += cb * rhs_[i];
  }
}

lp_status exact_simplex::optimize(const std::vector<bool>& allowed)
{
  for (;;) {
    std::size_t entering = columns_;
    for (std::size_t j = 0; j < columns_; ++j) {
      if (allowed[j] && sgn(reduced_[j]) < 0) {
        entering = j;
        break;
      }
    }
    if (entering == columns_)
      return lp_status::optimal;

    std::size_t leaving = tableau_.size();
    rational best_ratio;
    for (std::size_t i = 0; i < tableau_.size(); ++i) {
      if (sgn(tableau_[i][entering]) <= 0)
        continue;
      rational ratio = rhs_[i] / tableau_[i][entering];
      if (leaving == tableau_.size() || ratio < best_ratio ||
          (ratio == best_ratio && basis_[i] < basis_[leaving])) {
        leaving = i;
        best_ratio = ratio;
      }
    }
    if (leaving == tableau_.size())
      return lp_status::unbounded;
    pivot(leaving, entering);
  }
}

lp_status exact_simplex::solve()
{
  bool has_artificial = false;
  for (bool a : artificial_)
    has_artificial = has_artificial || a;

  if (has_artificial) {
    std::vector<rational> phase_one(columns_);
    for (std::size_t j = 0; j < columns_; ++j)
      if (artificial_[j])
        phase_one[j] = -1;
    load_objective(phase_one);
    optimize(std::vector<bool>(columns_, true));
    if (sgn(value_) < 0)
      return lp_status::infeasible;

    // Pivot zero-level artificials out where possible; rows that cannot be
    // cleared are redundant and keep their artificial at zero for good.
    for (std::size_t i = 0; i < tableau_.size(); ++i) {
      if (!artificial_[basis_[i]])
        continue;
      for (std::size_t j = 0; j < columns_; ++j) {
        if (!artificial_[j] && sgn(tableau_[i][j]) != 0) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  std::vector<rational> phase_two(columns_);
  for (std::size_t j = 0; j < structural_; ++j)
    phase_two[j] = structural_costs_[j];
  load_objective(phase_two);

  std::vector<bool> allowed(columns_);
  for (std::size_t j = 0; j < columns_; ++j)
    allowed[j] = !artificial_[j];
  lp_status status = optimize(allowed);
  solved_ = status == lp_status::optimal;
  return status;
}

rational exact_simplex::column_value(std::size_t c) const
{
  for (std::size_t i = 0; i < basis_.size(); ++i)
    if (basis_[i] == c)
      return rhs_[i];
  return 0;
}

std::vector<rational> exact_simplex::primal() const
{
  std::vector<rational> x(structural_);
  for (std::size_t i = 0; i < basis_.size(); ++i)
    if (basis_[i] < structural_)
      x[basis_[i]] = rhs_[i];
  return x;
}

rational exact_simplex::objective_value() const { return value_; }

std::vector<rational> exact_simplex::duals() const
{
  if (!solved_)
    throw precondition_error("duals requested before an optimal solve");
  std::vector<rational> y(tableau_.size());
  for (std::size_t i = 0; i < tableau_.size(); ++i) {
    const std::size_t c = identity_column_[i];
    y[i] = reduced_[c] + costs_[c];
    if (negated_[i])
      y[i] = -y[i];
  }
  return y;
}

rational exact_simplex::reduced_cost(std::size_t variable) const
{
  return reduced_.at(variable);
}

bool exact_simplex::optimum_unique() const
{
  if (!solved_)
    throw precondition_error("uniqueness requested before an optimal solve");

  std::vector<bool> is_basic(columns_, false);
  for (std::size_t c : basis_)
    is_basic[c] = true;

  // Columns with positive reduced cost are zero on the whole optimal face.
  std::vector<bool> on_face(columns_);
  for (std::size_t j = 0; j < columns_; ++j)
    on_face[j] = !artificial_[j] && sgn(reduced_[j]) == 0;

  for (std::size_t j = 0; j < columns_; ++j) {
    if (is_basic[j] || !on_face[j])
      continue;
    exact_simplex probe = *this;
    std::vector<rational> target(columns_);
    target[j] = 1;
    probe.load_objective(target);
    if (probe.optimize(on_face) == lp_status::unbounded || sgn(probe.value_) > 0)
      return false;
  }
  return true;
}

} // namespace bpmatch
