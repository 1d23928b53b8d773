#include "bpmatch/lp_relax.hpp"

#include "bpmatch/error.hpp"
#include "bpmatch/simplex.hpp"

#include "json.hpp"

namespace bpmatch {

const char* to_string(tightness t) noexcept
{
  return t == tightness::tight ? "tight" : "loose";
}

namespace {

bool duals_acceptable(const weighted_graph& g, const std::vector<rational>& x,
                      const std::vector<rational>& z)
{
  for (const rational& zi : z)
    if (zi > g.max_weight())
      return false;
  for (edge_id e = 0; e < g.edge_count(); ++e) {
    const edge& ed = g.edge_at(e);
    if (sgn(x[e]) == 0 && z[ed.u] + z[ed.v] == ed.weight)
      return false;
  }
  return true;
}

// Optimal dual face intersected with the box z <= w_max, maximizing the
// smallest slack over edges the primal leaves at zero.
std::optional<std::vector<rational>> search_dual_face(const weighted_graph& g,
                                                      const std::vector<rational>& x,
                                                      const rational& optimum)
{
  const std::size_t n = g.node_count();
  bool any_zero_edge = false;
  for (edge_id e = 0; e < g.edge_count(); ++e)
    any_zero_edge = any_zero_edge || sgn(x[e]) == 0;

  const std::size_t gap_var = n;
  linear_program lp;
  lp.variable_count = any_zero_edge ? n + 1 : n;
  lp.objective.assign(lp.variable_count, rational(0));
  if (any_zero_edge)
    lp.objective[gap_var] = 1;

  for (edge_id e = 0; e < g.edge_count(); ++e) {
    const edge& ed = g.edge_at(e);
    linear_constraint c;
    c.terms = {{ed.u, rational(1)}, {ed.v, rational(1)}};
    if (sgn(x[e]) == 0)
      c.terms.emplace_back(gap_var, rational(-1));
    c.rel = relation::greater_equal;
    c.rhs = ed.weight;
    lp.constraints.push_back(std::move(c));
  }
  linear_constraint total;
  for (node_id v = 0; v < n; ++v)
    total.terms.emplace_back(v, rational(1));
  total.rel = relation::equal;
  total.rhs = optimum;
  lp.constraints.push_back(std::move(total));
  for (node_id v = 0; v < n; ++v)
    lp.constraints.push_back({{{v, rational(1)}}, relation::less_equal, g.max_weight()});

  exact_simplex solver(lp);
  if (solver.solve() != lp_status::optimal)
    return std::nullopt;
  auto sol = solver.primal();
  sol.resize(n);
  return sol;
}

} // namespace

lp_result solve_lp(const weighted_graph& g)
{
  const std::size_t m = g.edge_count();
  const std::size_t n = g.node_count();

  linear_program lp;
  lp.variable_count = m;
  for (const edge& e : g.edges())
    lp.objective.push_back(e.weight);
  std::vector<node_id> row_node;
  for (node_id v = 0; v < n; ++v) {
    if (g.degree(v) == 0)
      continue;
    linear_constraint c;
    for (edge_id e : g.incident(v))
      c.terms.emplace_back(e, rational(1));
    c.rel = relation::less_equal;
    c.rhs = 1;
    lp.constraints.push_back(std::move(c));
    row_node.push_back(v);
  }

  exact_simplex solver(lp);
  if (solver.solve() != lp_status::optimal)
    throw structural_error("matching relaxation reported infeasible or unbounded");

  lp_result r;
  r.x = solver.primal();
  r.primal_objective = solver.objective_value();
  r.primal_unique = solver.optimum_unique();
  r.pivots = solver.pivot_count();

  r.z.assign(n, rational(0));
  auto y = solver.duals();
  for (std::size_t i = 0; i < y.size(); ++i)
    r.z[row_node[i]] = y[i];
  for (const rational& zi : r.z)
    if (sgn(zi) < 0)
      throw structural_error("negative dual multiplier on a <= row");

  if (!duals_acceptable(g, r.x, r.z)) {
    if (auto face = search_dual_face(g, r.x, r.primal_objective)) {
      r.z = std::move(*face);
      r.dual_face_searched = true;
    }
  }

  for (const rational& zi : r.z)
    r.dual_objective += zi;
  for (const edge& e : g.edges())
    if (r.z[e.u] + r.z[e.v] < e.weight)
      throw structural_error("dual infeasible on an edge");
  if (r.dual_objective != r.primal_objective)
    throw structural_error("non-zero duality gap: primal " + to_string(r.primal_objective) +
                           ", dual " + to_string(r.dual_objective));

  bool integral = true;
  for (const rational& xe : r.x)
    integral = integral && (sgn(xe) == 0 || xe == 1);
  r.verdict = integral && r.primal_unique ? tightness::tight : tightness::loose;

  if (r.tight())
    r.epsilon = min_dual_slack(g, integral_support(g, r), r.z);
  return r;
}

bool check_a2(const lp_result& r) noexcept { return r.primal_unique; }

slackness_report check_complementary_slackness(const weighted_graph& g, const matching& m,
                                               const lp_result& r)
{
  if (!r.tight())
    throw precondition_error("complementary slackness audit needs a tight relaxation");
  if (r.z.size() != g.node_count())
    throw precondition_error("dual vector does not match the graph");

  slackness_report rep{true, true, true, true};
  for (edge_id e = 0; e < g.edge_count(); ++e) {
    const edge& ed = g.edge_at(e);
    const rational cover = r.z[ed.u] + r.z[ed.v];
    if (m.contains(e))
      rep.matched_edges_tight = rep.matched_edges_tight && cover == ed.weight;
    else
      rep.unmatched_edges_covered = rep.unmatched_edges_covered && ed.weight <= cover;
  }
  auto mates = m.mates(g);
  for (node_id v = 0; v < g.node_count(); ++v) {
    if (!mates[v])
      rep.unsaturated_nodes_zero = rep.unsaturated_nodes_zero && sgn(r.z[v]) == 0;
    rep.duals_bounded = rep.duals_bounded && r.z[v] <= g.max_weight();
  }
  return rep;
}

epsilon_gap min_dual_slack(const weighted_graph& g, const matching& m,
                           const std::vector<rational>& z)
{
  epsilon_gap gap;
  gap.infinite = true;
  for (edge_id e = 0; e < g.edge_count(); ++e) {
    if (m.contains(e))
      continue;
    const edge& ed = g.edge_at(e);
    rational slack = z[ed.u] + z[ed.v] - ed.weight;
    if (gap.infinite || slack < gap.value) {
      gap.value = slack;
      gap.infinite = false;
    }
  }
  return gap;
}

epsilon_gap compute_epsilon(const weighted_graph& g, const matching& m, const lp_result& r)
{
  if (!r.tight())
    throw precondition_error("epsilon gap is defined only for a tight relaxation");
  epsilon_gap gap = min_dual_slack(g, m, r.z);
  if (!gap.infinite && sgn(gap.value) <= 0)
    throw structural_error("non-positive dual gap " + to_string(gap.value) +
                           ": uniqueness assumptions do not hold");
  return gap;
}

matching integral_support(const weighted_graph& g, const lp_result& r)
{
  std::vector<edge_id> edges;
  for (edge_id e = 0; e < g.edge_count(); ++e)
    if (r.x[e] == 1)
      edges.push_back(e);
  return matching::from_edges(g, std::move(edges));
}

std::string lp_dump(const weighted_graph& g, const lp_result& r)
{
  nlohmann::ordered_json j;
  auto& xs = j["x"] = nlohmann::ordered_json::array();
  for (edge_id e = 0; e < g.edge_count(); ++e) {
    const edge& ed = g.edge_at(e);
    xs.push_back({{"u", g.label(ed.u)}, {"v", g.label(ed.v)}, {"x", to_string(r.x[e])}});
  }
  auto& zs = j["z"] = nlohmann::ordered_json::array();
  for (node_id v = 0; v < g.node_count(); ++v)
    zs.push_back({{"node", g.label(v)}, {"z", to_string(r.z[v])}});
  j["primal_objective"] = to_string(r.primal_objective);
  j["dual_objective"] = to_string(r.dual_objective);
  j["tightness"] = to_string(r.verdict);
  j["primal_unique"] = r.primal_unique;
  if (r.epsilon)
    j["epsilon"] = r.epsilon->infinite ? std::string("inf") : to_string(r.epsilon->value);
  else
    j["epsilon"] = nullptr;
  return j.dump(2);
}

} // namespace bpmatch
