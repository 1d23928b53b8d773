// bpmatch: command-line front end for the matching laboratory.
//
// Exit codes: 0 success, 1 usage or precondition problem, 2 disagreement in
// an experiment, 3 I/O or parse error, 4 internal assertion.

#include "bpmatch/blossom.hpp"
#include "bpmatch/comp_tree.hpp"
#include "bpmatch/harness.hpp"
#include "bpmatch/lp_relax.hpp"
#include "bpmatch/max_product.hpp"
#include "bpmatch/oracle.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace bpmatch;

namespace {

constexpr int exit_usage = 1;
constexpr int exit_io = 3;
constexpr int exit_internal = 4;

std::string edge_list(const weighted_graph& g, std::span<const edge_id> edges)
{
  std::string out;
  for (edge_id e : edges) {
    if (!out.empty())
      out += ' ';
    out += g.label(g.edge_at(e).u) + "-" + g.label(g.edge_at(e).v);
  }
  return out;
}

int cmd_solve(const std::string& path, std::size_t limit)
{
  weighted_graph g = load_graph(path);
  oracle_result r = brute_force_max_matching(g, limit);
  std::cout << "weight " << to_string(r.best_weight) << '\n'
            << "edges " << edge_list(g, r.best.edges()) << '\n'
            << "unique " << (r.unique ? "yes" : "no") << '\n';
  if (r.runner_up_weight)
    std::cout << "runner_up " << to_string(*r.runner_up_weight) << '\n';
  return 0;
}

int cmd_lp(const std::string& path, bool json)
{
  weighted_graph g = load_graph(path);
  lp_result r = solve_lp(g);
  if (json) {
    std::cout << lp_dump(g, r) << '\n';
    return 0;
  }
  std::cout << to_string(r.verdict) << '\n'
            << "objective " << to_string(r.primal_objective) << '\n'
            << "primal_unique " << (r.primal_unique ? "yes" : "no") << '\n';
  for (edge_id e = 0; e < g.edge_count(); ++e) {
    const edge& ed = g.edge_at(e);
    std::cout << "x " << g.label(ed.u) << ' ' << g.label(ed.v) << ' ' << to_string(r.x[e]) << '\n';
  }
  for (node_id v = 0; v < g.node_count(); ++v)
    std::cout << "z " << g.label(v) << ' ' << to_string(r.z[v]) << '\n';
  if (r.epsilon)
    std::cout << "epsilon "
              << (r.epsilon->infinite ? std::string("inf") : to_string(r.epsilon->value)) << '\n'
              << "bound " << predicted_bound(g.max_weight(), *r.epsilon) << '\n';
  return 0;
}

struct mp_args {
  std::string schedule = "sync";
  std::uint64_t seed = 0;
  std::uint64_t max_steps = 1000;
  std::uint64_t window = 0;
  std::uint64_t settle = 0;
  std::string trace;
};

int cmd_mp(const std::string& path, const mp_args& a)
{
  weighted_graph g = load_graph(path);
  run_options opts;
  opts.max_steps = a.max_steps;
  opts.stability_window = a.window;
  opts.settle_layers = a.settle;
  std::ofstream trace;
  if (!a.trace.empty()) {
    trace.open(a.trace);
    if (!trace)
      throw io_error("cannot write " + a.trace);
    opts.trace = &trace;
  }
  schedule s = a.schedule == "async" ? schedule::asynchronous(a.seed) : schedule::synchronous();
  mp_outcome out = run_max_product(g, s, opts);
  const mp_diagnostics& d = out.diagnostics;
  std::cout << to_string(out.verdict) << '\n';
  if (out.converged())
    std::cout << "step " << out.step << '\n'
              << "edges " << edge_list(g, out.result->edges()) << '\n'
              << "weight " << to_string(out.result->weight()) << '\n';
  std::cout << "layers " << d.layers << '\n' << "updates " << d.updates << '\n';
  if (d.period)
    std::cout << "period " << *d.period << '\n';
  std::cout << "assignment ";
  for (edge_decision dec : d.last_assignment)
    std::cout << to_symbol(dec);
  std::cout << '\n';
  return 0;
}

int cmd_tree(const std::string& path, const std::vector<std::string>& root, std::uint32_t depth,
             std::size_t limit)
{
  weighted_graph g = load_graph(path);
  auto u = g.node_by_label(root.at(0));
  auto v = g.node_by_label(root.at(1));
  if (!u || !v)
    throw precondition_error("unknown node in --root");
  auto e = g.find_edge(*u, *v);
  if (!e)
    throw precondition_error("no edge " + root[0] + "-" + root[1]);
  computation_tree t = build_tree(g, *e, depth, limit);
  tree_matching m = tree_optimal_matching(t);
  std::cout << "nodes " << t.node_count() << '\n'
            << "edges " << t.edge_count() << '\n'
            << "weight " << to_string(m.weight) << (m.tie ? " (tie)" : "") << '\n'
            << "root " << to_string(root_membership(t)) << '\n'
            << format_tree(t, g, &m);
  return 0;
}

int cmd_certify(const std::string& path)
{
  weighted_graph g = load_graph(path);
  lp_result lp = solve_lp(g);
  if (lp.tight()) {
    std::cout << "tight: no certificate\n";
    return 0;
  }
  matching mstar = brute_force_max_matching(g).best;
  support_graph sg = support_graph_of(g, lp.x, mstar);
  blossom_certificate cert = find_bad_certificate(g, sg, mstar);
  verify_certificate(cert, g, mstar);
  std::cout << format_certificate(cert, g);
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_path,
                   bool no_timestamp, std::optional<std::size_t> workers, bool verbose)
{
  std::ifstream in(config_path);
  if (!in)
    throw io_error("cannot open " + config_path);
  std::stringstream text;
  text << in.rdbuf();
  experiment_plan plan;
  try {
    plan = parse_experiment_config(text.str());
  } catch (const parse_error& e) {
    throw parse_error(e.line(), config_path + ": " + e.detail());
  }
  // Instance files are relative to the config file.
  const auto base = std::filesystem::path(config_path).parent_path();
  for (auto& spec : plan.specs)
    if (spec.kind == instance_kind::file && std::filesystem::path(spec.path).is_relative())
      spec.path = (base / spec.path).string();
  if (no_timestamp)
    plan.config.timestamp = false;
  if (workers)
    plan.config.workers = *workers;
  if (verbose)
    plan.config.log = &std::cerr;

  auto records = run_experiment(plan.specs, plan.config);
  const std::string csv = to_csv(records, plan.config.timestamp);
  if (out_path == "-") {
    std::cout << csv;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out || !(out << csv))
      throw io_error("cannot write " + out_path);
  }

  std::size_t agree = 0, errors = 0, faults = 0;
  for (const auto& r : records) {
    if (r.status == record_status::error)
      ++errors;
    else if (r.status == record_status::fault)
      ++faults;
    if (r.agreement && *r.agreement)
      ++agree;
  }
  std::cerr << records.size() << " instances, " << agree << " agree, " << errors << " errors, "
            << faults << " faults\n";
  return experiment_exit_code(records);
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Max-product matching laboratory"};
  app.require_subcommand(1);
  std::string file;
  std::size_t oracle_limit = default_oracle_edge_limit;

  auto* solve = app.add_subcommand("solve", "exact maximum-weight matching by enumeration");
  solve->add_option("file", file, "edge-list file")->required();
  solve->add_option("--oracle-limit", oracle_limit, "largest edge count enumerated");

  bool json = false;
  auto* lp = app.add_subcommand("lp", "LP relaxation with duals and tightness");
  lp->add_option("file", file, "edge-list file")->required();
  lp->add_flag("--json", json, "dump the solution as JSON");

  mp_args mpa;
  auto* mp = app.add_subcommand("mp", "run max-product");
  mp->add_option("file", file, "edge-list file")->required();
  mp->add_option("--schedule", mpa.schedule, "sync or async")
      ->check(CLI::IsMember({"sync", "async"}));
  mp->add_option("--seed", mpa.seed, "async schedule seed");
  mp->add_option("--max-steps", mpa.max_steps, "layer budget");
  mp->add_option("--window", mpa.window, "stability window in layers (0: |V|)");
  mp->add_option("--settle", mpa.settle, "do not declare convergence before this layer");
  mp->add_option("--trace", mpa.trace, "write a per-update belief trace (CSV)");

  std::vector<std::string> root;
  std::uint32_t depth = 1;
  std::size_t tree_limit = default_tree_edge_limit;
  auto* tree = app.add_subcommand("tree", "computation tree and its optimal matching");
  tree->add_option("file", file, "edge-list file")->required();
  tree->add_option("--root", root, "endpoints U V of the root edge")->required()->expected(2);
  tree->add_option("--depth", depth, "tree depth k >= 1")->required();
  tree->add_option("--limit", tree_limit, "largest tree edge count built");

  auto* certify = app.add_subcommand("certify", "bad blossom certificate of a loose instance");
  certify->add_option("file", file, "edge-list file")->required();

  std::uint64_t diag_steps = 0;
  auto* diag = app.add_subcommand("diagnose", "full report for one instance");
  diag->add_option("file", file, "edge-list file")->required();
  diag->add_option("--max-steps", diag_steps, "layer budget (0: automatic)");

  std::string config_path, out_path;
  bool no_timestamp = false, verbose = false;
  std::optional<std::size_t> workers;
  auto* exp = app.add_subcommand("experiment", "batch run writing one CSV row per instance");
  exp->add_option("--config", config_path, "experiment config file")->required();
  exp->add_option("--out", out_path, "CSV output path, '-' for stdout")->required();
  exp->add_flag("--no-timestamp", no_timestamp, "omit the timestamp column");
  exp->add_option("--workers", workers, "worker threads (default: all cores)");
  exp->add_flag("-v,--verbose", verbose, "log retries and failing instances");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve)
      return cmd_solve(file, oracle_limit);
    if (*lp)
      return cmd_lp(file, json);
    if (*mp)
      return cmd_mp(file, mpa);
    if (*tree)
      return cmd_tree(file, root, depth, tree_limit);
    if (*certify)
      return cmd_certify(file);
    if (*diag) {
      diagnose_options opts;
      opts.max_steps = diag_steps;
      std::cout << diagnose_file(file, opts);
      return 0;
    }
    if (*exp)
      return cmd_experiment(config_path, out_path, no_timestamp, workers, verbose);
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_io;
  } catch (const parse_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_io;
  } catch (const structural_error& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return exit_internal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  }
  return exit_usage;
}
