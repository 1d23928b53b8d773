#ifndef BPMATCH_HARNESS_HPP
#define BPMATCH_HARNESS_HPP

#include "bpmatch/blossom.hpp"
#include "bpmatch/error.hpp"
#include "bpmatch/graph.hpp"
#include "bpmatch/lp_relax.hpp"
#include "bpmatch/max_product.hpp"
#include "bpmatch/oracle.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bpmatch {

/// The generator ran out of retries before both uniqueness assumptions held.
class generation_error : public error {
public:
  using error::error;
};

enum class instance_kind { random_bipartite, random_general, odd_cycle, blossom_gadget, file };

const char* to_string(instance_kind k) noexcept;
std::optional<instance_kind> parse_instance_kind(std::string_view text);

/// Recipe for one instance. Weights are integers in [weight_min, weight_max]
/// divided by `denominator`; each edge then gets a distinct offset below
/// perturbation / denominator in total, so distinct matching weights keep
/// their order.
struct instance_spec {
  instance_kind kind = instance_kind::random_general;
  std::string id; ///< empty: "<kind>-<index>" in experiment output

  std::size_t nodes = 8; ///< random-general, odd-cycle
  std::size_t left = 4;  ///< random-bipartite
  std::size_t right = 4;
  std::size_t cycle_length = 3; ///< blossom-gadget, odd
  std::size_t stem_length = 2;  ///< blossom-gadget, even
  double edge_probability = 0.5;

  long weight_min = 1;
  long weight_max = 100;
  long denominator = 1;
  /// In [0, 1). Zero leaves the weights as drawn.
  rational perturbation{1, 2};
  /// Odd-cycle weights in edge order; empty means 1 + i/10.
  std::vector<rational> weights;
  std::string path; ///< file kind

  std::uint64_t seed = 0;
  /// Random kinds redraw when the edge count exceeds this.
  std::size_t max_edges = default_oracle_edge_limit;
  std::size_t retry_budget = 32;
};

struct generated_instance {
  weighted_graph graph;
  std::size_t attempts = 1;
};

/// Throws precondition_error for an invalid spec, generation_error when the
/// retry budget is spent, io_error / parse_error for the file kind and
/// size_limit_error when an instance is too large for the oracle.
generated_instance generate(const instance_spec& spec,
                            std::size_t oracle_limit = default_oracle_edge_limit);

/// Reads and parses an edge-list file. Parse errors are rethrown with the
/// path in the message.
weighted_graph load_graph(const std::string& path);

struct experiment_config {
  /// Asynchronous runs per instance, in addition to the synchronous one.
  std::size_t async_seeds = 0;
  std::uint64_t stability_window = 0;
  std::size_t oracle_limit = default_oracle_edge_limit;
  bool timestamp = true;
  /// 0 means std::thread::hardware_concurrency().
  std::size_t workers = 0;
  std::uint64_t min_steps = 500;
  /// Loose instances: layers per unit of the slack surrogate bound.
  std::uint64_t loose_factor = 50;
  std::uint64_t loose_step_cap = 2000;
  /// Retry counts and per-instance failures go here when set.
  std::ostream* log = nullptr;
};

/// Config files are key=value lines with '#' comments. Keys before the
/// first `kind=` line are global; each `kind=` line opens a group that
/// expands into `count` instances with seeds seed, seed+1, ...
struct experiment_plan {
  experiment_config config;
  std::vector<instance_spec> specs;
};

experiment_plan parse_experiment_config(std::string_view text);

enum class record_status { ok, error, fault };

const char* to_string(record_status s) noexcept;

/// One CSV row. `agreement` is (mp_verdict == "converged") == lp tight.
struct run_record {
  std::string instance_id;
  std::uint64_t seed = 0;
  bool a1 = false;
  bool a2 = false;
  std::optional<tightness> lp_tightness;
  std::optional<epsilon_gap> epsilon;
  /// "converged", "converged_wrong", "no_convergence"; empty on error rows.
  std::string mp_verdict;
  std::uint64_t mp_steps = 0;
  std::optional<std::uint64_t> predicted_bound;
  std::optional<rational> oracle_weight;
  std::optional<bool> agreement;
  std::optional<certificate_kind> certificate;
  record_status status = record_status::ok;
  std::string message; ///< error or fault text
  std::string timestamp;

  // Not written to the CSV.
  std::size_t attempts = 0;
  std::uint64_t mp_budget = 0;
  std::optional<rational> certificate_margin;
  std::size_t async_converged = 0;
  std::size_t async_wrong = 0;
  bool slackness_ok = false; ///< all four clauses, tight rows only
};

/// Layer budget for one instance: max(min_steps, bound + window) when tight,
/// max(min_steps, loose_factor * ceil(2 w_max / s)) capped at loose_step_cap
/// when loose, s being the smallest positive dual slack.
std::uint64_t mp_budget(const weighted_graph& g, const lp_result& lp,
                        const experiment_config& config);

/// Budget, window and settle depth for the max-product runs of one
/// instance. Tight instances settle at the predicted bound, loose ones at the
/// end of the budget, so a stretch of constant decisions shorter than that is
/// never reported as convergence.
run_options mp_run_options(const weighted_graph& g, const lp_result& lp,
                           const experiment_config& config);

/// Oracle, LP, gap, max-product (synchronous plus async seeds) and, for
/// loose instances, a verified certificate. Never throws for instance-level
/// problems; they land in status/message.
run_record run_instance(const instance_spec& spec, std::size_t index,
                        const experiment_config& config);

/// Runs the specs on a worker pool; records come back in spec order.
std::vector<run_record> run_experiment(const std::vector<instance_spec>& specs,
                                       const experiment_config& config);

void write_csv_header(std::ostream& out, bool timestamp);
void write_csv_row(std::ostream& out, const run_record& r, bool timestamp);
std::string to_csv(const std::vector<run_record>& records, bool timestamp);

/// 0 when every row is fine, 4 when some row has a fault, otherwise 2 when
/// some agreement is false. Error rows do not count.
int experiment_exit_code(const std::vector<run_record>& records);

struct diagnose_options {
  experiment_config config;
  /// Overrides the computed budget when non-zero.
  std::uint64_t max_steps = 0;
};

/// Human-readable summary of one graph: oracle, LP, gap, bound, max-product
/// trajectory and a certificate when the relaxation is loose.
std::string diagnose(const weighted_graph& g, const diagnose_options& options = {});
std::string diagnose_file(const std::string& path, const diagnose_options& options = {});

} // namespace bpmatch

#endif
