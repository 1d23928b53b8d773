#include "bpmatch/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace bpmatch {

const char* to_string(instance_kind k) noexcept
{
  switch (k) {
  case instance_kind::random_bipartite:
    return "random-bipartite";
  case instance_kind::random_general:
    return "random-general";
  case instance_kind::odd_cycle:
    return "odd-cycle";
  case instance_kind::blossom_gadget:
    return "blossom-gadget";
  case instance_kind::file:
    return "file";
  }
  return "file";
}

std::optional<instance_kind> parse_instance_kind(std::string_view text)
{
  for (auto k : {instance_kind::random_bipartite, instance_kind::random_general,
                 instance_kind::odd_cycle, instance_kind::blossom_gadget, instance_kind::file})
    if (text == to_string(k))
      return k;
  return std::nullopt;
}

weighted_graph load_graph(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw io_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad())
    throw io_error("cannot read " + path);
  try {
    return parse_graph(buf.str());
  } catch (const parse_error& e) {
    throw parse_error(e.line(), path + ": " + e.detail());
  }
}

namespace {

// Spacing of the per-edge offsets; offsets are k/K of the allowed share with
// distinct k in 1..K.
constexpr long perturbation_slots = 1000;

void validate(const instance_spec& s)
{
  auto fail = [](const std::string& what) { throw precondition_error(what); };
  if (s.perturbation < 0 || s.perturbation >= 1)
    fail("perturbation must lie in [0, 1)");
  switch (s.kind) {
  case instance_kind::random_bipartite:
  case instance_kind::random_general:
    if (s.weight_min < 0 || s.weight_min > s.weight_max)
      fail("need 0 <= weight_min <= weight_max");
    if (s.denominator <= 0)
      fail("denominator must be positive");
    if (!(s.edge_probability >= 0.0 && s.edge_probability <= 1.0))
      fail("edge probability must lie in [0, 1]");
    if (s.max_edges > static_cast<std::size_t>(perturbation_slots))
      fail("max_edges above " + std::to_string(perturbation_slots));
    if (s.retry_budget == 0)
      fail("retry budget must be positive");
    break;
  case instance_kind::odd_cycle:
    if (s.nodes < 3 || s.nodes % 2 == 0)
      fail("odd-cycle needs an odd node count >= 3");
    if (!s.weights.empty() && s.weights.size() != s.nodes)
      fail("odd-cycle needs one weight per edge");
    break;
  case instance_kind::blossom_gadget:
    if (s.cycle_length < 3 || s.cycle_length % 2 == 0 || s.cycle_length > 37)
      fail("blossom-gadget cycle length must be odd, between 3 and 37");
    if (s.stem_length % 2 != 0)
      fail("blossom-gadget stem length must be even");
    break;
  case instance_kind::file:
    if (s.path.empty())
      fail("file instance without a path");
    break;
  }
}

bool assumptions_hold(const weighted_graph& g, std::size_t oracle_limit)
{
  return check_a1(g, oracle_limit) && check_a2(solve_lp(g));
}

weighted_graph draw_random(const instance_spec& s, std::mt19937_64& rng)
{
  std::bernoulli_distribution coin(s.edge_probability);
  std::uniform_int_distribution<long> numerator(s.weight_min, s.weight_max);

  std::vector<edge> edges;
  std::size_t n = 0;
  if (s.kind == instance_kind::random_bipartite) {
    n = s.left + s.right;
    for (std::size_t i = 0; i < s.left; ++i)
      for (std::size_t j = 0; j < s.right; ++j)
        if (coin(rng))
          edges.push_back({static_cast<node_id>(i), static_cast<node_id>(s.left + j), {}});
  } else {
    n = s.nodes;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (coin(rng))
          edges.push_back({static_cast<node_id>(i), static_cast<node_id>(j), {}});
  }
  for (edge& e : edges) {
    e.weight = rational(numerator(rng), s.denominator);
    e.weight.canonicalize();
  }

  if (s.perturbation != 0 && !edges.empty() && edges.size() <= s.max_edges) {
    std::vector<long> slots(perturbation_slots);
    std::iota(slots.begin(), slots.end(), 1);
    std::shuffle(slots.begin(), slots.end(), rng);
    // Any matching collects less than perturbation / denominator in offsets,
    // so matchings whose unperturbed weights differ keep their order.
    const rational unit = s.perturbation /
                          (rational(s.denominator) * static_cast<long>(edges.size()) *
                           perturbation_slots);
    for (std::size_t i = 0; i < edges.size(); ++i)
      edges[i].weight += unit * slots[i];
  }
  return weighted_graph(n, std::move(edges));
}

weighted_graph odd_cycle(const instance_spec& s)
{
  std::vector<edge> edges;
  const auto n = static_cast<node_id>(s.nodes);
  for (node_id i = 0; i < n; ++i) {
    rational w = s.weights.empty() ? rational(1) + rational(i, 10) : s.weights[i];
    w.canonicalize();
    edges.push_back({i, (i + 1) % n, w});
  }
  return weighted_graph(n, std::move(edges));
}

// Odd cycle 0..L-1 with base 0 and a stem L, L+1, ... hanging off the base.
// Matched edges weigh 2, the other cycle edges 19/10 and the other stem
// edges 2 - (39 - L) / (40 S), which leaves the structure bad by (39 - L)/40.
weighted_graph blossom_gadget(const instance_spec& s)
{
  const auto L = static_cast<node_id>(s.cycle_length);
  const auto S = static_cast<node_id>(s.stem_length);
  const rational matched(2);
  const rational cycle_other(19, 10);
  rational stem_other = S == 0 ? rational(0) : rational(2) - rational(39 - L, 40 * S);
  stem_other.canonicalize();

  std::vector<edge> edges;
  for (node_id i = 0; i < L; ++i)
    edges.push_back({i, (i + 1) % L, i % 2 == 0 ? cycle_other : matched});
  node_id prev = 0;
  for (node_id j = 0; j < S; ++j) {
    edges.push_back({prev, L + j, j % 2 == 0 ? matched : stem_other});
    prev = L + j;
  }
  return weighted_graph(L + S, std::move(edges));
}

} // namespace

generated_instance generate(const instance_spec& spec, std::size_t oracle_limit)
{
  validate(spec);
  auto fixed = [&](weighted_graph g) {
    if (!assumptions_hold(g, oracle_limit))
      throw generation_error(std::string(to_string(spec.kind)) +
                             " instance violates the uniqueness assumptions");
    return generated_instance{std::move(g), 1};
  };

  switch (spec.kind) {
  case instance_kind::odd_cycle:
    return fixed(odd_cycle(spec));
  case instance_kind::blossom_gadget:
    return fixed(blossom_gadget(spec));
  case instance_kind::file:
    return fixed(load_graph(spec.path));
  case instance_kind::random_bipartite:
  case instance_kind::random_general:
    break;
  }

  for (std::size_t attempt = 0; attempt < spec.retry_budget; ++attempt) {
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed),
                      static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(attempt)};
    std::mt19937_64 rng(seq);
    weighted_graph g = draw_random(spec, rng);
    if (g.edge_count() > spec.max_edges)
      continue;
    if (assumptions_hold(g, oracle_limit))
      return {std::move(g), attempt + 1};
  }
  throw generation_error("no instance satisfying the uniqueness assumptions after " +
                         std::to_string(spec.retry_budget) + " attempts (seed " +
                         std::to_string(spec.seed) + ")");
}

// ---------------------------------------------------------------------------
// config files

namespace {

std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

template <class Int>
Int parse_int(std::string_view v, std::size_t line)
{
  Int out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty())
    throw parse_error(line, "expected an integer, got '" + std::string(v) + "'");
  return out;
}

double parse_double(std::string_view v, std::size_t line)
{
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty())
    throw parse_error(line, "expected a number, got '" + std::string(v) + "'");
  return out;
}

bool parse_bool(std::string_view v, std::size_t line)
{
  if (v == "true" || v == "1" || v == "yes")
    return true;
  if (v == "false" || v == "0" || v == "no")
    return false;
  throw parse_error(line, "expected true or false, got '" + std::string(v) + "'");
}

rational parse_weight(std::string_view v, std::size_t line)
{
  auto r = parse_rational(trim(v));
  if (!r)
    throw parse_error(line, "expected a non-negative rational, got '" + std::string(v) + "'");
  return *r;
}

struct group {
  instance_spec spec;
  std::size_t count = 1;
};

void flush(const std::optional<group>& g, std::vector<instance_spec>& out)
{
  if (!g)
    return;
  for (std::size_t i = 0; i < g->count; ++i) {
    instance_spec s = g->spec;
    s.seed = g->spec.seed + i;
    if (!s.id.empty() && g->count > 1)
      s.id += "-" + std::to_string(i);
    out.push_back(std::move(s));
  }
}

} // namespace

experiment_plan parse_experiment_config(std::string_view text)
{
  experiment_plan plan;
  std::optional<group> current;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos)
      end = text.size();
    std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#')
      continue;

    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw parse_error(line_no, "expected key=value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));

    if (key == "kind") {
      auto kind = parse_instance_kind(value);
      if (!kind)
        throw parse_error(line_no, "unknown instance kind '" + std::string(value) + "'");
      flush(current, plan.specs);
      current.emplace();
      current->spec.kind = *kind;
      continue;
    }

    experiment_config& c = plan.config;
    const bool global = key == "async_seeds" || key == "stability_window" ||
                        key == "oracle_limit" || key == "timestamp" || key == "workers" ||
                        key == "min_steps" || key == "loose_factor" || key == "loose_step_cap";
    if (global) {
      if (current)
        throw parse_error(line_no, "global key '" + key + "' must precede the first kind= line");
      if (key == "async_seeds")
        c.async_seeds = parse_int<std::size_t>(value, line_no);
      else if (key == "stability_window")
        c.stability_window = parse_int<std::uint64_t>(value, line_no);
      else if (key == "oracle_limit")
        c.oracle_limit = parse_int<std::size_t>(value, line_no);
      else if (key == "timestamp")
        c.timestamp = parse_bool(value, line_no);
      else if (key == "workers")
        c.workers = parse_int<std::size_t>(value, line_no);
      else if (key == "min_steps")
        c.min_steps = parse_int<std::uint64_t>(value, line_no);
      else if (key == "loose_factor")
        c.loose_factor = parse_int<std::uint64_t>(value, line_no);
      else
        c.loose_step_cap = parse_int<std::uint64_t>(value, line_no);
      continue;
    }

    if (!current)
      throw parse_error(line_no, "key '" + key + "' outside a kind= group");
    instance_spec& s = current->spec;
    if (key == "count")
      current->count = parse_int<std::size_t>(value, line_no);
    else if (key == "seed")
      s.seed = parse_int<std::uint64_t>(value, line_no);
    else if (key == "id")
      s.id = std::string(value);
    else if (key == "nodes")
      s.nodes = parse_int<std::size_t>(value, line_no);
    else if (key == "left")
      s.left = parse_int<std::size_t>(value, line_no);
    else if (key == "right")
      s.right = parse_int<std::size_t>(value, line_no);
    else if (key == "cycle")
      s.cycle_length = parse_int<std::size_t>(value, line_no);
    else if (key == "stem")
      s.stem_length = parse_int<std::size_t>(value, line_no);
    else if (key == "p")
      s.edge_probability = parse_double(value, line_no);
    else if (key == "weight_min")
      s.weight_min = parse_int<long>(value, line_no);
    else if (key == "weight_max")
      s.weight_max = parse_int<long>(value, line_no);
    else if (key == "denominator")
      s.denominator = parse_int<long>(value, line_no);
    else if (key == "perturbation")
      s.perturbation = parse_weight(value, line_no);
    else if (key == "max_edges")
      s.max_edges = parse_int<std::size_t>(value, line_no);
    else if (key == "retries")
      s.retry_budget = parse_int<std::size_t>(value, line_no);
    else if (key == "path")
      s.path = std::string(value);
    else if (key == "weights") {
      s.weights.clear();
      std::size_t start = 0;
      while (start <= value.size()) {
        std::size_t comma = value.find(',', start);
        if (comma == std::string_view::npos)
          comma = value.size();
        s.weights.push_back(parse_weight(value.substr(start, comma - start), line_no));
        start = comma + 1;
      }
    } else {
      throw parse_error(line_no, "unknown key '" + key + "'");
    }
  }
  flush(current, plan.specs);
  return plan;
}

// ---------------------------------------------------------------------------
// experiments

const char* to_string(record_status s) noexcept
{
  switch (s) {
  case record_status::ok:
    return "ok";
  case record_status::error:
    return "error";
  case record_status::fault:
    return "fault";
  }
  return "error";
}

std::uint64_t mp_budget(const weighted_graph& g, const lp_result& lp,
                        const experiment_config& config)
{
  const std::uint64_t window =
      config.stability_window ? config.stability_window
                              : std::max<std::uint64_t>(g.node_count(), 1);
  if (lp.tight())
    return std::max(config.min_steps, predicted_bound(g.max_weight(), *lp.epsilon) + window);

  // No gap exists on a loose instance; the smallest positive dual slack
  // stands in for it.
  std::optional<rational> slack;
  for (const edge& e : g.edges()) {
    rational s = lp.z[e.u] + lp.z[e.v] - e.weight;
    if (s > 0 && (!slack || s < *slack))
      slack = s;
  }
  if (!slack)
    return config.min_steps;
  rational layers = rational(config.loose_factor) * 2 * g.max_weight() / *slack;
  const std::uint64_t wanted =
      layers >= config.loose_step_cap ? config.loose_step_cap
                                      : static_cast<std::uint64_t>(ceil_to_integer(layers));
  return std::max(config.min_steps, wanted);
}

run_options mp_run_options(const weighted_graph& g, const lp_result& lp,
                           const experiment_config& config)
{
  run_options opts;
  opts.max_steps = mp_budget(g, lp, config);
  opts.stability_window = config.stability_window;
  opts.settle_layers =
      lp.tight() ? predicted_bound(g.max_weight(), *lp.epsilon) : opts.max_steps;
  return opts;
}

namespace {

std::string utc_timestamp()
{
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t async_seed(std::uint64_t instance_seed, std::size_t j)
{
  std::seed_seq seq{static_cast<std::uint32_t>(instance_seed),
                    static_cast<std::uint32_t>(instance_seed >> 32),
                    static_cast<std::uint32_t>(j), 0x61u};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

void set_fault(run_record& r, const std::string& what)
{
  if (r.status == record_status::fault)
    r.message += "; " + what;
  else
    r.message = what;
  r.status = record_status::fault;
}

} // namespace

run_record run_instance(const instance_spec& spec, std::size_t index,
                        const experiment_config& config)
{
  run_record r;
  r.instance_id = spec.id.empty() ? std::string(to_string(spec.kind)) + "-" + std::to_string(index)
                                  : spec.id;
  r.seed = spec.seed;
  try {
    generated_instance inst = generate(spec, config.oracle_limit);
    r.attempts = inst.attempts;
    const weighted_graph& g = inst.graph;

    oracle_result best = brute_force_max_matching(g, config.oracle_limit);
    r.a1 = best.unique;
    r.oracle_weight = best.best_weight;

    lp_result lp = solve_lp(g);
    r.a2 = check_a2(lp);
    r.lp_tightness = lp.verdict;
    if (lp.tight()) {
      r.epsilon = compute_epsilon(g, best.best, lp);
      r.predicted_bound = predicted_bound(g.max_weight(), *r.epsilon);
      r.slackness_ok = check_complementary_slackness(g, best.best, lp).all();
    }

    const run_options opts = mp_run_options(g, lp, config);
    r.mp_budget = opts.max_steps;

    mp_outcome sync = run_max_product(g, schedule::synchronous(), opts);
    if (!sync.converged()) {
      r.mp_verdict = "no_convergence";
      r.mp_steps = sync.diagnostics.updates / 2; // layers run, one per two updates
    } else {
      r.mp_verdict = *sync.result == best.best ? "converged" : "converged_wrong";
      r.mp_steps = sync.step;
    }
    r.agreement = (r.mp_verdict == "converged") == lp.tight();
    if (r.mp_verdict == "converged_wrong")
      set_fault(r, "synchronous run settled on a matching other than the optimum");

    for (std::size_t j = 0; j < config.async_seeds; ++j) {
      mp_outcome a = run_max_product(g, schedule::asynchronous(async_seed(spec.seed, j)), opts);
      if (a.converged()) {
        ++r.async_converged;
        if (!(*a.result == best.best))
          ++r.async_wrong;
      }
    }
    if (r.async_wrong)
      set_fault(r, std::to_string(r.async_wrong) +
                       " asynchronous run(s) settled on a matching other than the optimum");

    if (!lp.tight()) {
      try {
        support_graph sg = support_graph_of(g, lp.x, best.best);
        blossom_certificate cert = find_bad_certificate(g, sg, best.best);
        r.certificate_margin = verify_certificate(cert, g, best.best);
        r.certificate = cert.kind;
      } catch (const error& e) {
        set_fault(r, std::string("no certificate: ") + e.what());
      }
    }
  } catch (const structural_error& e) {
    set_fault(r, e.what());
  } catch (const std::exception& e) {
    r.status = record_status::error;
    r.message = e.what();
  }

  if (config.log) {
    // Callers share one stream across workers.
    static std::mutex log_mutex;
    std::lock_guard lock(log_mutex);
    if (r.attempts > 1)
      *config.log << r.instance_id << ": generated after " << r.attempts << " attempts\n";
    if (r.status != record_status::ok)
      *config.log << r.instance_id << ": " << to_string(r.status) << ": " << r.message << '\n';
  }
  if (config.timestamp)
    r.timestamp = utc_timestamp();
  return r;
}

std::vector<run_record> run_experiment(const std::vector<instance_spec>& specs,
                                       const experiment_config& config)
{
  std::vector<run_record> out(specs.size());
  if (specs.empty())
    return out;
  std::size_t workers = config.workers ? config.workers : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, specs.size());

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++)
      out[i] = run_instance(specs[i], i, config);
  };
  std::vector<std::jthread> pool;
  for (std::size_t w = 1; w < workers; ++w)
    pool.emplace_back(work);
  work();
  return out;
}

namespace {

void write_field(std::ostream& out, std::string_view v)
{
  if (v.find_first_of(",\"\n\r") == std::string_view::npos) {
    out << v;
    return;
  }
  out << '"';
  for (char c : v) {
    if (c == '"')
      out << '"';
    out << c;
  }
  out << '"';
}

const char* flag(bool b) { return b ? "true" : "false"; }

} // namespace

void write_csv_header(std::ostream& out, bool timestamp)
{
  out << "instance_id,seed,a1,a2,lp_tightness,epsilon,mp_verdict,mp_steps,predicted_bound,"
         "oracle_weight,agreement,certificate_kind,status";
  if (timestamp)
    out << ",timestamp";
  out << '\n';
}

void write_csv_row(std::ostream& out, const run_record& r, bool timestamp)
{
  write_field(out, r.instance_id);
  out << ',' << r.seed << ',' << flag(r.a1) << ',' << flag(r.a2) << ',';
  if (r.lp_tightness)
    out << to_string(*r.lp_tightness);
  out << ',';
  if (r.epsilon)
    out << (r.epsilon->infinite ? std::string("inf") : to_string(r.epsilon->value));
  out << ',' << r.mp_verdict << ',' << r.mp_steps << ',';
  if (r.predicted_bound)
    out << *r.predicted_bound;
  out << ',';
  if (r.oracle_weight)
    out << to_string(*r.oracle_weight);
  out << ',';
  if (r.agreement)
    out << flag(*r.agreement);
  out << ',';
  if (r.certificate)
    out << to_string(*r.certificate);
  out << ',';
  if (r.status == record_status::ok)
    out << "ok";
  else
    write_field(out, std::string(to_string(r.status)) + ": " + r.message);
  if (timestamp)
    out << ',' << r.timestamp;
  out << '\n';
}

std::string to_csv(const std::vector<run_record>& records, bool timestamp)
{
  std::ostringstream out;
  write_csv_header(out, timestamp);
  for (const auto& r : records)
    write_csv_row(out, r, timestamp);
  return out.str();
}

int experiment_exit_code(const std::vector<run_record>& records)
{
  bool disagreement = false;
  for (const auto& r : records) {
    if (r.status == record_status::fault)
      return 4;
    if (r.status == record_status::ok && r.agreement && !*r.agreement)
      disagreement = true;
  }
  return disagreement ? 2 : 0;
}

// ---------------------------------------------------------------------------
// diagnose

namespace {

std::string edge_label(const weighted_graph& g, edge_id e)
{
  const edge& ed = g.edge_at(e);
  return g.label(ed.u) + "-" + g.label(ed.v);
}

} // namespace

std::string diagnose(const weighted_graph& g, const diagnose_options& options)
{
  const experiment_config& config = options.config;
  std::ostringstream out;
  out << "graph: " << g.node_count() << " nodes, " << g.edge_count() << " edges, w_max "
      << to_string(g.max_weight()) << '\n';

  oracle_result best = brute_force_max_matching(g, config.oracle_limit);
  out << "oracle: weight " << to_string(best.best_weight) << ", edges";
  for (edge_id e : best.best.edges())
    out << ' ' << edge_label(g, e);
  out << (best.unique ? " (unique)" : " (not unique)") << '\n';

  lp_result lp = solve_lp(g);
  out << "relaxation: " << to_string(lp.verdict) << ", objective "
      << to_string(lp.primal_objective) << ", primal unique "
      << (lp.primal_unique ? "yes" : "no") << '\n';
  for (edge_id e = 0; e < g.edge_count(); ++e)
    out << "  x " << edge_label(g, e) << " = " << to_string(lp.x[e]) << '\n';
  for (node_id v = 0; v < g.node_count(); ++v)
    out << "  z " << g.label(v) << " = " << to_string(lp.z[v]) << '\n';

  if (lp.tight()) {
    const epsilon_gap& eps = *lp.epsilon;
    out << "epsilon: " << (eps.infinite ? std::string("inf") : to_string(eps.value)) << '\n';
    out << "predicted bound: " << predicted_bound(g.max_weight(), eps) << '\n';
  }

  run_options opts = mp_run_options(g, lp, config);
  if (options.max_steps) {
    opts.max_steps = options.max_steps;
    opts.settle_layers = std::min(opts.settle_layers, opts.max_steps);
  }
  out << "budget: " << opts.max_steps << " layers, settle depth " << opts.settle_layers << '\n';
  try {
    mp_outcome mp = run_max_product(g, schedule::synchronous(), opts);
    const mp_diagnostics& d = mp.diagnostics;
    out << "max-product: " << to_string(mp.verdict);
    if (mp.converged()) {
      out << " at layer " << mp.step << ", edges";
      for (edge_id e : mp.result->edges())
        out << ' ' << edge_label(g, e);
      out << (*mp.result == best.best ? " (optimal)" : " (NOT optimal)");
    }
    out << '\n';
    out << "  layers " << d.layers << ", updates " << d.updates << ", decision changes "
        << d.changes_in_history << ", ties " << d.ties_in_last << '\n';
    out << "  period " << (d.period ? std::to_string(*d.period) : std::string("none"))
        << ", |beta| in [" << d.min_abs_belief << ", " << d.max_abs_belief << "]\n";
    out << "  last assignment ";
    for (edge_decision dec : d.last_assignment)
      out << to_symbol(dec);
    out << '\n';
  } catch (const structural_error& e) {
    out << "max-product: failed: " << e.what() << '\n';
  }

  if (!lp.tight()) {
    out << "certificate:\n";
    try {
      support_graph sg = support_graph_of(g, lp.x, best.best);
      blossom_certificate cert = find_bad_certificate(g, sg, best.best);
      verify_certificate(cert, g, best.best);
      std::istringstream lines(format_certificate(cert, g));
      for (std::string line; std::getline(lines, line);)
        out << "  " << line << '\n';
    } catch (const error& e) {
      out << "  none: " << e.what() << '\n';
    }
  }
  return out.str();
}

std::string diagnose_file(const std::string& path, const diagnose_options& options)
{
  return diagnose(load_graph(path), options);
}

} // namespace bpmatch
