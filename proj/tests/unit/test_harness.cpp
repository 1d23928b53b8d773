#include "doctest.h"

#include "bpmatch/error.hpp"
#include "bpmatch/harness.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

using namespace bpmatch;
using namespace bpmatch::testing;

namespace {

const std::string data_dir = BPMATCH_TEST_DATA_DIR;

instance_spec file_spec(const std::string& name, const std::string& id)
{
  instance_spec s;
  s.kind = instance_kind::file;
  s.path = data_dir + "/" + name;
  s.id = id;
  return s;
}

instance_spec odd_cycle_spec(std::size_t n)
{
  instance_spec s;
  s.kind = instance_kind::odd_cycle;
  s.nodes = n;
  return s;
}

experiment_config quiet_config()
{
  experiment_config c;
  c.timestamp = false;
  c.workers = 2;
  return c;
}

// Two-colouring by BFS; false on an odd cycle.
bool two_colourable(const weighted_graph& g)
{
  std::vector<int> colour(g.node_count(), -1);
  for (node_id s = 0; s < g.node_count(); ++s) {
    if (colour[s] >= 0)
      continue;
    colour[s] = 0;
    std::queue<node_id> q;
    q.push(s);
    while (!q.empty()) {
      node_id x = q.front();
      q.pop();
      for (edge_id e : g.incident(x)) {
        node_id y = g.edge_at(e).other(x);
        if (colour[y] < 0) {
          colour[y] = 1 - colour[x];
          q.push(y);
        } else if (colour[y] == colour[x]) {
          return false;
        }
      }
    }
  }
  return true;
}

rational floor_of(const rational& w)
{
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), w.get_num_mpz_t(), w.get_den_mpz_t());
  return rational(f);
}

} // namespace

TEST_CASE("odd-cycle kind builds the standard loose triangle")
{
  auto inst = generate(odd_cycle_spec(3));
  CHECK(inst.graph == loose_triangle());
  CHECK(inst.attempts == 1);

  instance_spec c5 = odd_cycle_spec(5);
  CHECK(generate(c5).graph == loose_c5());

  c5.weights = {q("2"), q("3"), q("5"), q("7"), q("11")};
  CHECK(generate(c5).graph == cycle({"2", "3", "5", "7", "11"}));
}

TEST_CASE("generate rejects invalid specs")
{
  CHECK_THROWS_AS(generate(odd_cycle_spec(4)), precondition_error);
  CHECK_THROWS_AS(generate(odd_cycle_spec(1)), precondition_error);

  instance_spec wrong_count = odd_cycle_spec(3);
  wrong_count.weights = {q("1"), q("2")};
  CHECK_THROWS_AS(generate(wrong_count), precondition_error);

  instance_spec s;
  s.perturbation = 1;
  CHECK_THROWS_AS(generate(s), precondition_error);
  s.perturbation = -1;
  CHECK_THROWS_AS(generate(s), precondition_error);

  instance_spec w;
  w.weight_min = 5;
  w.weight_max = 4;
  CHECK_THROWS_AS(generate(w), precondition_error);
  w.weight_min = -1;
  w.weight_max = 4;
  CHECK_THROWS_AS(generate(w), precondition_error);

  instance_spec d;
  d.denominator = 0;
  CHECK_THROWS_AS(generate(d), precondition_error);

  instance_spec p;
  p.edge_probability = 1.5;
  CHECK_THROWS_AS(generate(p), precondition_error);

  instance_spec g;
  g.kind = instance_kind::blossom_gadget;
  g.cycle_length = 4;
  CHECK_THROWS_AS(generate(g), precondition_error);
  g.cycle_length = 3;
  g.stem_length = 1;
  CHECK_THROWS_AS(generate(g), precondition_error);
}

TEST_CASE("symmetric weights exhaust the retry budget")
{
  instance_spec s = odd_cycle_spec(3);
  s.weights = {q("1"), q("1"), q("1")};
  CHECK_THROWS_AS(generate(s), generation_error);
}

TEST_CASE("oversized deterministic instances hit the oracle limit")
{
  CHECK_THROWS_AS(generate(odd_cycle_spec(25)), size_limit_error);
  CHECK_NOTHROW(generate(odd_cycle_spec(25), 32));
}

TEST_CASE("random kinds are determined by the seed")
{
  for (auto kind : {instance_kind::random_bipartite, instance_kind::random_general}) {
    instance_spec s;
    s.kind = kind;
    s.nodes = 9;
    s.left = 5;
    s.right = 4;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      s.seed = seed;
      auto a = generate(s);
      auto b = generate(s);
      CHECK(a.graph == b.graph);
      CHECK(a.attempts == b.attempts);
    }
    s.seed = 1;
    auto one = generate(s).graph;
    s.seed = 2;
    CHECK_FALSE(one == generate(s).graph);
  }
}

TEST_CASE("bipartite instances are two-colourable with sides as declared")
{
  instance_spec s;
  s.kind = instance_kind::random_bipartite;
  s.left = 5;
  s.right = 6;
  s.edge_probability = 0.6;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    s.seed = seed;
    auto g = generate(s).graph;
    REQUIRE(g.node_count() == 11);
    CHECK(two_colourable(g));
    for (const edge& e : g.edges()) {
      CHECK(e.u < 5);
      CHECK(e.v >= 5);
    }
    CHECK(g.edge_count() <= s.max_edges);
  }
}

TEST_CASE("generated instances satisfy both uniqueness assumptions")
{
  instance_spec s;
  s.kind = instance_kind::random_general;
  s.nodes = 7;
  s.edge_probability = 0.4;
  s.weight_max = 3; // many unperturbed ties
  s.max_edges = 12;
  std::size_t retried = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    s.seed = seed;
    auto inst = generate(s);
    if (inst.attempts > 1)
      ++retried;
    const auto& g = inst.graph;
    REQUIRE(g.edge_count() <= 12);
    CHECK(max_matching_by_subsets(g).optimal_count == 1);
    CHECK(lp_by_half_integral_points(g).maximizers == 1);
  }
  MESSAGE("instances that needed a retry: " << retried);
}

TEST_CASE("perturbation never reorders distinct unperturbed matching weights")
{
  instance_spec s;
  s.kind = instance_kind::random_general;
  s.nodes = 7;
  s.edge_probability = 0.5;
  s.weight_max = 4;
  s.max_edges = 14;
  s.perturbation = rational(9, 10);
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    s.seed = seed;
    auto g = generate(s).graph;
    // Integer weights over denominator 1 and a total offset below 1 per
    // matching: the unperturbed weight of an edge is its floor.
    bool all_offsets_small = true;
    for (const edge& e : g.edges())
      all_offsets_small = all_offsets_small && e.weight - floor_of(e.weight) < 1;
    CHECK(all_offsets_small);

    auto ms = all_matchings(g);
    std::vector<std::pair<rational, rational>> w;
    for (const auto& m : ms) {
      rational base = 0, full = 0;
      for (edge_id e : m) {
        base += floor_of(g.edge_at(e).weight);
        full += g.edge_at(e).weight;
      }
      w.emplace_back(base, full);
    }
    bool order_kept = true;
    for (std::size_t i = 0; i < w.size(); ++i)
      for (std::size_t j = 0; j < w.size(); ++j)
        if (w[i].first < w[j].first && !(w[i].second < w[j].second))
          order_kept = false;
    CHECK(order_kept);
  }
}

TEST_CASE("non-unit denominators and zero perturbation")
{
  instance_spec s;
  s.kind = instance_kind::random_general;
  s.nodes = 6;
  s.weight_min = 10;
  s.weight_max = 99;
  s.denominator = 10;
  s.perturbation = 0;
  s.seed = 3;
  auto g = generate(s).graph;
  for (const edge& e : g.edges()) {
    rational scaled = e.weight * 10;
    CHECK(scaled.get_den() == 1);
    CHECK(scaled >= 10);
    CHECK(scaled <= 99);
  }
}

TEST_CASE("blossom gadget is a loose stemmed blossom")
{
  for (auto [cycle_len, stem] : std::vector<std::pair<std::size_t, std::size_t>>{
           {3, 0}, {3, 2}, {5, 2}, {7, 4}, {5, 0}}) {
    instance_spec s;
    s.kind = instance_kind::blossom_gadget;
    s.cycle_length = cycle_len;
    s.stem_length = stem;
    auto g = generate(s).graph;
    CAPTURE(cycle_len);
    CAPTURE(stem);
    CHECK(g.node_count() == cycle_len + stem);
    CHECK(g.edge_count() == cycle_len + stem);
    CHECK_FALSE(two_colourable(g));

    // Independent looseness check: the half-integral optimum beats every
    // integral matching.
    auto integral = max_matching_by_subsets(g);
    auto fractional = lp_by_half_integral_points(g);
    CHECK(fractional.value > integral.weight);
    CHECK(integral.optimal_count == 1);
    CHECK(fractional.maximizers == 1);
    CHECK_FALSE(solve_lp(g).tight());
  }
}

TEST_CASE("file kind and load_graph")
{
  auto g = generate(file_spec("triangle.txt", "t")).graph;
  CHECK(g == loose_triangle());

  CHECK_THROWS_AS(load_graph(data_dir + "/does_not_exist.txt"), io_error);
  try {
    load_graph(data_dir + "/bad_self_loop.txt");
    FAIL("expected a parse error");
  } catch (const parse_error& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("bad_self_loop.txt") != std::string::npos);
  }
}

TEST_CASE("config parser")
{
  const std::string text = "# demo\n"
                           "async_seeds = 3\n"
                           "timestamp=false\n"
                           "oracle_limit=20\n"
                           "workers=2\n"
                           "\n"
                           "kind=random-bipartite\n"
                           "count=3\n"
                           "seed=10\n"
                           "left=4\n"
                           "right=5\n"
                           "p=0.25\n"
                           "weight_min=2\n"
                           "weight_max=50\n"
                           "denominator=10\n"
                           "perturbation=1/4\n"
                           "kind=odd-cycle\n"
                           "nodes=5\n"
                           "weights=1,2,3,4,5\n"
                           "id=c5\n"
                           "kind=blossom-gadget\n"
                           "cycle=5\n"
                           "stem=4\n"
                           "kind=file\n"
                           "path=graphs/a.txt\n";
  auto plan = parse_experiment_config(text);
  CHECK(plan.config.async_seeds == 3);
  CHECK_FALSE(plan.config.timestamp);
  CHECK(plan.config.oracle_limit == 20);
  CHECK(plan.config.workers == 2);
  REQUIRE(plan.specs.size() == 6);

  for (std::size_t i = 0; i < 3; ++i) {
    const auto& s = plan.specs[i];
    CHECK(s.kind == instance_kind::random_bipartite);
    CHECK(s.seed == 10 + i);
    CHECK(s.left == 4);
    CHECK(s.right == 5);
    CHECK(s.edge_probability == 0.25);
    CHECK(s.weight_min == 2);
    CHECK(s.weight_max == 50);
    CHECK(s.denominator == 10);
    CHECK(s.perturbation == rational(1, 4));
  }
  CHECK(plan.specs[3].kind == instance_kind::odd_cycle);
  CHECK(plan.specs[3].nodes == 5);
  CHECK(plan.specs[3].id == "c5");
  CHECK(plan.specs[3].weights.size() == 5);
  CHECK(plan.specs[3].weights[4] == 5);
  CHECK(plan.specs[4].kind == instance_kind::blossom_gadget);
  CHECK(plan.specs[4].cycle_length == 5);
  CHECK(plan.specs[4].stem_length == 4);
  CHECK(plan.specs[5].kind == instance_kind::file);
  CHECK(plan.specs[5].path == "graphs/a.txt");

  auto line_of = [](const std::string& bad) -> std::size_t {
    try {
      parse_experiment_config(bad);
    } catch (const parse_error& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("kind=random-general\ncolour=blue\n") == 2);
  CHECK(line_of("kind=random-general\nasync_seeds=2\n") == 2);
  CHECK(line_of("kind=hexagon\n") == 1);
  CHECK(line_of("nodes=5\n") == 1);
  CHECK(line_of("kind=random-general\nnodes=five\n") == 2);
  CHECK(line_of("async_seeds\n") == 1);
  CHECK(line_of("timestamp=maybe\n") == 1);
  CHECK(line_of("kind=random-general\np=0.5x\n") == 2);

  CHECK(parse_experiment_config("# nothing\n").specs.empty());
}

TEST_CASE("CSV header and the empty batch")
{
  const std::string header = "instance_id,seed,a1,a2,lp_tightness,epsilon,mp_verdict,mp_steps,"
                             "predicted_bound,oracle_weight,agreement,certificate_kind,status";
  CHECK(to_csv({}, false) == header + "\n");
  CHECK(to_csv({}, true) == header + ",timestamp\n");
  CHECK(run_experiment({}, quiet_config()).empty());
}

TEST_CASE("batch of the three worked instances")
{
  std::vector<instance_spec> specs{file_spec("path_2_1.txt", "path"),
                                   file_spec("four_cycle_3131.txt", "four_cycle"),
                                   odd_cycle_spec(3)};
  specs[2].id = "triangle";
  auto records = run_experiment(specs, quiet_config());
  REQUIRE(records.size() == 3);
  for (const auto& r : records) {
    CAPTURE(r.instance_id);
    CAPTURE(r.message);
    CHECK(r.status == record_status::ok);
    CHECK(r.a1);
    CHECK(r.a2);
    REQUIRE(r.agreement.has_value());
    CHECK(*r.agreement);
  }

  CHECK(records[0].instance_id == "path");
  CHECK(records[0].lp_tightness == tightness::tight);
  CHECK(records[0].mp_verdict == "converged");
  CHECK(records[0].predicted_bound == 4u);
  CHECK(records[0].mp_steps <= 4);
  CHECK(records[0].epsilon->value == 1);
  CHECK(*records[0].oracle_weight == 2);
  CHECK(records[0].slackness_ok);
  CHECK_FALSE(records[0].certificate.has_value());

  CHECK(records[1].mp_verdict == "converged");
  CHECK(records[1].predicted_bound == 3u);
  CHECK(records[1].mp_steps <= 3);
  CHECK(records[1].epsilon->value == 2);
  CHECK(*records[1].oracle_weight == 6);

  const auto& t = records[2];
  CHECK(t.lp_tightness == tightness::loose);
  CHECK(t.mp_verdict == "no_convergence");
  CHECK_FALSE(t.predicted_bound.has_value());
  CHECK_FALSE(t.epsilon.has_value());
  CHECK(t.certificate == certificate_kind::stemmed_blossom);
  CHECK(*t.certificate_margin == rational(9, 10));
  // Every dual slack of the triangle is zero, so the floor applies.
  CHECK(t.mp_budget == 500);
  CHECK(t.mp_steps == 500);

  std::ostringstream row;
  write_csv_row(row, t, false);
  CHECK(row.str() ==
        "triangle,0,true,true,loose,,no_convergence,500,,6/5,true,stemmed_blossom,ok\n");
  std::ostringstream path_row;
  write_csv_row(path_row, records[0], false);
  CHECK(path_row.str() == "path,0,true,true,tight,1,converged," +
                              std::to_string(records[0].mp_steps) + ",4,2,true,,ok\n");

  CHECK(experiment_exit_code(records) == 0);
}

TEST_CASE("an oversized instance becomes an error row")
{
  std::vector<instance_spec> specs{odd_cycle_spec(3), odd_cycle_spec(25), odd_cycle_spec(5)};
  auto records = run_experiment(specs, quiet_config());
  REQUIRE(records.size() == 3);
  CHECK(records[0].status == record_status::ok);
  CHECK(records[1].status == record_status::error);
  CHECK(records[1].message.find("limit") != std::string::npos);
  CHECK_FALSE(records[1].agreement.has_value());
  CHECK(records[2].status == record_status::ok);
  CHECK(experiment_exit_code(records) == 0);

  std::ostringstream row;
  write_csv_row(row, records[1], false);
  CHECK(row.str().rfind("odd-cycle-1,0,", 0) == 0);
  CHECK(row.str().find("error: ") != std::string::npos);
}

TEST_CASE("CSV fields are quoted when needed")
{
  run_record r;
  r.instance_id = "a,b";
  r.status = record_status::error;
  r.message = "say \"hi\"";
  std::ostringstream row;
  write_csv_row(row, r, false);
  CHECK(row.str() == "\"a,b\",0,false,false,,,,0,,,,,\"error: say \"\"hi\"\"\"\n");
}

TEST_CASE("exit codes")
{
  run_record good;
  good.agreement = true;
  run_record bad;
  bad.agreement = false;
  run_record fault;
  fault.status = record_status::fault;
  run_record err;
  err.status = record_status::error;

  CHECK(experiment_exit_code({}) == 0);
  CHECK(experiment_exit_code({good, err}) == 0);
  CHECK(experiment_exit_code({good, bad}) == 2);
  CHECK(experiment_exit_code({bad, fault}) == 4);
  CHECK(experiment_exit_code({fault}) == 4);
}

TEST_CASE("experiments are deterministic across worker counts")
{
  std::vector<instance_spec> specs;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    instance_spec s;
    s.kind = seed % 2 ? instance_kind::random_general : instance_kind::random_bipartite;
    s.nodes = 8;
    s.left = 4;
    s.right = 4;
    s.edge_probability = 0.45;
    s.seed = seed;
    specs.push_back(s);
  }
  experiment_config one = quiet_config();
  one.workers = 1;
  one.async_seeds = 2;
  experiment_config many = one;
  many.workers = 5;

  auto a = to_csv(run_experiment(specs, one), false);
  auto b = to_csv(run_experiment(specs, many), false);
  CHECK(a == b);
  CHECK(std::count(a.begin(), a.end(), '\n') == 13);

  experiment_config stamped = one;
  stamped.timestamp = true;
  auto rows = run_experiment(specs, stamped);
  CHECK_FALSE(rows[0].timestamp.empty());
  auto c = to_csv(rows, true);
  CHECK(c.substr(0, c.find('\n')).ends_with(",timestamp"));
}

TEST_CASE("agreement holds on a random sweep")
{
  std::vector<instance_spec> specs;
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    instance_spec s;
    s.kind = instance_kind::random_general;
    s.nodes = 4 + seed % 6;
    s.edge_probability = 0.4;
    s.seed = seed;
    specs.push_back(s);
  }
  experiment_config c = quiet_config();
  c.async_seeds = 2;
  c.workers = 4;
  auto records = run_experiment(specs, c);
  std::size_t loose = 0;
  for (const auto& r : records) {
    CAPTURE(r.instance_id);
    CAPTURE(r.message);
    REQUIRE(r.status == record_status::ok);
    CHECK(*r.agreement);
    CHECK(r.async_wrong == 0);
    if (r.lp_tightness == tightness::loose) {
      ++loose;
      CHECK(r.certificate.has_value());
      CHECK(*r.certificate_margin > 0);
    } else {
      CHECK(r.slackness_ok);
      CHECK(r.mp_steps <= *r.predicted_bound);
    }
  }
  MESSAGE("loose instances: " << loose);
  CHECK(experiment_exit_code(records) == 0);
}

TEST_CASE("diagnose reports")
{
  auto tri = diagnose(loose_triangle());
  CHECK(tri.find("relaxation: loose") != std::string::npos);
  CHECK(tri.find("x 0-1 = 1/2") != std::string::npos);
  CHECK(tri.find("objective 33/20") != std::string::npos);
  CHECK(tri.find("kind stemmed_blossom") != std::string::npos);
  CHECK(tri.find("margin 9/10") != std::string::npos);
  CHECK(tri.find("no_convergence") != std::string::npos);

  auto path = diagnose(path_abc());
  CHECK(path.find("relaxation: tight") != std::string::npos);
  CHECK(path.find("epsilon: 1\n") != std::string::npos);
  CHECK(path.find("predicted bound: 4\n") != std::string::npos);
  CHECK(path.find("max-product: converged") != std::string::npos);
  CHECK(path.find("certificate") == std::string::npos);

  CHECK(diagnose_file(data_dir + "/path_2_1.txt") == path);
  CHECK_THROWS_AS(diagnose_file(data_dir + "/does_not_exist.txt"), io_error);
  CHECK_THROWS_AS(diagnose_file(data_dir + "/bad_self_loop.txt"), parse_error);
}
