#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "softdd/dd.hpp"
#include "softdd/oracle.hpp"
#include "softdd/rng.hpp"
#include "test_util.hpp"

using namespace softdd;
using namespace softdd::testing;

TEST_CASE("step_size decays with the count of dual increases") {
  DualState state;
  CHECK(step_size(state, 1.0) == doctest::Approx(1.0));
  state.dual_increases = 3;
  CHECK(step_size(state, 1.0) == doctest::Approx(0.25));
  state.dual_increases = 0;
  CHECK(step_size(state, 0.5) == doctest::Approx(0.5));
  CHECK_THROWS_AS(step_size(state, 0.0), std::invalid_argument);
}

TEST_CASE("kkt_check branches") {
  double c = 0.8;
  CHECK(kkt_check(std::vector<double>{0.0}, std::vector<long long>{-1},
                  std::vector<double>{c}, 1e-9));
  CHECK(kkt_check(std::vector<double>{c}, std::vector<long long>{2},
                  std::vector<double>{c}, 1e-9));
  CHECK_FALSE(kkt_check(std::vector<double>{c / 2}, std::vector<long long>{2},
                        std::vector<double>{c}, 1e-9));
  // Satisfied with equality passes regardless of the multiplier.
  CHECK(kkt_check(std::vector<double>{0.7 * c}, std::vector<long long>{0},
                  std::vector<double>{c}, 1e-9));
  // Slack constraint with a live multiplier fails.
  CHECK_FALSE(kkt_check(std::vector<double>{0.1}, std::vector<long long>{-1},
                        std::vector<double>{c}, 1e-9));
  // Hard rows (infinite cap) can never certify a positive violation.
  CHECK_FALSE(kkt_check(std::vector<double>{100.0}, std::vector<long long>{1},
                        std::vector<double>{kHardPenalty}, 1e-9));
  CHECK_THROWS_AS(kkt_check(std::vector<double>{0.0}, std::vector<long long>{0, 0},
                            std::vector<double>{1.0}, 1e-9),
                  std::invalid_argument);
}

TEST_CASE("zero penalties reduce soft_dd to unconstrained viterbi") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    RandomInstance inst = random_instance(rng, 0.0, 0.0);  // all penalties 0
    PredictionResult res = soft_dd(inst.table, inst.constraints);
    ViterbiResult plain = viterbi(inst.table);
    CHECK(res.labels == plain.labels);
    CHECK(res.certificate == Certificate::Converged);
    CHECK(res.iterations == 1);
  }
}

TEST_CASE("converged soft_dd matches the brute-force soft optimum") {
  Rng rng(77);
  int converged = 0, total = 0;
  for (int trial = 0; trial < 300; ++trial) {
    RandomInstance inst = random_instance(rng, 0.0, 5.0);
    PredictionResult res = soft_dd(inst.table, inst.constraints);
    ++total;
    if (res.certificate != Certificate::Converged) continue;
    ++converged;
    OracleResult oracle = brute_force_map(inst.table, inst.constraints, OracleMode::Soft);
    CHECK(std::abs(res.primal - oracle.objective) <= 1e-9);
    // The returned slack vector is recomputable from the labels.
    CHECK(res.violations == inst.constraints.violations(res.labels));
  }
  CHECK(converged > total / 2);
}

TEST_CASE("converged hard_dd matches the brute-force hard optimum") {
  Rng rng(78);
  for (int trial = 0; trial < 300; ++trial) {
    RandomInstance inst = random_instance(rng, 0.0, 5.0);
    PredictionResult res = hard_dd(inst.table, inst.constraints);
    if (res.certificate != Certificate::Converged) continue;
    OracleResult oracle = brute_force_map(inst.table, inst.constraints, OracleMode::Hard);
    REQUIRE(oracle.feasible);
    CHECK(std::abs(res.primal - oracle.objective) <= 1e-9);
    for (long long z : res.violations) CHECK(z == 0);
  }
}

TEST_CASE("feasible start converges in one iteration with zero multipliers") {
  auto schema = make_schema({"O", "B-a"});
  Rng rng(5);
  ScoreTable table = random_table(*schema, 3, rng);
  ConstraintSet set(schema);
  // count(a) <= 3 can never be violated by a length-3 sequence.
  set.add({{{0, 1}}, 3, 1.0, ConstraintOrigin::Singleton, {0}});
  PredictionResult res = hard_dd(table, set);
  CHECK(res.certificate == Certificate::Converged);
  CHECK(res.iterations == 1);
  CHECK(res.labels == viterbi(table).labels);
}

TEST_CASE("infeasible hard instances never certify") {
  auto schema = make_schema({"O", "B-a"});
  Rng rng(6);
  ScoreTable table = random_table(*schema, 2, rng);
  ConstraintSet set(schema);
  // count(a) <= -1 is unsatisfiable.
  set.add({{{0, 1}}, -1, kHardPenalty, ConstraintOrigin::Singleton, {0}});
  DDOptions options;
  options.max_iters = 50;
  PredictionResult res = hard_dd(table, set, options);
  CHECK(res.certificate == Certificate::IterationLimit);
  CHECK(brute_force_map(table, set, OracleMode::Hard).feasible == false);
}

TEST_CASE("singleton margin battle: penalty above or below the gap") {
  // Two positions; "a" is worth 2.0 at both, "b" trails by 0.8 at the first
  // and 0.1 at the second. The singleton constraint says "a" at most once,
  // so swapping the second position to "b" costs 0.1 against one unit of
  // violation.
  auto schema = make_schema({"B-a", "B-b", "O"});
  ScoreTable table;
  table.length = 2;
  table.num_labels = 3;
  table.unary = {2.0, 1.2, 0.0, 2.0, 1.9, 0.0};
  table.transition.assign(9, 0.0);
  table.mask = schema->transition_mask();
  table.start_valid = schema->start_mask();

  ConstraintSet set(schema);
  set.add({{{0, 1}}, 1, 5.0, ConstraintOrigin::Singleton, {0}});  // key 0 is "a"

  SUBCASE("penalty above the margin: the constraint wins") {
    PredictionResult res = soft_dd(table, set);
    REQUIRE(res.certificate == Certificate::Converged);
    std::vector<long long> counts = set.counts_of(res.labels);
    CHECK(counts[0] <= 1);
    OracleResult oracle = brute_force_map(table, set, OracleMode::Soft);
    CHECK(std::abs(res.primal - oracle.objective) <= 1e-9);
  }

  SUBCASE("penalty below the margin: paying the violation wins") {
    std::vector<double> cheap = {0.05};
    set.set_penalties(cheap);
    PredictionResult res = soft_dd(table, set);
    REQUIRE(res.certificate == Certificate::Converged);
    std::vector<long long> counts = set.counts_of(res.labels);
    CHECK(counts[0] == 2);
    OracleResult oracle = brute_force_map(table, set, OracleMode::Soft);
    CHECK(std::abs(res.primal - oracle.objective) <= 1e-9);
  }
}

TEST_CASE("multipliers stay inside the box after every iteration") {
  Rng rng(90);
  for (int trial = 0; trial < 100; ++trial) {
    RandomInstance inst = random_instance(rng, 0.0, 5.0);
    std::vector<double> caps = inst.constraints.penalties();
    DDOptions options;
    options.observer = [&](const DualState& state, std::span<const long long>) {
      for (std::size_t i = 0; i < state.lambda.size(); ++i) {
        CHECK(state.lambda[i] >= 0.0);
        CHECK(state.lambda[i] <= caps[i]);
      }
    };
    soft_dd(inst.table, inst.constraints, options);
  }
}

TEST_CASE("every iteration's dual upper-bounds the soft optimum (weak duality)") {
  Rng rng(91);
  for (int trial = 0; trial < 100; ++trial) {
    RandomInstance inst = random_instance(rng, 0.0, 5.0);
    OracleResult oracle = brute_force_map(inst.table, inst.constraints, OracleMode::Soft);
    DDOptions options;
    std::vector<TraceRow> trace;
    options.trace = &trace;
    PredictionResult res = soft_dd(inst.table, inst.constraints, options);
    for (const TraceRow& row : trace) CHECK(row.dual >= oracle.objective - 1e-9);
    CHECK(res.dual >= oracle.objective - 1e-9);
    CHECK(res.dual >= res.primal - 1e-9);
  }
}

TEST_CASE("hard sentinel penalties route soft_dd to hard behavior") {
  Rng rng(92);
  for (int trial = 0; trial < 100; ++trial) {
    RandomInstance inst = random_instance(rng, 0.0, 5.0);
    std::vector<double> hard(inst.constraints.size(), kHardPenalty);
    DDOptions options;
    options.penalty_override = &hard;
    PredictionResult via_soft = soft_dd(inst.table, inst.constraints, options);
    PredictionResult via_hard = hard_dd(inst.table, inst.constraints);
    CHECK(via_soft.certificate == via_hard.certificate);
    if (via_soft.certificate == Certificate::Converged)
      CHECK(via_soft.labels == via_hard.labels);
  }
}

TEST_CASE("huge finite penalties agree with hard_dd on converged instances") {
  Rng rng(93);
  for (int trial = 0; trial < 100; ++trial) {
    RandomInstance inst = random_instance(rng, 0.0, 5.0);
    std::vector<double> big(inst.constraints.size(), 1e6);
    DDOptions options;
    options.penalty_override = &big;
    PredictionResult soft = soft_dd(inst.table, inst.constraints, options);
    PredictionResult hard = hard_dd(inst.table, inst.constraints);
    if (soft.certificate == Certificate::Converged &&
        hard.certificate == Certificate::Converged)
      CHECK(soft.labels == hard.labels);
  }
}

TEST_CASE("identical inputs give identical iterate sequences") {
  Rng rng(94);
  RandomInstance inst = random_instance(rng, 0.0, 5.0);
  DDOptions options;
  std::vector<TraceRow> trace_a, trace_b;
  options.trace = &trace_a;
  PredictionResult a = soft_dd(inst.table, inst.constraints, options);
  options.trace = &trace_b;
  PredictionResult b = soft_dd(inst.table, inst.constraints, options);
  CHECK(a.labels == b.labels);
  CHECK(a.primal == b.primal);
  REQUIRE(trace_a.size() == trace_b.size());
  for (std::size_t i = 0; i < trace_a.size(); ++i) {
    CHECK(trace_a[i].dual == trace_b[i].dual);
    CHECK(trace_a[i].primal == trace_b[i].primal);
    CHECK(trace_a[i].eta == trace_b[i].eta);
  }
}

TEST_CASE("one viterbi call per iteration: trace rows equal iterations used") {
  Rng rng(95);
  for (int trial = 0; trial < 20; ++trial) {
    RandomInstance inst = random_instance(rng, 0.0, 5.0);
    DDOptions options;
    std::vector<TraceRow> trace;
    options.trace = &trace;
    PredictionResult res = soft_dd(inst.table, inst.constraints, options);
    CHECK(static_cast<int>(trace.size()) == res.iterations);
  }
}

TEST_CASE("iteration limit returns the best primal iterate") {
  Rng rng(96);
  for (int trial = 0; trial < 50; ++trial) {
    RandomInstance inst = random_instance(rng, 0.0, 5.0);
    DDOptions options;
    options.max_iters = 3;  // starve it
    std::vector<TraceRow> trace;
    options.trace = &trace;
    PredictionResult res = soft_dd(inst.table, inst.constraints, options);
    if (res.certificate != Certificate::IterationLimit) continue;
    double best = -std::numeric_limits<double>::infinity();
    for (const TraceRow& row : trace) best = std::max(best, row.primal);
    CHECK(res.primal == doctest::Approx(best));
    CHECK(soft_objective(inst.table, inst.constraints, res.labels) == doctest::Approx(res.primal));
  }
}

TEST_CASE("dd rejects bad options") {
  auto schema = make_schema({"O", "B-a"});
  Rng rng(1);
  ScoreTable table = random_table(*schema, 2, rng);
  ConstraintSet set(schema);
  set.add({{{0, 1}}, 1, 1.0, ConstraintOrigin::Singleton, {0}});

  DDOptions bad_iters;
  bad_iters.max_iters = 0;
  CHECK_THROWS_AS(soft_dd(table, set, bad_iters), std::invalid_argument);

  std::vector<double> negative = {-1.0};
  DDOptions bad_penalty;
  bad_penalty.penalty_override = &negative;
  CHECK_THROWS_AS(soft_dd(table, set, bad_penalty), std::invalid_argument);

  DDOptions bad_step;
  bad_step.step0 = 0.0;
  CHECK_THROWS_AS(soft_dd(table, set, bad_step), std::invalid_argument);
}
