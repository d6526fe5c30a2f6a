// Acceptance suite. Each criterion prints one [PASS]/[FAIL] line; the
// process exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "softdd/chain_model.hpp"
#include "softdd/constraints.hpp"
#include "softdd/corpus.hpp"
#include "softdd/dd.hpp"
#include "softdd/eval.hpp"
#include "softdd/oracle.hpp"
#include "softdd/penalties.hpp"
#include "softdd/rng.hpp"
#include "softdd/synthetic.hpp"
#include "test_util.hpp"

using namespace softdd;
using namespace softdd::testing;

namespace {

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << name << ": " << detail << "\n";
  if (!pass) ++failures;
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

constexpr double kTol = 1e-9;

// ---------------------------------------------------------------------------
// A1: hard-mode oracle equivalence on >= 500 random instances.
// A7 gathers its lambda-box and weak-duality evidence from the same runs.
struct DualityEvidence {
  bool lambda_in_box = true;
  bool dual_bounds_optimum = true;
  long long iterations_watched = 0;
};

void a1_hard_equivalence(DualityEvidence& evidence) {
  Rng rng(20240101);
  const int instances = 500;
  int converged = 0, mismatches = 0;
  double started = now_seconds();
  for (int trial = 0; trial < instances; ++trial) {
    RandomInstance inst = random_instance(rng, 0.0, 5.0);
    OracleResult oracle = brute_force_map(inst.table, inst.constraints, OracleMode::Hard);

    DDOptions options;
    options.observer = [&](const DualState& state, std::span<const long long>) {
      ++evidence.iterations_watched;
      for (double l : state.lambda)
        if (!(l >= -kTol)) evidence.lambda_in_box = false;
    };
    std::vector<TraceRow> trace;
    options.trace = &trace;
    PredictionResult res = hard_dd(inst.table, inst.constraints, options);

    if (oracle.feasible)
      for (const TraceRow& row : trace)
        if (row.dual < oracle.objective - kTol) evidence.dual_bounds_optimum = false;

    if (res.certificate != Certificate::Converged) continue;
    ++converged;
    bool ok = oracle.feasible && std::abs(res.primal - oracle.objective) <= kTol;
    for (long long z : res.violations) ok = ok && z == 0;
    if (!ok) ++mismatches;
  }
  double elapsed = now_seconds() - started;
  std::ostringstream detail;
  detail << converged << "/" << instances << " converged, " << mismatches
         << " objective mismatches, " << elapsed << "s";
  report("A1 hard oracle equivalence", mismatches == 0 && elapsed <= 60.0 && converged > 0,
         detail.str());
}

// ---------------------------------------------------------------------------
// A2: soft-mode oracle equivalence with penalties in [0,5]; at least 70%
// of runs must converge within 100 iterations.
void a2_soft_equivalence(DualityEvidence& evidence) {
  Rng rng(20240202);
  const int instances = 500;
  int converged = 0, mismatches = 0;
  for (int trial = 0; trial < instances; ++trial) {
    RandomInstance inst = random_instance(rng, 0.0, 5.0);
    OracleResult oracle = brute_force_map(inst.table, inst.constraints, OracleMode::Soft);

    std::vector<double> caps = inst.constraints.penalties();
    DDOptions options;
    options.observer = [&](const DualState& state, std::span<const long long>) {
      ++evidence.iterations_watched;
      for (std::size_t i = 0; i < state.lambda.size(); ++i)
        if (!(state.lambda[i] >= -kTol && state.lambda[i] <= caps[i] + kTol))
          evidence.lambda_in_box = false;
    };
    std::vector<TraceRow> trace;
    options.trace = &trace;
    PredictionResult res = soft_dd(inst.table, inst.constraints, options);

    for (const TraceRow& row : trace)
      if (row.dual < oracle.objective - kTol) evidence.dual_bounds_optimum = false;
    if (res.dual < oracle.objective - kTol) evidence.dual_bounds_optimum = false;

    if (res.certificate != Certificate::Converged) continue;
    ++converged;
    if (std::abs(res.primal - oracle.objective) > kTol) ++mismatches;
  }
  double rate = static_cast<double>(converged) / instances;
  std::ostringstream detail;
  detail << converged << "/" << instances << " converged (" << 100.0 * rate << "%), "
         << mismatches << " objective mismatches";
  report("A2 soft oracle equivalence", mismatches == 0 && rate >= 0.70, detail.str());
}

// ---------------------------------------------------------------------------
// A3: degeneracies. Zero penalties reproduce unconstrained viterbi exactly;
// penalties above the score dynamic range reproduce hard-dd decodes on
// mutually-converged feasible instances.
void a3_degeneracies() {
  Rng rng(20240303);
  const int instances = 500;
  int zero_mismatch = 0, range_mismatch = 0, compared = 0;
  for (int trial = 0; trial < instances; ++trial) {
    RandomInstance inst = random_instance(rng, 0.0, 5.0);

    std::vector<double> zero(inst.constraints.size(), 0.0);
    DDOptions zero_options;
    zero_options.penalty_override = &zero;
    PredictionResult res = soft_dd(inst.table, inst.constraints, zero_options);
    ViterbiResult plain = viterbi(inst.table);
    if (res.labels != plain.labels || res.certificate != Certificate::Converged) ++zero_mismatch;

    OracleResult hard_oracle = brute_force_map(inst.table, inst.constraints, OracleMode::Hard);
    if (!hard_oracle.feasible) continue;
    // Dynamic range of w.y over mask-valid sequences, by enumeration.
    ConstraintSet unconstrained(inst.schema);
    OracleResult max_y = brute_force_map(inst.table, unconstrained, OracleMode::Soft);
    ScoreTable negated = inst.table;
    for (double& v : negated.unary) v = -v;
    for (double& v : negated.transition) v = -v;
    OracleResult min_y = brute_force_map(negated, unconstrained, OracleMode::Soft);
    double range = max_y.objective + min_y.objective;  // max - min

    std::vector<double> big(inst.constraints.size(), range + 1.0);
    DDOptions big_options;
    big_options.penalty_override = &big;
    PredictionResult soft = soft_dd(inst.table, inst.constraints, big_options);
    PredictionResult hard = hard_dd(inst.table, inst.constraints);
    if (soft.certificate == Certificate::Converged &&
        hard.certificate == Certificate::Converged) {
      ++compared;
      if (soft.labels != hard.labels) ++range_mismatch;
    }
  }
  std::ostringstream detail;
  detail << "zero-penalty mismatches " << zero_mismatch << "/" << instances
         << ", range-penalty mismatches " << range_mismatch << "/" << compared
         << " mutually-converged";
  report("A3 degeneracies", zero_mismatch == 0 && range_mismatch == 0 && compared > 0,
         detail.str());
}

// ---------------------------------------------------------------------------
// Pipeline state shared by A4/A5/A6.
struct Pipeline {
  std::shared_ptr<const LabelSchema> schema;
  Corpus train, dev, test;
  std::optional<ChainModel> model;
  std::optional<ConstraintSet> pruned;
  std::vector<double> pruned_penalties;
  double unconstrained_f1 = 0.0;
  double soft_f1 = 0.0;
  double mean_iterations = 0.0;
  double elapsed = 0.0;
};

Pipeline build_pipeline() {
  double started = now_seconds();
  GeneratorConfig config;
  config.seed = 90210;
  config.confusion_rate = 0.5;
  config.num_sequences = 600;
  Pipeline p;
  p.train = generate(config);
  config.seed = 90211;
  config.num_sequences = 300;
  p.dev = generate(config);
  config.seed = 90212;
  config.num_sequences = 500;
  p.test = generate(config);

  p.schema = std::make_shared<const LabelSchema>(induce_schema(p.train));
  p.model.emplace(train_base_perceptron(p.train, p.schema, 5, 1.0));

  ConstraintSet all(p.schema);
  all.add_singleton();
  all.add_pairwise();
  all.add_hierarchical();
  std::vector<double> imp = importance_scores(all, p.dev, *p.model);
  p.pruned.emplace(prune(all, imp, 2.75));

  PenaltyLearnerConfig learner;
  learner.epochs = 3;
  learner.learning_rate = 0.1;
  p.pruned_penalties = learn_penalties(p.dev, *p.pruned, *p.model, learner);

  F1Accumulator unconstrained_acc, soft_acc;
  long long iterations = 0;
  DDOptions options;
  options.penalty_override = &p.pruned_penalties;
  for (const Sequence& seq : p.test.sequences) {
    ScoreTable scores = p.model->score_tokens(seq.tokens);
    std::vector<int> gold = label_ids(seq, *p.schema);
    std::vector<Segment> gold_segments = extract_segments(gold, *p.schema);

    ViterbiResult plain = viterbi(scores);
    unconstrained_acc.add(gold_segments, extract_segments(plain.labels, *p.schema));

    PredictionResult res = soft_dd(scores, *p.pruned, options);
    iterations += res.iterations;
    soft_acc.add(gold_segments, extract_segments(res.labels, *p.schema));
  }
  p.unconstrained_f1 = unconstrained_acc.report().micro.f1();
  p.soft_f1 = soft_acc.report().micro.f1();
  p.mean_iterations = static_cast<double>(iterations) / static_cast<double>(p.test.size());
  p.elapsed = now_seconds() - started;
  return p;
}

void a4_end_to_end(const Pipeline& p) {
  double gain_points = 100.0 * (p.soft_f1 - p.unconstrained_f1);
  std::ostringstream detail;
  detail << "unconstrained F1 " << 100.0 * p.unconstrained_f1 << ", soft-dd F1 "
         << 100.0 * p.soft_f1 << " (+" << gain_points << " points), mean iterations "
         << p.mean_iterations << ", " << p.elapsed << "s";
  report("A4 end-to-end gain",
         gain_points >= 1.0 && p.mean_iterations <= 5.0 && p.elapsed <= 300.0, detail.str());
}

// A5: constraint selection over the full template union on the dev split.
void a5_constraint_selection(const Pipeline& p) {
  ConstraintSet all(p.schema);
  all.add_singleton();
  all.add_pairwise();
  all.add_hierarchical();

  PenaltyLearnerConfig learner;
  learner.epochs = 2;
  learner.learning_rate = 0.1;
  LearnStats stats;
  std::vector<double> penalties = learn_penalties(p.dev, all, *p.model, learner, &stats);

  int exact_zero = 0, positive = 0, untouched_nonzero = 0;
  for (std::size_t i = 0; i < penalties.size(); ++i) {
    if (penalties[i] == 0.0) ++exact_zero;
    if (penalties[i] > 0.0) ++positive;
    bool untouched = stats.gold_violations[i] == 0 && stats.pred_violations[i] == 0;
    if (untouched && penalties[i] != 0.0) ++untouched_nonzero;
  }
  std::ostringstream detail;
  detail << penalties.size() << " constraints, " << exact_zero << " exactly zero, " << positive
         << " positive, " << untouched_nonzero << " untouched-but-nonzero";
  report("A5 constraint selection",
         exact_zero >= 1 && positive >= 1 && untouched_nonzero == 0, detail.str());
}

// A6: early-stopping monotonicity on the pipeline's test split.
void a6_early_stopping(const Pipeline& p) {
  std::vector<int> caps = {1, 2, 5, 10, 100};
  ConvergenceReport rep =
      convergence_report(p.test, *p.model, *p.pruned, p.pruned_penalties, caps);
  bool monotone = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    monotone = monotone &&
               rep.rows[i].converged_fraction >= rep.rows[i - 1].converged_fraction - 1e-12;
  bool f1_gain = rep.rows.back().micro_f1 >= rep.rows.front().micro_f1 - 1e-12;
  std::ostringstream detail;
  detail << "converged ";
  for (const ConvergenceRow& row : rep.rows) detail << row.converged_fraction << " ";
  detail << "| F1 cap1 " << 100.0 * rep.rows.front().micro_f1 << " -> cap100 "
         << 100.0 * rep.rows.back().micro_f1;
  report("A6 early stopping monotonicity", monotone && f1_gain, detail.str());
}

void a7_duality(const DualityEvidence& evidence) {
  std::ostringstream detail;
  detail << "lambda in box: " << (evidence.lambda_in_box ? "yes" : "no")
         << ", dual bounds optimum: " << (evidence.dual_bounds_optimum ? "yes" : "no") << " ("
         << evidence.iterations_watched << " iterations watched)";
  report("A7 KKT/duality invariants",
         evidence.lambda_in_box && evidence.dual_bounds_optimum &&
             evidence.iterations_watched > 0,
         detail.str());
}

// ---------------------------------------------------------------------------
// A8: hand-counted importance ratios on a 10-example corpus, then pruning.
void a8_importance() {
  auto schema = make_schema({"B-title", "B-year", "B-author", "B-venue", "O"});
  ChainModel model(schema);
  for (int l = 0; l < schema->size(); ++l)
    model.add_unary(model.dict().intern("w=f" + std::to_string(l)), l, 10.0);
  auto example = [&](std::vector<int> pred, std::vector<std::string> gold) {
    Sequence seq;
    for (int id : pred) seq.tokens.push_back("f" + std::to_string(id));
    seq.labels = std::move(gold);
    return seq;
  };

  Corpus corpus;
  // Predictions violate the title singleton in 5 examples; gold in 2.
  corpus.sequences.push_back(example({0, 0}, {"B-title", "B-title"}));
  corpus.sequences.push_back(example({0, 0}, {"B-title", "B-title"}));
  corpus.sequences.push_back(example({0, 0}, {"B-title", "O"}));
  corpus.sequences.push_back(example({0, 0}, {"B-title", "O"}));
  corpus.sequences.push_back(example({0, 0}, {"B-title", "O"}));
  // Predictions violate year and author in 3 examples; gold violates year
  // once and author never.
  corpus.sequences.push_back(example({1, 1, 2, 2}, {"B-year", "B-year", "B-author", "O"}));
  corpus.sequences.push_back(example({1, 1, 2, 2}, {"B-year", "O", "B-author", "O"}));
  corpus.sequences.push_back(example({1, 1, 2, 2}, {"B-year", "O", "B-author", "O"}));
  // Two quiet examples; venue is never violated by anything.
  corpus.sequences.push_back(example({4, 3}, {"O", "B-venue"}));
  corpus.sequences.push_back(example({4, 3}, {"O", "B-venue"}));

  ConstraintSet set(schema);
  set.add_singleton();  // keys sorted: author, title, venue, year
  std::vector<double> imp = importance_scores(set, corpus, model);

  std::size_t author = 0, title = 0, venue = 0, year = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    std::string key = set.keys()[set[i].coefficients[0].first].str();
    if (key == "0:author") author = i;
    if (key == "0:title") title = i;
    if (key == "0:venue") venue = i;
    if (key == "0:year") year = i;
  }

  bool values_ok = std::isinf(imp[author]) && imp[title] == 2.5 && imp[venue] == 0.0 &&
                   imp[year] == 3.0;

  ConstraintSet kept = prune(set, imp, 2.75);
  // Hand-identified survivors: author (inf) and year (3.0), in set order.
  bool prune_ok = kept.size() == 2;
  if (prune_ok) {
    std::vector<std::string> surviving;
    for (std::size_t i = 0; i < kept.size(); ++i)
      surviving.push_back(kept.keys()[kept[i].coefficients[0].first].str());
    prune_ok = (surviving == std::vector<std::string>{"0:author", "0:year"});
  }

  std::ostringstream detail;
  detail << "imp: author=inf? " << std::isinf(imp[author]) << ", title=" << imp[title]
         << ", venue=" << imp[venue] << ", year=" << imp[year] << ", kept " << kept.size();
  report("A8 importance scores", values_ok && prune_ok, detail.str());
}

}  // namespace

int main() {
  DualityEvidence evidence;
  a1_hard_equivalence(evidence);
  a2_soft_equivalence(evidence);
  a3_degeneracies();
  Pipeline pipeline = build_pipeline();
  a4_end_to_end(pipeline);
  a5_constraint_selection(pipeline);
  a6_early_stopping(pipeline);
  a7_duality(evidence);
  a8_importance();

  if (failures > 0) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all acceptance criteria passed\n";
  return 0;
}
