#pragma once

#include <span>
#include <vector>

#include "softdd/chain_model.hpp"
#include "softdd/constraints.hpp"
#include "softdd/corpus.hpp"

namespace softdd {

struct PenaltyLearnerConfig {
  int epochs = 3;
  double learning_rate = 0.1;
  bool average = true;
  int inner_max_iters = 100;  // Soft-DD budget per example
  double inner_step0 = 1.0;
  double initial_penalty = 0.0;
};

/// Per-constraint counts of example visits whose gold / predicted labeling
/// violated the constraint during learning.
struct LearnStats {
  std::vector<long long> gold_violations;
  std::vector<long long> pred_violations;
};

/// Structured-perceptron estimate of the penalty vector on a development
/// corpus, the base model held fixed. Each visit runs Soft-DD under the
/// current penalties and steps c by rate * (z_pred - z_gold), truncated at 0
/// coordinate-wise. Returns the average over all visits when averaging is on,
/// the final vector otherwise.
std::vector<double> learn_penalties(const Corpus& dev, const ConstraintSet& constraints,
                                    const ChainModel& base, const PenaltyLearnerConfig& config,
                                    LearnStats* stats = nullptr);

struct ActiveSelection {
  ConstraintSet set;      // surviving constraints, penalties filled in
  double sparsity = 0.0;  // fraction dropped
};

/// Constraints with penalty > threshold; the rest can be ignored at test
/// time. Order preserved.
ActiveSelection active_constraints(const ConstraintSet& constraints,
                                   std::span<const double> penalties, double threshold = 0.0);

}  // namespace softdd
