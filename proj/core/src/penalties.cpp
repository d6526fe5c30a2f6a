#include "softdd/penalties.hpp"

#include <algorithm>
#include <stdexcept>

#include "softdd/dd.hpp"

namespace softdd {

std::vector<double> learn_penalties(const Corpus& dev, const ConstraintSet& constraints,
                                    const ChainModel& base, const PenaltyLearnerConfig& config,
                                    LearnStats* stats) {
  if (dev.empty()) throw std::invalid_argument("learn_penalties: empty corpus");
  if (config.epochs < 1) throw std::invalid_argument("learn_penalties: epochs must be >= 1");
  if (config.learning_rate < 0.0)
    throw std::invalid_argument("learn_penalties: negative learning rate");
  if (config.initial_penalty < 0.0)
    throw std::invalid_argument("learn_penalties: negative initial penalty");

  const std::size_t n = constraints.size();
  if (stats) {
    stats->gold_violations.assign(n, 0);
    stats->pred_violations.assign(n, 0);
  }

  // Fixed per-example state: score tables and gold slack vectors.
  std::vector<ScoreTable> tables;
  std::vector<std::vector<long long>> gold_z;
  tables.reserve(dev.size());
  gold_z.reserve(dev.size());
  for (const Sequence& seq : dev.sequences) {
    tables.push_back(base.score_tokens(seq.tokens));
    gold_z.push_back(constraints.violations(label_ids(seq, constraints.schema())));
  }

  std::vector<double> c(n, config.initial_penalty);
  std::vector<double> c_sum(n, 0.0);
  long long visits = 0;

  DDOptions dd_options;
  dd_options.max_iters = config.inner_max_iters;
  dd_options.step0 = config.inner_step0;
  dd_options.penalty_override = &c;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = 0; i < dev.size(); ++i) {
      PredictionResult pred = soft_dd(tables[i], constraints, dd_options);
      for (std::size_t j = 0; j < n; ++j) {
        double step = config.learning_rate *
                      static_cast<double>(pred.violations[j] - gold_z[i][j]);
        c[j] = std::max(0.0, c[j] + step);
        if (stats) {
          stats->gold_violations[j] += gold_z[i][j] > 0;
          stats->pred_violations[j] += pred.violations[j] > 0;
        }
      }
      ++visits;
      if (config.average)
        for (std::size_t j = 0; j < n; ++j) c_sum[j] += c[j];
    }
  }

  if (config.average) {
    for (std::size_t j = 0; j < n; ++j) c_sum[j] /= static_cast<double>(visits);
    return c_sum;
  }
  return c;
}

ActiveSelection active_constraints(const ConstraintSet& constraints,
                                   std::span<const double> penalties, double threshold) {
  if (penalties.size() != constraints.size())
    throw std::invalid_argument("active_constraints: penalty vector length mismatch");
  if (threshold < 0.0) throw std::invalid_argument("active_constraints: negative threshold");
  ActiveSelection selection{ConstraintSet(constraints.schema_ptr()), 0.0};
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    if (penalties[i] > threshold) {
      Constraint kept = constraints[i];
      kept.penalty = penalties[i];
      selection.set.add(std::move(kept));
    }
  }
  if (constraints.size() > 0)
    selection.sparsity = 1.0 - static_cast<double>(selection.set.size()) /
                                   static_cast<double>(constraints.size());
  return selection;
}

}  // namespace softdd
