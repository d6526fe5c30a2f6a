#include "softdd/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace softdd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Enumerator {
  const ScoreTable& scores;
  const ConstraintSet& constraints;
  OracleMode mode;

  std::vector<int> current;
  std::vector<int> best;
  double best_objective = kNegInf;
  bool found = false;

  // Leaf objectives go through soft_objective / sequence_score, the same
  // arithmetic the solver reports, so equal sequences give equal doubles.
  void leaf() {
    double objective;
    if (mode == OracleMode::Soft) {
      objective = soft_objective(scores, constraints, current);
      if (objective == kNegInf) return;  // violated hard-sentinel row
    } else {
      std::vector<long long> counts = constraints.counts_of(current);
      for (std::size_t i = 0; i < constraints.size(); ++i)
        if (constraints.violation(i, counts) > 0) return;
      objective = sequence_score(scores, current);
    }
    // Positions walk in label-id order, so with a strict comparison the
    // first optimum found is the lexicographically smallest one.
    if (!found || objective > best_objective) {
      found = true;
      best_objective = objective;
      best = current;
    }
  }

  void walk(std::size_t t) {
    if (t == scores.length) {
      leaf();
      return;
    }
    for (int l = 0; l < scores.num_labels; ++l) {
      bool valid = t == 0 ? scores.start_valid[l] != 0 : scores.mask_at(current[t - 1], l);
      if (!valid) continue;
      current.push_back(l);
      walk(t + 1);
      current.pop_back();
    }
  }
};

}  // namespace

OracleResult brute_force_map(const ScoreTable& scores, const ConstraintSet& constraints,
                             OracleMode mode) {
  if (scores.length == 0) throw std::invalid_argument("brute_force_map: empty score table");
  double states = std::pow(static_cast<double>(scores.num_labels),
                           static_cast<double>(scores.length));
  if (states > 1e6)
    throw std::invalid_argument("brute_force_map: instance exceeds the enumeration bound");

  Enumerator e{scores, constraints, mode, {}, {}, kNegInf, false};
  e.current.reserve(scores.length);
  e.walk(0);

  OracleResult result;
  if (!e.found) {
    result.feasible = false;
    result.objective = kNegInf;
    return result;
  }
  result.labels = std::move(e.best);
  result.objective = e.best_objective;
  return result;
}

}  // namespace softdd
