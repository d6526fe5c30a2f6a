#pragma once

#include <span>
#include <vector>

#include "softdd/chain_model.hpp"
#include "softdd/constraints.hpp"

namespace softdd {

enum class OracleMode { Hard, Soft };

struct OracleResult {
  std::vector<int> labels;
  double objective = 0.0;
  bool feasible = true;  // hard mode only; soft instances are always feasible
};

/// Exhaustive constrained MAP over every mask-valid label sequence. Soft
/// mode maximizes w.y - sum_i c_i * max(0, a_i.y - b_i); hard mode maximizes
/// w.y over sequences with no violation, reporting feasible=false when none
/// exists. Ties go to the lexicographically smaller label-id sequence.
/// Throws when L^T exceeds 10^6 states.
OracleResult brute_force_map(const ScoreTable& scores, const ConstraintSet& constraints,
                             OracleMode mode);

}  // namespace softdd
