#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "softdd/chain_model.hpp"
#include "softdd/constraints.hpp"

namespace softdd {

/// Multiplier state of one dual-decomposition run. lambda stays inside
/// [0, c] coordinate-wise (upper bound dropped for hard constraints).
struct DualState {
  std::vector<double> lambda;
  int iteration = 0;       // iterations completed
  int dual_increases = 0;  // iterations whose dual rose above the previous one
  double best_dual = std::numeric_limits<double>::infinity();  // lowest dual seen
};

/// eta_t = step0 / (1 + number of dual increases so far).
double step_size(const DualState& state, double step0);

/// Optimality test on one iterate: every constraint is satisfied with
/// equality, or its multiplier sits at 0 (slack constraint), or at its cap
/// c_i (maximally penalized violation). Violations are integers and compared
/// exactly; multiplier endpoint tests use `tolerance`. An infinite penalty
/// removes the cap branch, which turns the test into complementary
/// slackness for hard constraints.
bool kkt_check(std::span<const double> lambda, std::span<const long long> signed_violations,
               std::span<const double> penalties, double tolerance);

enum class Certificate { Converged, IterationLimit };

struct PredictionResult {
  std::vector<int> labels;
  double primal = -std::numeric_limits<double>::infinity();
  double dual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  Certificate certificate = Certificate::IterationLimit;
  std::vector<long long> violations;  // z of the returned labels
};

/// One trace line per iteration, in the order the run produced them.
struct TraceRow {
  int iteration = 0;
  double dual = 0.0;
  double primal = 0.0;
  int violated = 0;
  double eta = 0.0;
};

struct DDOptions {
  int max_iters = 100;
  double step0 = 1.0;
  double tolerance = 1e-9;
  /// Learned penalties can be supplied here without mutating the set.
  const std::vector<double>* penalty_override = nullptr;
  std::vector<TraceRow>* trace = nullptr;
  /// Called after each iteration's multiplier update with the state and the
  /// iterate's signed violations; used by tests to watch invariants.
  std::function<void(const DualState&, std::span<const long long>)> observer;
};

/// Projected-subgradient dual decomposition with soft constraints: each
/// iteration decodes argmax <w - A^T lambda, y> with one viterbi call, then
/// projects lambda + eta * (Ay - b) onto [0, c]. Returns the certified
/// iterate on convergence, otherwise the best-primal iterate seen.
/// Penalties must be >= 0; an infinite penalty makes that row hard.
PredictionResult soft_dd(const ScoreTable& scores, const ConstraintSet& constraints,
                         const DDOptions& options = {});

/// Same iteration with the upper clamp removed and the complementary
/// slackness convergence test; penalties are ignored.
PredictionResult hard_dd(const ScoreTable& scores, const ConstraintSet& constraints,
                         const DDOptions& options = {});

void write_trace(std::ostream& out, std::span<const TraceRow> rows);

}  // namespace softdd
