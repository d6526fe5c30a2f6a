#include "softdd/dd.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace softdd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PredictionResult run_dd(const ScoreTable& scores, const ConstraintSet& constraints,
                        const DDOptions& options, bool hard_mode) {
  if (options.max_iters < 1) throw std::invalid_argument("dd: max_iters must be >= 1");
  if (options.step0 <= 0.0) throw std::invalid_argument("dd: step0 must be positive");

  const std::size_t n = constraints.size();
  std::vector<double> penalties =
      options.penalty_override ? *options.penalty_override : constraints.penalties();
  if (penalties.size() != n)
    throw std::invalid_argument("dd: penalty vector length does not match constraint count");
  std::vector<double> upper(n, kInf);
  if (!hard_mode) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!(penalties[i] >= 0.0)) throw std::invalid_argument("dd: negative constraint penalty");
      upper[i] = penalties[i];  // kHardPenalty rows stay unclamped
    }
  }

  const int L = scores.num_labels;
  DualState state;
  state.lambda.assign(n, 0.0);

  double prev_dual = 0.0;
  PredictionResult best;  // best primal iterate, for the iteration-limit path
  std::vector<int> last_labels;
  UnaryOffset offset(L, 0.0);
  std::vector<long long> v(n, 0);

  for (int t = 1; t <= options.max_iters; ++t) {
    // offset[l] = -sum_i lambda_i * A[i,l]
    std::fill(offset.begin(), offset.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (state.lambda[i] == 0.0) continue;
      for (int l = 0; l < L; ++l) offset[l] -= state.lambda[i] * constraints.label_coefficient(i, l);
    }

    ViterbiResult decoded = viterbi(scores, offset);
    last_labels = decoded.labels;
    std::vector<long long> counts = constraints.counts_of(decoded.labels);
    int violated = 0;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = constraints.signed_violation(i, counts);
      violated += v[i] > 0;
    }

    // D(lambda) = max_y <w - A^T lambda, y> + lambda^T b
    double dual = decoded.objective;
    for (std::size_t i = 0; i < n; ++i)
      dual += state.lambda[i] * static_cast<double>(constraints[i].bound);

    double primal;
    if (hard_mode) {
      primal = violated == 0 ? sequence_score(scores, decoded.labels) : -kInf;
    } else {
      primal = sequence_score(scores, decoded.labels);
      for (std::size_t i = 0; i < n; ++i)
        if (v[i] > 0) primal -= penalties[i] * static_cast<double>(v[i]);
    }

    state.iteration = t;
    if (t > 1 && dual > prev_dual) ++state.dual_increases;
    prev_dual = dual;
    state.best_dual = std::min(state.best_dual, dual);
    double eta = step_size(state, options.step0);

    if (options.trace) options.trace->push_back({t, dual, primal, violated, eta});

    if (primal > best.primal) {
      best.labels = decoded.labels;
      best.primal = primal;
    }

    if (kkt_check(state.lambda, v, upper, options.tolerance)) {
      PredictionResult result;
      result.labels = std::move(decoded.labels);
      result.primal = primal;
      result.dual = state.best_dual;
      result.iterations = t;
      result.certificate = Certificate::Converged;
      result.violations.assign(n, 0);
      for (std::size_t i = 0; i < n; ++i) result.violations[i] = std::max<long long>(0, v[i]);
      if (options.observer) options.observer(state, v);
      return result;
    }

    for (std::size_t i = 0; i < n; ++i)
      state.lambda[i] =
          std::clamp(state.lambda[i] + eta * static_cast<double>(v[i]), 0.0, upper[i]);
    if (options.observer) options.observer(state, v);
  }

  PredictionResult result;
  result.labels = best.primal > -kInf ? std::move(best.labels) : std::move(last_labels);
  result.primal = best.primal;
  result.dual = state.best_dual;
  result.iterations = options.max_iters;
  result.certificate = Certificate::IterationLimit;
  result.violations = constraints.violations(result.labels);
  return result;
}

}  // namespace

double step_size(const DualState& state, double step0) {
  if (step0 <= 0.0) throw std::invalid_argument("step_size: step0 must be positive");
  return step0 / (1.0 + static_cast<double>(state.dual_increases));
}

bool kkt_check(std::span<const double> lambda, std::span<const long long> signed_violations,
               std::span<const double> penalties, double tolerance) {
  if (lambda.size() != signed_violations.size() || lambda.size() != penalties.size())
    throw std::invalid_argument("kkt_check: mismatched vector lengths");
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (signed_violations[i] == 0) continue;
    if (signed_violations[i] < 0) {
      if (lambda[i] > tolerance) return false;
    } else {
      if (!std::isfinite(penalties[i]) || lambda[i] < penalties[i] - tolerance) return false;
    }
  }
  return true;
}

PredictionResult soft_dd(const ScoreTable& scores, const ConstraintSet& constraints,
                         const DDOptions& options) {
  return run_dd(scores, constraints, options, /*hard_mode=*/false);
}

PredictionResult hard_dd(const ScoreTable& scores, const ConstraintSet& constraints,
                         const DDOptions& options) {
  return run_dd(scores, constraints, options, /*hard_mode=*/true);
}

void write_trace(std::ostream& out, std::span<const TraceRow> rows) {
  for (const TraceRow& row : rows)
    out << row.iteration << '\t' << row.dual << '\t' << row.primal << '\t' << row.violated << '\t'
        << row.eta << '\n';
}

}  // namespace softdd
