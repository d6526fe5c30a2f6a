#pragma once

#include <filesystem>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "softdd/chain_model.hpp"
#include "softdd/corpus.hpp"
#include "softdd/label_schema.hpp"

namespace softdd {

/// Penalty sentinel marking a constraint as hard (violation forbidden).
constexpr double kHardPenalty = std::numeric_limits<double>::infinity();

enum class ConstraintOrigin { Singleton, PairwiseSum, PairwiseDiff, Hierarchical };
const char* origin_name(ConstraintOrigin origin);

/// One global count constraint in normal form:
///   sum_k coef(k) * count(k) <= bound,
/// violated at a per-unit cost `penalty` (or forbidden when hard).
/// Coefficients index into the owning set's key list.
struct Constraint {
  std::vector<std::pair<std::size_t, int>> coefficients;  // (key index, coef), sorted, non-zero
  long long bound = 0;
  double penalty = 0.0;
  ConstraintOrigin origin = ConstraintOrigin::Singleton;
  std::vector<std::size_t> origin_keys;  // keys that instantiated the template

  bool is_hard() const { return penalty == kHardPenalty; }
};

/// An ordered, deduplicated collection of constraints over one schema's
/// count keys, with the per-label coefficient matrix derived for decoding.
class ConstraintSet {
 public:
  explicit ConstraintSet(std::shared_ptr<const LabelSchema> schema);

  const LabelSchema& schema() const { return *schema_; }
  std::shared_ptr<const LabelSchema> schema_ptr() const { return schema_; }
  const std::vector<CountKey>& keys() const { return keys_; }

  std::size_t size() const { return constraints_.size(); }
  bool empty() const { return constraints_.empty(); }
  const Constraint& operator[](std::size_t i) const { return constraints_[i]; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  /// Appends unless an identical (coefficients, bound) pair already exists.
  /// Returns whether the constraint was added. Rejects empty coefficient
  /// lists and negative finite penalties.
  bool add(Constraint constraint);

  // Template families. Each appends in a deterministic order, deduplicating
  // against everything already present.
  void add_singleton();       // count(k) <= 1 for every key
  void add_pairwise();        // s(i)+s(j) and s(i)-s(j) vs bounds {0,1,2,3}, both senses
  void add_hierarchical();    // count(i) - count(j) <= 0 for path-related cross-level pairs

  std::vector<long long> counts_of(std::span<const int> label_ids) const;
  long long signed_violation(std::size_t i, std::span<const long long> counts) const;
  /// max(0, signed violation): the slack z_i the labeling incurs.
  long long violation(std::size_t i, std::span<const long long> counts) const;
  std::vector<long long> violations(std::span<const int> label_ids) const;

  /// Per-label coefficient: how much decoding label `label` at one position
  /// moves constraint i's left-hand side.
  int label_coefficient(std::size_t i, int label) const {
    return label_matrix_[i * schema_->size() + label];
  }

  std::vector<double> penalties() const;
  void set_penalties(std::span<const double> penalties);

  // Text format, one constraint per line:
  //   origin<TAB>expr<TAB><=<TAB>bound<TAB>penalty
  // where expr terms are "coef*level:path/parts" joined by " + " and the
  // penalty column is "HARD" for hard constraints. '#' lines are comments;
  // save() can emit per-constraint scores as comments. Round-trips exactly.
  void save(const std::filesystem::path& path, std::span<const double> scores = {}) const;
  static ConstraintSet load(const std::filesystem::path& path,
                            std::shared_ptr<const LabelSchema> schema);

 private:
  std::size_t key_index(const CountKey& key) const;
  void append_label_matrix_row(const Constraint& constraint);

  std::shared_ptr<const LabelSchema> schema_;
  std::vector<CountKey> keys_;
  std::vector<std::vector<std::size_t>> label_begins_;  // per label id, key indices it opens
  std::vector<Constraint> constraints_;
  std::vector<int> label_matrix_;  // size() x L, row-major
  std::unordered_set<std::string> dedup_;  // canonical (coefficients,bound) signatures
};

/// Ratio of prediction-side to gold-side violation frequency per constraint,
/// predictions coming from unconstrained viterbi under `base`. Zero gold
/// violations score +inf when predictions violate, 0 when nothing does.
std::vector<double> importance_scores(const ConstraintSet& constraints, const Corpus& gold,
                                      const ChainModel& base);

/// Keeps exactly the constraints with score >= cutoff, preserving order.
ConstraintSet prune(const ConstraintSet& constraints, std::span<const double> scores,
                    double cutoff);

/// w·y minus the penalty-weighted violations; -inf if a hard constraint is
/// violated. The objective both Soft-DD and the brute-force oracle maximize.
double soft_objective(const ScoreTable& scores, const ConstraintSet& constraints,
                      std::span<const int> labels);

}  // namespace softdd
