#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "softdd/corpus.hpp"
#include "softdd/features.hpp"
#include "softdd/label_schema.hpp"

namespace softdd {

/// Factor scores for one sequence: T x L unary matrix, L x L transition
/// matrix, and the BIO transition mask restricting decoding. Immutable in
/// practice; viterbi never writes to it.
struct ScoreTable {
  std::size_t length = 0;  // T
  int num_labels = 0;      // L
  std::vector<double> unary;               // T * L, row-major
  std::vector<double> transition;          // L * L
  std::vector<std::uint8_t> mask;          // L * L, prev * L + next
  std::vector<std::uint8_t> start_valid;   // L

  double unary_at(std::size_t t, int label) const { return unary[t * num_labels + label]; }
  double& unary_at(std::size_t t, int label) { return unary[t * num_labels + label]; }
  double transition_at(int prev, int next) const {
    return transition[static_cast<std::size_t>(prev) * num_labels + next];
  }
  bool mask_at(int prev, int next) const {
    return mask[static_cast<std::size_t>(prev) * num_labels + next] != 0;
  }
};

/// Per-label score added to every position's unary row; how dual
/// decomposition injects multiplier terms into the decoder.
using UnaryOffset = std::vector<double>;

struct ViterbiResult {
  std::vector<int> labels;
  double objective = 0.0;
};

/// Exact MAP over all mask-valid sequences of Σ unary + offset + Σ
/// transition. Ties prefer the lower label id at every backpointer decision.
/// Throws if no mask-valid sequence exists.
ViterbiResult viterbi(const ScoreTable& scores, const UnaryOffset& offset);
ViterbiResult viterbi(const ScoreTable& scores);

/// Raw score of a fixed labeling (no offsets): Σ unary + Σ transition.
double sequence_score(const ScoreTable& scores, std::span<const int> labels);

/// Linear-chain model: per-feature unary weight rows plus a dense label
/// transition table. Weights immutable from the outside after training.
class ChainModel {
 public:
  explicit ChainModel(std::shared_ptr<const LabelSchema> schema);

  const LabelSchema& schema() const { return *schema_; }
  std::shared_ptr<const LabelSchema> schema_ptr() const { return schema_; }
  const FeatureDict& dict() const { return dict_; }
  FeatureDict& dict() { return dict_; }

  int num_labels() const { return schema_->size(); }
  std::size_t num_features() const { return unary_.size(); }

  double unary_weight(std::uint32_t feature, int label) const {
    return feature < unary_.size() ? unary_[feature][label] : 0.0;
  }
  double transition_weight(int prev, int next) const {
    return transition_[static_cast<std::size_t>(prev) * num_labels() + next];
  }
  void add_unary(std::uint32_t feature, int label, double delta);
  void add_transition(int prev, int next, double delta);

  /// Builds the per-sequence score table; unknown feature ids contribute 0.
  ScoreTable score_sequence(std::span<const FeatureVector> tokens) const;
  /// Featurizes against the frozen dictionary, then scores.
  ScoreTable score_tokens(const std::vector<std::string>& tokens) const;

  // Versioned single-file text format; weights stored as hex floats so a
  // load(save(m)) round trip is bit-exact.
  void save(const std::filesystem::path& path) const;
  static ChainModel load(const std::filesystem::path& path);

 private:
  std::shared_ptr<const LabelSchema> schema_;
  FeatureDict dict_;
  std::vector<std::vector<double>> unary_;  // [feature][label]
  std::vector<double> transition_;          // L * L

  friend ChainModel train_base_perceptron(const Corpus&, std::shared_ptr<const LabelSchema>,
                                          int, double, bool);
};

/// Averaged structured perceptron with viterbi as the inner argmax.
/// Deterministic in corpus order. Throws on an empty corpus or a BIO-invalid
/// gold sequence (reported with sequence index and position).
ChainModel train_base_perceptron(const Corpus& corpus, std::shared_ptr<const LabelSchema> schema,
                                 int epochs, double learning_rate, bool average = true);

/// Token accuracy of unconstrained viterbi decoding against gold labels.
double token_accuracy(const ChainModel& model, const Corpus& corpus);

}  // namespace softdd
