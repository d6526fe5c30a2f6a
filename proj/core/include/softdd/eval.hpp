#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "softdd/chain_model.hpp"
#include "softdd/constraints.hpp"
#include "softdd/corpus.hpp"
#include "softdd/label_schema.hpp"

namespace softdd {

/// A maximal labeled run at one hierarchy level; [start, end) token span.
struct Segment {
  std::size_t start = 0;
  std::size_t end = 0;
  int level = 0;
  std::vector<std::string> path;  // level + 1 names

  std::string path_str() const;
  bool operator==(const Segment&) const = default;
  bool operator<(const Segment& other) const {
    return std::tie(start, end, level, path) < std::tie(other.start, other.end, other.level, other.path);
  }
};

/// All segments of a BIO-valid sequence, every hierarchy level emitted
/// independently. Throws on a BIO-invalid input, naming the position.
std::vector<Segment> extract_segments(std::span<const ParsedLabel> labels);
std::vector<Segment> extract_segments(std::span<const int> label_ids, const LabelSchema& schema);

struct PathStats {
  long long gold = 0;
  long long predicted = 0;
  long long matched = 0;

  double precision() const;
  double recall() const;
  double f1() const;
};

/// Exact-match segment precision/recall/F1, per path and micro-averaged.
struct EvalReport {
  std::map<std::string, PathStats> per_path;
  PathStats micro;

  void write_tsv(std::ostream& out) const;
  void write_json(std::ostream& out) const;
};

/// Accumulates gold/predicted segment pairs sequence by sequence. A
/// prediction matches iff (start, end, path) equal a gold segment of the
/// same sequence; each gold segment matches at most one prediction.
class F1Accumulator {
 public:
  void add(std::span<const Segment> gold, std::span<const Segment> predicted);
  EvalReport report() const;

 private:
  std::map<std::string, PathStats> per_path_;
};

/// Single-pair convenience form.
EvalReport f1(std::span<const Segment> gold, std::span<const Segment> predicted);

/// Corpus-level F1 of predicted label sequences against gold.
EvalReport evaluate_corpus(const Corpus& gold, const std::vector<std::vector<int>>& predictions,
                           const LabelSchema& schema);

struct ConvergenceRow {
  int cap = 0;
  double micro_f1 = 0.0;
  double converged_fraction = 0.0;
  double mean_iterations = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;

  void write_tsv(std::ostream& out) const;
  void write_json(std::ostream& out) const;
};

/// Budget sweep: for each iteration cap, Soft-DD on every example, recording
/// micro F1, the converged fraction, and mean iterations used. Caps must be
/// ascending and non-empty.
ConvergenceReport convergence_report(const Corpus& corpus, const ChainModel& model,
                                     const ConstraintSet& constraints,
                                     std::span<const double> penalties,
                                     std::span<const int> caps, double step0 = 1.0);

}  // namespace softdd
