#include "softdd/eval.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "softdd/dd.hpp"

namespace softdd {

std::string Segment::path_str() const {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0) out += '/';
    out += path[i];
  }
  return out;
}

std::vector<Segment> extract_segments(std::span<const ParsedLabel> labels) {
  for (std::size_t k = 0; k < labels.size(); ++k) {
    bool ok = k == 0 ? bio_start_valid(labels[k]) : bio_transition_valid(labels[k - 1], labels[k]);
    if (!ok)
      throw std::invalid_argument("extract_segments: BIO-invalid sequence at position " +
                                  std::to_string(k));
  }

  std::vector<Segment> segments;
  int max_depth = 0;
  for (const ParsedLabel& label : labels)
    max_depth = std::max(max_depth, static_cast<int>(label.depth()));

  for (int d = 0; d < max_depth; ++d) {
    std::size_t k = 0;
    while (k < labels.size()) {
      const ParsedLabel& label = labels[k];
      if (label.depth() <= static_cast<std::size_t>(d) ||
          label.components[d].prefix != LabelComponent::Prefix::B) {
        ++k;
        continue;
      }
      Segment seg;
      seg.start = k;
      seg.level = d;
      for (int e = 0; e <= d; ++e) seg.path.push_back(label.components[e].name);
      std::size_t end = k + 1;
      while (end < labels.size()) {
        const ParsedLabel& next = labels[end];
        if (next.depth() <= static_cast<std::size_t>(d) ||
            next.components[d].prefix != LabelComponent::Prefix::I)
          break;
        bool same_path = true;
        for (int e = 0; e <= d && same_path; ++e)
          same_path = next.components[e].name == seg.path[e];
        if (!same_path) break;
        ++end;
      }
      seg.end = end;
      segments.push_back(std::move(seg));
      k = end;
    }
  }
  std::sort(segments.begin(), segments.end());
  return segments;
}

std::vector<Segment> extract_segments(std::span<const int> label_ids, const LabelSchema& schema) {
  std::vector<ParsedLabel> parsed;
  parsed.reserve(label_ids.size());
  for (int id : label_ids) parsed.push_back(schema.parsed(id));
  return extract_segments(parsed);
}

double PathStats::precision() const {
  return predicted > 0 ? static_cast<double>(matched) / static_cast<double>(predicted) : 0.0;
}

double PathStats::recall() const {
  return gold > 0 ? static_cast<double>(matched) / static_cast<double>(gold) : 0.0;
}

double PathStats::f1() const {
  double p = precision(), r = recall();
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

void F1Accumulator::add(std::span<const Segment> gold, std::span<const Segment> predicted) {
  // Segments of one sequence are unique by (start, end, path), so matching
  // is set intersection.
  std::set<Segment> gold_set(gold.begin(), gold.end());
  for (const Segment& seg : gold) per_path_[seg.path_str()].gold += 1;
  for (const Segment& seg : predicted) {
    PathStats& stats = per_path_[seg.path_str()];
    stats.predicted += 1;
    if (gold_set.erase(seg) > 0) stats.matched += 1;
  }
}

EvalReport F1Accumulator::report() const {
  EvalReport report;
  report.per_path = per_path_;
  for (const auto& [path, stats] : per_path_) {
    report.micro.gold += stats.gold;
    report.micro.predicted += stats.predicted;
    report.micro.matched += stats.matched;
  }
  return report;
}

EvalReport f1(std::span<const Segment> gold, std::span<const Segment> predicted) {
  F1Accumulator acc;
  acc.add(gold, predicted);
  return acc.report();
}

EvalReport evaluate_corpus(const Corpus& gold, const std::vector<std::vector<int>>& predictions,
                           const LabelSchema& schema) {
  if (gold.size() != predictions.size())
    throw std::invalid_argument("evaluate_corpus: prediction count does not match corpus size");
  F1Accumulator acc;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    std::vector<int> gold_ids = label_ids(gold.sequences[i], schema);
    if (gold_ids.size() != predictions[i].size())
      throw std::invalid_argument("evaluate_corpus: sequence " + std::to_string(i) +
                                  " length mismatch");
    acc.add(extract_segments(gold_ids, schema), extract_segments(predictions[i], schema));
  }
  return acc.report();
}

void EvalReport::write_tsv(std::ostream& out) const {
  out << "path\tgold\tpredicted\tmatched\tprecision\trecall\tf1\n";
  auto row = [&out](const std::string& name, const PathStats& s) {
    out << name << '\t' << s.gold << '\t' << s.predicted << '\t' << s.matched << '\t'
        << s.precision() << '\t' << s.recall() << '\t' << s.f1() << '\n';
  };
  for (const auto& [path, stats] : per_path) row(path, stats);
  row("__micro__", micro);
}

namespace {

nlohmann::json stats_json(const PathStats& s) {
  return {{"gold", s.gold},           {"predicted", s.predicted}, {"matched", s.matched},
          {"precision", s.precision()}, {"recall", s.recall()},     {"f1", s.f1()}};
}

}  // namespace

void EvalReport::write_json(std::ostream& out) const {
  nlohmann::json doc;
  doc["paths"] = nlohmann::json::object();
  for (const auto& [path, stats] : per_path) doc["paths"][path] = stats_json(stats);
  doc["micro"] = stats_json(micro);
  out << doc.dump(2) << "\n";
}

void ConvergenceReport::write_tsv(std::ostream& out) const {
  out << "cap\tmicro_f1\tconverged\tmean_iterations\n";
  for (const ConvergenceRow& row : rows)
    out << row.cap << '\t' << row.micro_f1 << '\t' << row.converged_fraction << '\t'
        << row.mean_iterations << '\n';
}

void ConvergenceReport::write_json(std::ostream& out) const {
  nlohmann::json doc = nlohmann::json::array();
  for (const ConvergenceRow& row : rows)
    doc.push_back({{"cap", row.cap},
                   {"micro_f1", row.micro_f1},
                   {"converged", row.converged_fraction},
                   {"mean_iterations", row.mean_iterations}});
  out << doc.dump(2) << "\n";
}

ConvergenceReport convergence_report(const Corpus& corpus, const ChainModel& model,
                                     const ConstraintSet& constraints,
                                     std::span<const double> penalties,
                                     std::span<const int> caps, double step0) {
  if (caps.empty()) throw std::invalid_argument("convergence_report: empty cap list");
  for (std::size_t i = 1; i < caps.size(); ++i)
    if (caps[i] <= caps[i - 1])
      throw std::invalid_argument("convergence_report: caps must be ascending");
  if (corpus.empty()) throw std::invalid_argument("convergence_report: empty corpus");

  std::vector<ScoreTable> tables;
  tables.reserve(corpus.size());
  for (const Sequence& seq : corpus.sequences) tables.push_back(model.score_tokens(seq.tokens));

  std::vector<double> penalty_vec(penalties.begin(), penalties.end());
  ConvergenceReport report;
  for (int cap : caps) {
    DDOptions options;
    options.max_iters = cap;
    options.step0 = step0;
    options.penalty_override = &penalty_vec;

    F1Accumulator acc;
    long long converged = 0;
    long long iterations = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      PredictionResult res = soft_dd(tables[i], constraints, options);
      converged += res.certificate == Certificate::Converged;
      iterations += res.iterations;
      std::vector<int> gold_ids = label_ids(corpus.sequences[i], model.schema());
      acc.add(extract_segments(gold_ids, model.schema()),
              extract_segments(res.labels, model.schema()));
    }
    ConvergenceRow row;
    row.cap = cap;
    row.micro_f1 = acc.report().micro.f1();
    row.converged_fraction = static_cast<double>(converged) / static_cast<double>(corpus.size());
    row.mean_iterations = static_cast<double>(iterations) / static_cast<double>(corpus.size());
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace softdd
