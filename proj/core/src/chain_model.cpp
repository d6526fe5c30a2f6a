#include "softdd/chain_model.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace softdd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string hex_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw std::runtime_error("bad numeric field in model file: \"" + s + "\"");
  return v;
}

}  // namespace

ViterbiResult viterbi(const ScoreTable& scores, const UnaryOffset& offset) {
  const std::size_t T = scores.length;
  const int L = scores.num_labels;
  if (T == 0) throw std::invalid_argument("viterbi: empty score table");
  if (!offset.empty() && static_cast<int>(offset.size()) != L)
    throw std::invalid_argument("viterbi: offset length does not match label count");
  auto off = [&](int l) { return offset.empty() ? 0.0 : offset[l]; };

  std::vector<double> dp(T * L, kNegInf);
  std::vector<int> back(T * L, -1);
  for (int l = 0; l < L; ++l)
    if (scores.start_valid[l]) dp[l] = scores.unary_at(0, l) + off(l);

  for (std::size_t t = 1; t < T; ++t) {
    for (int l = 0; l < L; ++l) {
      double best = kNegInf;
      int best_prev = -1;
      for (int p = 0; p < L; ++p) {
        if (!scores.mask_at(p, l) || dp[(t - 1) * L + p] == kNegInf) continue;
        double cand = dp[(t - 1) * L + p] + scores.transition_at(p, l);
        if (cand > best) {  // strict: ties keep the lowest prev id
          best = cand;
          best_prev = p;
        }
      }
      if (best_prev >= 0) {
        dp[t * L + l] = best + scores.unary_at(t, l) + off(l);
        back[t * L + l] = best_prev;
      }
    }
  }

  double best = kNegInf;
  int best_label = -1;
  for (int l = 0; l < L; ++l)
    if (dp[(T - 1) * L + l] > best) {
      best = dp[(T - 1) * L + l];
      best_label = l;
    }
  if (best_label < 0) throw std::runtime_error("viterbi: no mask-valid label sequence exists");

  ViterbiResult result;
  result.objective = best;
  result.labels.assign(T, 0);
  result.labels[T - 1] = best_label;
  for (std::size_t t = T - 1; t > 0; --t)
    result.labels[t - 1] = back[t * L + result.labels[t]];
  return result;
}

ViterbiResult viterbi(const ScoreTable& scores) { return viterbi(scores, UnaryOffset{}); }

double sequence_score(const ScoreTable& scores, std::span<const int> labels) {
  if (labels.size() != scores.length)
    throw std::invalid_argument("sequence_score: label count does not match table length");
  double total = 0.0;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    total += scores.unary_at(t, labels[t]);
    if (t > 0) total += scores.transition_at(labels[t - 1], labels[t]);
  }
  return total;
}

ChainModel::ChainModel(std::shared_ptr<const LabelSchema> schema) : schema_(std::move(schema)) {
  transition_.assign(static_cast<std::size_t>(num_labels()) * num_labels(), 0.0);
}

void ChainModel::add_unary(std::uint32_t feature, int label, double delta) {
  if (feature >= unary_.size()) unary_.resize(feature + 1, std::vector<double>(num_labels(), 0.0));
  unary_[feature][label] += delta;
}

void ChainModel::add_transition(int prev, int next, double delta) {
  transition_[static_cast<std::size_t>(prev) * num_labels() + next] += delta;
}

ScoreTable ChainModel::score_sequence(std::span<const FeatureVector> tokens) const {
  if (tokens.empty()) throw std::invalid_argument("score_sequence: empty token sequence");
  const int L = num_labels();
  ScoreTable table;
  table.length = tokens.size();
  table.num_labels = L;
  table.unary.assign(tokens.size() * L, 0.0);
  table.transition = transition_;
  table.mask = schema_->transition_mask();
  table.start_valid = schema_->start_mask();
  for (std::size_t t = 0; t < tokens.size(); ++t)
    for (const FeatureValue& fv : tokens[t]) {
      if (fv.id >= unary_.size()) continue;  // unknown ids contribute 0
      const std::vector<double>& row = unary_[fv.id];
      for (int l = 0; l < L; ++l) table.unary[t * L + l] += fv.value * row[l];
    }
  return table;
}

ScoreTable ChainModel::score_tokens(const std::vector<std::string>& tokens) const {
  return score_sequence(featurize(tokens, dict_));
}

void ChainModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path.string());
  const int L = num_labels();
  out << "softdd-model 1\n";
  out << "labels " << L << "\n";
  for (int l = 0; l < L; ++l) out << schema_->label(l) << "\n";
  out << "features " << dict_.size() << "\n";
  for (std::uint32_t f = 0; f < dict_.size(); ++f) out << dict_.name(f) << "\n";
  std::size_t nnz = 0;
  for (const auto& row : unary_)
    for (double w : row)
      if (w != 0.0) ++nnz;
  out << "unary " << nnz << "\n";
  for (std::size_t f = 0; f < unary_.size(); ++f)
    for (int l = 0; l < L; ++l)
      if (unary_[f][l] != 0.0) out << f << " " << l << " " << hex_double(unary_[f][l]) << "\n";
  out << "transition\n";
  for (int p = 0; p < L; ++p) {
    for (int n = 0; n < L; ++n) {
      if (n > 0) out << " ";
      out << hex_double(transition_[static_cast<std::size_t>(p) * L + n]);
    }
    out << "\n";
  }
  out << "end\n";
  if (!out) throw std::runtime_error("failed writing model file: " + path.string());
}

ChainModel ChainModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path.string());
  auto fail = [&](const std::string& why) -> std::runtime_error {
    return std::runtime_error("bad model file " + path.string() + ": " + why);
  };

  std::string word;
  int version = 0;
  if (!(in >> word >> version) || word != "softdd-model" || version != 1)
    throw fail("unrecognized header");

  std::size_t label_count = 0;
  if (!(in >> word >> label_count) || word != "labels") throw fail("expected labels section");
  std::string line;
  std::getline(in, line);
  std::vector<std::string> labels(label_count);
  for (auto& l : labels)
    if (!std::getline(in, l)) throw fail("truncated label list");
  auto schema = std::make_shared<const LabelSchema>(LabelSchema::from_labels(std::move(labels)));
  ChainModel model(schema);

  std::size_t feature_count = 0;
  if (!(in >> word >> feature_count) || word != "features") throw fail("expected features section");
  std::getline(in, line);
  for (std::size_t f = 0; f < feature_count; ++f) {
    if (!std::getline(in, line)) throw fail("truncated feature list");
    if (model.dict_.intern(line) != f) throw fail("duplicate feature name \"" + line + "\"");
  }
  model.unary_.assign(feature_count, std::vector<double>(schema->size(), 0.0));

  std::size_t nnz = 0;
  if (!(in >> word >> nnz) || word != "unary") throw fail("expected unary section");
  for (std::size_t i = 0; i < nnz; ++i) {
    std::size_t f = 0;
    int l = 0;
    std::string value;
    if (!(in >> f >> l >> value)) throw fail("truncated unary weights");
    if (f >= feature_count || l < 0 || l >= schema->size()) throw fail("unary index out of range");
    model.unary_[f][l] = parse_double(value);
  }

  if (!(in >> word) || word != "transition") throw fail("expected transition section");
  for (std::size_t i = 0; i < model.transition_.size(); ++i) {
    std::string value;
    if (!(in >> value)) throw fail("truncated transition table");
    model.transition_[i] = parse_double(value);
  }
  if (!(in >> word) || word != "end") throw fail("missing end marker");
  return model;
}

namespace {

// w += scale * (Phi(gold) - Phi(pred)) restricted to positions/transitions
// where they differ.
void apply_update(ChainModel& model, std::span<const FeatureVector> feats,
                  std::span<const int> gold, std::span<const int> pred, double scale) {
  for (std::size_t t = 0; t < gold.size(); ++t) {
    if (gold[t] != pred[t]) {
      for (const FeatureValue& fv : feats[t]) {
        model.add_unary(fv.id, gold[t], scale * fv.value);
        model.add_unary(fv.id, pred[t], -scale * fv.value);
      }
    }
    if (t > 0 && (gold[t - 1] != pred[t - 1] || gold[t] != pred[t])) {
      model.add_transition(gold[t - 1], gold[t], scale);
      model.add_transition(pred[t - 1], pred[t], -scale);
    }
  }
}

}  // namespace

ChainModel train_base_perceptron(const Corpus& corpus, std::shared_ptr<const LabelSchema> schema,
                                 int epochs, double learning_rate, bool average) {
  if (corpus.empty()) throw std::invalid_argument("train_base_perceptron: empty corpus");
  if (epochs < 0) throw std::invalid_argument("train_base_perceptron: negative epoch count");
  check_bio_valid(corpus, *schema);

  ChainModel model(schema);
  ChainModel sum(schema);  // running sum of the weight vector after each example
  std::vector<std::vector<int>> gold;
  gold.reserve(corpus.size());
  std::vector<std::vector<FeatureVector>> feats;
  feats.reserve(corpus.size());
  for (const Sequence& seq : corpus.sequences) {
    gold.push_back(label_ids(seq, *schema));
    feats.push_back(featurize(seq.tokens, model.dict(), /*grow=*/true));
  }

  long long visits = 0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      ViterbiResult pred = viterbi(model.score_sequence(feats[i]));
      if (pred.labels != gold[i])
        apply_update(model, feats[i], gold[i], pred.labels, learning_rate);
      ++visits;
      if (average) {
        if (sum.unary_.size() < model.unary_.size())
          sum.unary_.resize(model.unary_.size(), std::vector<double>(schema->size(), 0.0));
        for (std::size_t f = 0; f < model.unary_.size(); ++f)
          for (int l = 0; l < schema->size(); ++l) sum.unary_[f][l] += model.unary_[f][l];
        for (std::size_t i2 = 0; i2 < model.transition_.size(); ++i2)
          sum.transition_[i2] += model.transition_[i2];
      }
    }
  }

  if (average && visits > 0) {
    for (auto& row : sum.unary_)
      for (double& w : row) w /= static_cast<double>(visits);
    for (double& w : sum.transition_) w /= static_cast<double>(visits);
    sum.dict() = model.dict();
    return sum;
  }
  return model;
}

double token_accuracy(const ChainModel& model, const Corpus& corpus) {
  long long correct = 0, total = 0;
  for (const Sequence& seq : corpus.sequences) {
    std::vector<int> gold = label_ids(seq, model.schema());
    ViterbiResult pred = viterbi(model.score_tokens(seq.tokens));
    for (std::size_t t = 0; t < gold.size(); ++t) {
      correct += gold[t] == pred.labels[t];
      ++total;
    }
  }
  return total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

}  // namespace softdd
