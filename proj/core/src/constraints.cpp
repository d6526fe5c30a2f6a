#include "softdd/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace softdd {

namespace {

std::string format_penalty(double penalty) {
  if (penalty == kHardPenalty) return "HARD";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", penalty);
  return buf;
}

double parse_penalty(const std::string& text) {
  if (text == "HARD") return kHardPenalty;
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0')
    throw std::runtime_error("bad penalty field \"" + text + "\"");
  return v;
}

}  // namespace

const char* origin_name(ConstraintOrigin origin) {
  switch (origin) {
    case ConstraintOrigin::Singleton: return "singleton";
    case ConstraintOrigin::PairwiseSum: return "pairwise-sum";
    case ConstraintOrigin::PairwiseDiff: return "pairwise-diff";
    case ConstraintOrigin::Hierarchical: return "hierarchical";
  }
  return "?";
}

ConstraintSet::ConstraintSet(std::shared_ptr<const LabelSchema> schema)
    : schema_(std::move(schema)) {
  keys_ = enumerate_count_keys(*schema_);
  std::map<CountKey, std::size_t> slot;
  for (std::size_t i = 0; i < keys_.size(); ++i) slot.emplace(keys_[i], i);
  label_begins_.resize(schema_->size());
  for (int l = 0; l < schema_->size(); ++l)
    for (const CountKey& key : begun_keys(schema_->parsed(l)))
      label_begins_[l].push_back(slot.at(key));
}

std::size_t ConstraintSet::key_index(const CountKey& key) const {
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || !(*it == key))
    throw std::invalid_argument("count key \"" + key.str() + "\" is not in the schema");
  return static_cast<std::size_t>(it - keys_.begin());
}

void ConstraintSet::append_label_matrix_row(const Constraint& constraint) {
  const int L = schema_->size();
  std::size_t base = label_matrix_.size();
  label_matrix_.resize(base + L, 0);
  for (int l = 0; l < L; ++l) {
    int total = 0;
    for (std::size_t key : label_begins_[l])
      for (const auto& [k, coef] : constraint.coefficients)
        if (k == key) total += coef;
    label_matrix_[base + l] = total;
  }
}

bool ConstraintSet::add(Constraint constraint) {
  if (constraint.coefficients.empty())
    throw std::invalid_argument("constraint must have at least one coefficient");
  if (!constraint.is_hard() && !(constraint.penalty >= 0.0))
    throw std::invalid_argument("constraint penalty must be non-negative");
  std::sort(constraint.coefficients.begin(), constraint.coefficients.end());
  for (const auto& [key, coef] : constraint.coefficients) {
    if (key >= keys_.size()) throw std::invalid_argument("constraint key index out of range");
    if (coef == 0) throw std::invalid_argument("constraint coefficient must be non-zero");
  }

  std::string signature;
  for (const auto& [key, coef] : constraint.coefficients)
    signature += std::to_string(key) + "*" + std::to_string(coef) + ";";
  signature += "<=" + std::to_string(constraint.bound);
  if (!dedup_.insert(std::move(signature)).second) return false;
  append_label_matrix_row(constraint);
  constraints_.push_back(std::move(constraint));
  return true;
}

void ConstraintSet::add_singleton() {
  for (std::size_t k = 0; k < keys_.size(); ++k) {
    Constraint c;
    c.coefficients = {{k, 1}};
    c.bound = 1;
    c.origin = ConstraintOrigin::Singleton;
    c.origin_keys = {k};
    add(std::move(c));
  }
}

void ConstraintSet::add_pairwise() {
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    for (std::size_t j = i + 1; j < keys_.size(); ++j) {
      // s(i) + s(j) <= k and >= k for k in {0,1,2,3}
      for (long long k = 0; k <= 3; ++k) {
        Constraint le;
        le.coefficients = {{i, 1}, {j, 1}};
        le.bound = k;
        le.origin = ConstraintOrigin::PairwiseSum;
        le.origin_keys = {i, j};
        add(std::move(le));

        Constraint ge;  // -s(i) - s(j) <= -k
        ge.coefficients = {{i, -1}, {j, -1}};
        ge.bound = -k;
        ge.origin = ConstraintOrigin::PairwiseSum;
        ge.origin_keys = {i, j};
        add(std::move(ge));
      }
      // s(a) - s(b) <= k and >= k for both orientations
      for (auto [a, b] : {std::pair{i, j}, std::pair{j, i}}) {
        for (long long k = 0; k <= 3; ++k) {
          Constraint le;
          le.coefficients = {{a, 1}, {b, -1}};
          le.bound = k;
          le.origin = ConstraintOrigin::PairwiseDiff;
          le.origin_keys = {a, b};
          add(std::move(le));

          Constraint ge;  // -(s(a) - s(b)) <= -k
          ge.coefficients = {{a, -1}, {b, 1}};
          ge.bound = -k;
          ge.origin = ConstraintOrigin::PairwiseDiff;
          ge.origin_keys = {a, b};
          add(std::move(ge));
        }
      }
    }
  }
}

namespace {

bool path_prefix(const std::vector<std::string>& shorter, const std::vector<std::string>& longer) {
  if (shorter.size() >= longer.size()) return false;
  return std::equal(shorter.begin(), shorter.end(), longer.begin());
}

// Related: ancestor/descendant by name path, or same element name at
// different levels.
bool keys_related(const CountKey& a, const CountKey& b) {
  if (a.level == b.level) return false;
  if (path_prefix(a.path, b.path) || path_prefix(b.path, a.path)) return true;
  return a.path.back() == b.path.back();
}

}  // namespace

void ConstraintSet::add_hierarchical() {
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    for (std::size_t j = 0; j < keys_.size(); ++j) {
      if (i == j || !keys_related(keys_[i], keys_[j])) continue;
      Constraint c;  // count(i) - count(j) <= 0
      c.coefficients = {{i, 1}, {j, -1}};
      c.bound = 0;
      c.origin = ConstraintOrigin::Hierarchical;
      c.origin_keys = {i, j};
      add(std::move(c));
    }
  }
}

std::vector<long long> ConstraintSet::counts_of(std::span<const int> label_ids) const {
  std::vector<long long> counts(keys_.size(), 0);
  for (int id : label_ids)
    for (std::size_t key : label_begins_[id]) ++counts[key];
  return counts;
}

long long ConstraintSet::signed_violation(std::size_t i, std::span<const long long> counts) const {
  const Constraint& c = constraints_[i];
  long long lhs = 0;
  for (const auto& [key, coef] : c.coefficients) lhs += coef * counts[key];
  return lhs - c.bound;
}

long long ConstraintSet::violation(std::size_t i, std::span<const long long> counts) const {
  return std::max<long long>(0, signed_violation(i, counts));
}

std::vector<long long> ConstraintSet::violations(std::span<const int> label_ids) const {
  std::vector<long long> counts = counts_of(label_ids);
  std::vector<long long> z(constraints_.size(), 0);
  for (std::size_t i = 0; i < constraints_.size(); ++i) z[i] = violation(i, counts);
  return z;
}

std::vector<double> ConstraintSet::penalties() const {
  std::vector<double> p(constraints_.size(), 0.0);
  for (std::size_t i = 0; i < constraints_.size(); ++i) p[i] = constraints_[i].penalty;
  return p;
}

void ConstraintSet::set_penalties(std::span<const double> penalties) {
  if (penalties.size() != constraints_.size())
    throw std::invalid_argument("penalty vector length does not match constraint count");
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    if (penalties[i] != kHardPenalty && !(penalties[i] >= 0.0))
      throw std::invalid_argument("constraint penalty must be non-negative");
    constraints_[i].penalty = penalties[i];
  }
}

void ConstraintSet::save(const std::filesystem::path& path, std::span<const double> scores) const {
  if (!scores.empty() && scores.size() != constraints_.size())
    throw std::invalid_argument("score vector length does not match constraint count");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write constraint file: " + path.string());
  out << "# softdd-constraints 1\n";
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    const Constraint& c = constraints_[i];
    if (!scores.empty()) {
      out << "# imp ";
      if (std::isinf(scores[i]))
        out << "inf";
      else
        out << format_penalty(scores[i]);
      out << "\n";
    }
    out << origin_name(c.origin) << "(";
    for (std::size_t k = 0; k < c.origin_keys.size(); ++k) {
      if (k > 0) out << ",";
      out << keys_[c.origin_keys[k]].str();
    }
    out << ")\t";
    for (std::size_t k = 0; k < c.coefficients.size(); ++k) {
      if (k > 0) out << " + ";
      out << c.coefficients[k].second << "*" << keys_[c.coefficients[k].first].str();
    }
    out << "\t<=\t" << c.bound << "\t" << format_penalty(c.penalty) << "\n";
  }
  if (!out) throw std::runtime_error("failed writing constraint file: " + path.string());
}

ConstraintSet ConstraintSet::load(const std::filesystem::path& path,
                                  std::shared_ptr<const LabelSchema> schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open constraint file: " + path.string());
  ConstraintSet set(std::move(schema));

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto fail = [&](const std::string& why) -> std::runtime_error {
      return std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + why);
    };

    std::vector<std::string> fields;
    std::size_t begin = 0;
    while (begin <= line.size()) {
      std::size_t end = line.find('\t', begin);
      if (end == std::string::npos) end = line.size();
      fields.push_back(line.substr(begin, end - begin));
      if (end == line.size()) break;
      begin = end + 1;
    }
    if (fields.size() != 5 || fields[2] != "<=") throw fail("expected 5 tab-separated fields");

    Constraint c;
    // origin: "tag(key,key,...)"
    std::size_t paren = fields[0].find('(');
    if (paren == std::string::npos || fields[0].back() != ')') throw fail("bad origin field");
    std::string tag = fields[0].substr(0, paren);
    bool tag_ok = false;
    for (ConstraintOrigin origin :
         {ConstraintOrigin::Singleton, ConstraintOrigin::PairwiseSum, ConstraintOrigin::PairwiseDiff,
          ConstraintOrigin::Hierarchical})
      if (tag == origin_name(origin)) {
        c.origin = origin;
        tag_ok = true;
      }
    if (!tag_ok) throw fail("unknown origin tag \"" + tag + "\"");
    std::string keys_text = fields[0].substr(paren + 1, fields[0].size() - paren - 2);
    std::stringstream key_stream(keys_text);
    std::string key_text;
    while (std::getline(key_stream, key_text, ','))
      c.origin_keys.push_back(set.key_index(parse_count_key(key_text)));

    // expression: "coef*key + coef*key"
    std::stringstream expr(fields[1]);
    std::string term;
    while (std::getline(expr, term, '+')) {
      while (!term.empty() && term.front() == ' ') term.erase(term.begin());
      while (!term.empty() && term.back() == ' ') term.pop_back();
      if (term.empty()) throw fail("empty term in expression");
      std::size_t star = term.find('*');
      if (star == std::string::npos) throw fail("term \"" + term + "\" lacks coef*key form");
      int coef = 0;
      try {
        coef = std::stoi(term.substr(0, star));
      } catch (const std::exception&) {
        throw fail("bad coefficient in term \"" + term + "\"");
      }
      c.coefficients.emplace_back(set.key_index(parse_count_key(term.substr(star + 1))), coef);
    }

    try {
      c.bound = std::stoll(fields[3]);
    } catch (const std::exception&) {
      throw fail("bad bound field \"" + fields[3] + "\"");
    }
    c.penalty = parse_penalty(fields[4]);
    if (!set.add(std::move(c))) throw fail("duplicate constraint");
  }
  return set;
}

std::vector<double> importance_scores(const ConstraintSet& constraints, const Corpus& gold,
                                      const ChainModel& base) {
  if (gold.empty()) throw std::invalid_argument("importance_scores: empty corpus");
  std::vector<long long> pred_violated(constraints.size(), 0);
  std::vector<long long> gold_violated(constraints.size(), 0);
  for (const Sequence& seq : gold.sequences) {
    std::vector<int> gold_ids = label_ids(seq, constraints.schema());
    ViterbiResult pred = viterbi(base.score_tokens(seq.tokens));
    std::vector<long long> gold_counts = constraints.counts_of(gold_ids);
    std::vector<long long> pred_counts = constraints.counts_of(pred.labels);
    for (std::size_t i = 0; i < constraints.size(); ++i) {
      gold_violated[i] += constraints.violation(i, gold_counts) > 0;
      pred_violated[i] += constraints.violation(i, pred_counts) > 0;
    }
  }
  std::vector<double> scores(constraints.size(), 0.0);
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    if (gold_violated[i] > 0)
      scores[i] = static_cast<double>(pred_violated[i]) / static_cast<double>(gold_violated[i]);
    else
      scores[i] = pred_violated[i] > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return scores;
}

ConstraintSet prune(const ConstraintSet& constraints, std::span<const double> scores,
                    double cutoff) {
  if (scores.size() != constraints.size())
    throw std::invalid_argument("prune: score vector length does not match constraint count");
  ConstraintSet kept(constraints.schema_ptr());
  for (std::size_t i = 0; i < constraints.size(); ++i)
    if (scores[i] >= cutoff) kept.add(constraints[i]);
  return kept;
}

double soft_objective(const ScoreTable& scores, const ConstraintSet& constraints,
                      std::span<const int> labels) {
  double objective = sequence_score(scores, labels);
  std::vector<long long> counts = constraints.counts_of(labels);
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    long long z = constraints.violation(i, counts);
    if (z == 0) continue;
    if (constraints[i].is_hard()) return -std::numeric_limits<double>::infinity();
    objective -= constraints[i].penalty * static_cast<double>(z);
  }
  return objective;
}

}  // namespace softdd
