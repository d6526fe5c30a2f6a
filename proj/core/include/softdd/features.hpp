#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace softdd {

/// Interns feature strings to dense ids in first-seen order.
class FeatureDict {
 public:
  std::uint32_t intern(const std::string& name) {
    auto [it, inserted] = index_.emplace(name, static_cast<std::uint32_t>(names_.size()));
    if (inserted) names_.push_back(name);
    return it->second;
  }

  std::optional<std::uint32_t> lookup(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::uint32_t id) const { return names_.at(id); }

 private:
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::string> names_;
};

struct FeatureValue {
  std::uint32_t id = 0;
  double value = 0.0;
};

/// Sparse per-token feature vector.
using FeatureVector = std::vector<FeatureValue>;

/// Feature strings for one token in context: identity, lowercased form,
/// character shape, 1-4 char prefixes/suffixes, binned position (8 bins),
/// regex-style classes (year, page range, initial), and a bias.
std::vector<std::string> token_feature_names(std::string_view token, std::size_t position,
                                             std::size_t length);

/// Featurizes a token sequence. With grow=true unseen strings are interned;
/// with grow=false they are dropped (they would score 0 everywhere anyway).
std::vector<FeatureVector> featurize(const std::vector<std::string>& tokens, FeatureDict& dict,
                                     bool grow);
std::vector<FeatureVector> featurize(const std::vector<std::string>& tokens,
                                     const FeatureDict& dict);

}  // namespace softdd
