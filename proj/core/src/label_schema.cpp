#include "softdd/label_schema.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace softdd {

namespace {

[[noreturn]] void bad_label(std::string_view raw, const std::string& why) {
  throw std::invalid_argument("malformed label \"" + std::string(raw) + "\": " + why);
}

}  // namespace

std::string ParsedLabel::serialize() const {
  if (is_outside()) return "O";
  std::string out;
  for (std::size_t d = 0; d < components.size(); ++d) {
    if (d > 0) out += '/';
    out += components[d].prefix == LabelComponent::Prefix::B ? "B-" : "I-";
    out += components[d].name;
  }
  return out;
}

ParsedLabel parse_label(std::string_view raw) {
  if (raw.empty()) bad_label(raw, "empty string");
  if (raw == "O") return ParsedLabel{};

  ParsedLabel result;
  std::size_t begin = 0;
  while (begin <= raw.size()) {
    std::size_t end = raw.find('/', begin);
    if (end == std::string_view::npos) end = raw.size();
    std::string_view part = raw.substr(begin, end - begin);
    if (part == "O") bad_label(raw, "\"O\" cannot be combined with other components");
    LabelComponent comp;
    if (part.size() >= 2 && part[1] == '-' && (part[0] == 'B' || part[0] == 'I')) {
      comp.prefix = part[0] == 'B' ? LabelComponent::Prefix::B : LabelComponent::Prefix::I;
      std::string_view name = part.substr(2);
      if (name.empty()) bad_label(raw, "empty component name");
      if (name.starts_with("B-") || name.starts_with("I-"))
        bad_label(raw, "component name may not start with a B-/I- prefix");
      comp.name = std::string(name);
    } else {
      bad_label(raw, "component \"" + std::string(part) + "\" lacks a B-/I- prefix");
    }
    result.components.push_back(std::move(comp));
    if (end == raw.size()) break;
    begin = end + 1;
  }
  return result;
}

bool bio_start_valid(const ParsedLabel& next) {
  for (const LabelComponent& comp : next.components)
    if (comp.prefix == LabelComponent::Prefix::I) return false;
  return true;
}

bool bio_transition_valid(const ParsedLabel& prev, const ParsedLabel& next) {
  for (std::size_t d = 0; d < next.components.size(); ++d) {
    if (next.components[d].prefix != LabelComponent::Prefix::I) continue;
    if (prev.depth() <= d) return false;
    if (prev.components[d].name != next.components[d].name) return false;
    for (std::size_t e = 0; e < d; ++e)
      if (prev.components[e].name != next.components[e].name) return false;
  }
  return true;
}

std::string CountKey::str() const {
  std::string out = std::to_string(level) + ":";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0) out += '/';
    out += path[i];
  }
  return out;
}

CountKey parse_count_key(std::string_view text) {
  std::size_t colon = text.find(':');
  if (colon == std::string_view::npos)
    throw std::invalid_argument("malformed count key \"" + std::string(text) + "\"");
  CountKey key;
  try {
    key.level = std::stoi(std::string(text.substr(0, colon)));
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed count key level in \"" + std::string(text) + "\"");
  }
  std::string_view rest = text.substr(colon + 1);
  std::size_t begin = 0;
  while (begin <= rest.size()) {
    std::size_t end = rest.find('/', begin);
    if (end == std::string_view::npos) end = rest.size();
    std::string_view name = rest.substr(begin, end - begin);
    if (name.empty())
      throw std::invalid_argument("empty path element in count key \"" + std::string(text) + "\"");
    key.path.emplace_back(name);
    if (end == rest.size()) break;
    begin = end + 1;
  }
  if (static_cast<int>(key.path.size()) != key.level + 1)
    throw std::invalid_argument("count key path length does not match level in \"" +
                                std::string(text) + "\"");
  return key;
}

LabelSchema LabelSchema::from_labels(std::vector<std::string> labels) {
  LabelSchema schema;
  schema.labels_ = std::move(labels);
  schema.parsed_.reserve(schema.labels_.size());
  for (std::size_t id = 0; id < schema.labels_.size(); ++id) {
    const std::string& raw = schema.labels_[id];
    if (!schema.index_.emplace(raw, static_cast<int>(id)).second)
      throw std::invalid_argument("duplicate label \"" + raw + "\" in schema");
    schema.parsed_.push_back(parse_label(raw));
    if (schema.parsed_.back().is_outside()) schema.outside_id_ = static_cast<int>(id);
    schema.depth_ = std::max(schema.depth_, static_cast<int>(schema.parsed_.back().depth()));
  }
  if (schema.outside_id_ < 0) throw std::invalid_argument("schema must contain the label \"O\"");

  const std::size_t L = schema.labels_.size();
  schema.start_valid_.resize(L);
  schema.mask_.resize(L * L);
  for (std::size_t next = 0; next < L; ++next) {
    schema.start_valid_[next] = bio_start_valid(schema.parsed_[next]) ? 1 : 0;
    for (std::size_t prev = 0; prev < L; ++prev)
      schema.mask_[prev * L + next] =
          bio_transition_valid(schema.parsed_[prev], schema.parsed_[next]) ? 1 : 0;
  }
  return schema;
}

LabelSchema LabelSchema::induce(std::vector<std::string> observed) {
  observed.push_back("O");
  std::sort(observed.begin(), observed.end());
  observed.erase(std::unique(observed.begin(), observed.end()), observed.end());
  return from_labels(std::move(observed));
}

std::optional<int> LabelSchema::id_of(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int LabelSchema::require_id(std::string_view label) const {
  auto id = id_of(label);
  if (!id) throw std::invalid_argument("label \"" + std::string(label) + "\" is not in the schema");
  return *id;
}

std::vector<CountKey> enumerate_count_keys(const LabelSchema& schema) {
  std::set<CountKey> keys;
  for (int id = 0; id < schema.size(); ++id)
    for (CountKey& key : begun_keys(schema.parsed(id))) keys.insert(std::move(key));
  return std::vector<CountKey>(keys.begin(), keys.end());
}

std::vector<CountKey> begun_keys(const ParsedLabel& label) {
  std::vector<CountKey> keys;
  for (std::size_t d = 0; d < label.components.size(); ++d) {
    if (label.components[d].prefix != LabelComponent::Prefix::B) continue;
    CountKey key;
    key.level = static_cast<int>(d);
    key.path.reserve(d + 1);
    for (std::size_t e = 0; e <= d; ++e) key.path.push_back(label.components[e].name);
    keys.push_back(std::move(key));
  }
  return keys;
}

std::vector<long long> count_vector(std::span<const ParsedLabel> labels,
                                    const std::vector<CountKey>& keys) {
  std::map<CountKey, std::size_t> slot;
  for (std::size_t i = 0; i < keys.size(); ++i) slot.emplace(keys[i], i);
  std::vector<long long> counts(keys.size(), 0);
  for (const ParsedLabel& label : labels)
    for (const CountKey& key : begun_keys(label)) {
      auto it = slot.find(key);
      if (it != slot.end()) ++counts[it->second];
    }
  return counts;
}

std::vector<long long> count_vector(std::span<const int> label_ids, const LabelSchema& schema,
                                    const std::vector<CountKey>& keys) {
  std::vector<ParsedLabel> parsed;
  parsed.reserve(label_ids.size());
  for (int id : label_ids) parsed.push_back(schema.parsed(id));
  return count_vector(parsed, keys);
}

}  // namespace softdd
