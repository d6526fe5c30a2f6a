#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace softdd {

/// One BIO-prefixed level of a hierarchical label, e.g. the "B-person" in
/// "I-authors/B-person/B-first".
struct LabelComponent {
  enum class Prefix : std::uint8_t { B, I };
  Prefix prefix = Prefix::B;
  std::string name;

  bool operator==(const LabelComponent&) const = default;
};

/// A full label decomposed per hierarchy level. Empty components mean the
/// outside label "O".
struct ParsedLabel {
  std::vector<LabelComponent> components;

  bool is_outside() const { return components.empty(); }
  std::size_t depth() const { return components.size(); }

  /// Inverse of parse_label; reproduces the original string exactly.
  std::string serialize() const;

  bool operator==(const ParsedLabel&) const = default;
};

/// Parses "B-name/I-name/..." or "O". Throws std::invalid_argument on a
/// component without a B-/I- prefix, an empty name, a name that itself
/// starts with "B-"/"I-", or "O" mixed with other components.
ParsedLabel parse_label(std::string_view raw);

/// True iff `next` may open a sequence: "O" or all-B components.
bool bio_start_valid(const ParsedLabel& next);

/// True iff `next` may follow `prev`: every I-prefixed level of `next` must
/// continue a component of the same name in `prev`, with the name paths
/// agreeing on all levels above it. B levels and "O" impose nothing.
bool bio_transition_valid(const ParsedLabel& prev, const ParsedLabel& next);

/// Identifies one countable hierarchy element: the B openings at `level`
/// whose ancestor names (including the element itself) equal `path`.
struct CountKey {
  int level = 0;
  std::vector<std::string> path;  // level + 1 names

  std::string str() const;  // "level:name0/name1/..."
  bool operator==(const CountKey&) const = default;
  bool operator<(const CountKey& other) const {
    if (level != other.level) return level < other.level;
    return path < other.path;
  }
};

/// Parses the "level:name0/name1" form produced by CountKey::str().
CountKey parse_count_key(std::string_view text);

/// The closed label universe: parsed labels with dense ids, plus the
/// precomputed BIO transition structure shared by decoding and enumeration.
/// Immutable after construction.
class LabelSchema {
 public:
  /// Builds a schema from an explicit ordered label list. Every label must
  /// parse, ids follow list order, duplicates are rejected, and the bare
  /// label "O" must be present.
  static LabelSchema from_labels(std::vector<std::string> labels);

  /// Canonical schema over an observed label set: sorted lexicographically
  /// with "O" added if absent.
  static LabelSchema induce(std::vector<std::string> observed);

  int size() const { return static_cast<int>(labels_.size()); }
  int depth() const { return depth_; }
  int outside_id() const { return outside_id_; }

  const std::string& label(int id) const { return labels_.at(id); }
  const ParsedLabel& parsed(int id) const { return parsed_.at(id); }
  const std::vector<std::string>& labels() const { return labels_; }

  std::optional<int> id_of(std::string_view label) const;
  /// id_of that throws std::invalid_argument naming the label.
  int require_id(std::string_view label) const;

  bool start_valid(int id) const { return start_valid_[id] != 0; }
  bool transition_valid(int prev, int next) const {
    return mask_[static_cast<std::size_t>(prev) * labels_.size() + next] != 0;
  }

  /// Dense row-major L*L transition mask and start-validity vector, the form
  /// score tables carry.
  const std::vector<std::uint8_t>& transition_mask() const { return mask_; }
  const std::vector<std::uint8_t>& start_mask() const { return start_valid_; }

 private:
  LabelSchema() = default;

  std::vector<std::string> labels_;
  std::vector<ParsedLabel> parsed_;
  std::unordered_map<std::string, int> index_;
  int depth_ = 1;
  int outside_id_ = -1;
  std::vector<std::uint8_t> start_valid_;
  std::vector<std::uint8_t> mask_;
};

/// Every distinct (level, path) with a B opening somewhere in the schema,
/// ordered by level then lexicographic path.
std::vector<CountKey> enumerate_count_keys(const LabelSchema& schema);

/// The keys a single label opens: one per B-prefixed level.
std::vector<CountKey> begun_keys(const ParsedLabel& label);

/// Count vector over `keys`: entry k = number of positions whose label has a
/// B at keys[k].level with matching name path. O tokens contribute nothing.
std::vector<long long> count_vector(std::span<const ParsedLabel> labels,
                                    const std::vector<CountKey>& keys);
std::vector<long long> count_vector(std::span<const int> label_ids, const LabelSchema& schema,
                                    const std::vector<CountKey>& keys);

}  // namespace softdd
