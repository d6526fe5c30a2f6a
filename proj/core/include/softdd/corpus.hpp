#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "softdd/label_schema.hpp"

namespace softdd {

/// One labeled token sequence, labels kept as raw strings until a schema
/// resolves them.
struct Sequence {
  std::vector<std::string> tokens;
  std::vector<std::string> labels;

  std::size_t size() const { return tokens.size(); }
};

struct Corpus {
  std::vector<Sequence> sequences;

  bool empty() const { return sequences.empty(); }
  std::size_t size() const { return sequences.size(); }
};

// Corpus file format: UTF-8, one "token<TAB>label" per line, sequences
// separated by blank lines, '#'-prefixed lines are comments.
Corpus read_corpus(std::istream& in, const std::string& origin = "<stream>");
Corpus read_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, const Corpus& corpus);
void write_corpus(const std::filesystem::path& path, const Corpus& corpus);

/// Schema induced from a corpus: observed labels plus "O", sorted.
LabelSchema induce_schema(const Corpus& corpus);

/// Resolves a sequence's labels against a schema. Throws on unknown labels.
std::vector<int> label_ids(const Sequence& sequence, const LabelSchema& schema);

/// Verifies every sequence is BIO-valid under the schema's transition rule.
/// Throws std::runtime_error naming the first offending sequence/position.
void check_bio_valid(const Corpus& corpus, const LabelSchema& schema);

}  // namespace softdd
