#include "softdd/corpus.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace softdd {

Corpus read_corpus(std::istream& in, const std::string& origin) {
  Corpus corpus;
  Sequence current;
  std::string line;
  std::size_t line_no = 0;
  auto flush = [&] {
    if (!current.tokens.empty()) {
      corpus.sequences.push_back(std::move(current));
      current = Sequence{};
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ": expected \"token<TAB>label\", got \"" + line + "\"");
    current.tokens.push_back(line.substr(0, tab));
    current.labels.push_back(line.substr(tab + 1));
  }
  flush();
  return corpus;
}

Corpus read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path.string());
  return read_corpus(in, path.string());
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (std::size_t s = 0; s < corpus.sequences.size(); ++s) {
    if (s > 0) out << '\n';
    const Sequence& seq = corpus.sequences[s];
    for (std::size_t k = 0; k < seq.tokens.size(); ++k)
      out << seq.tokens[k] << '\t' << seq.labels[k] << '\n';
  }
}

void write_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write corpus file: " + path.string());
  write_corpus(out, corpus);
}

LabelSchema induce_schema(const Corpus& corpus) {
  std::vector<std::string> observed;
  for (const Sequence& seq : corpus.sequences)
    observed.insert(observed.end(), seq.labels.begin(), seq.labels.end());
  return LabelSchema::induce(std::move(observed));
}

std::vector<int> label_ids(const Sequence& sequence, const LabelSchema& schema) {
  std::vector<int> ids;
  ids.reserve(sequence.labels.size());
  for (const std::string& label : sequence.labels) ids.push_back(schema.require_id(label));
  return ids;
}

void check_bio_valid(const Corpus& corpus, const LabelSchema& schema) {
  for (std::size_t s = 0; s < corpus.sequences.size(); ++s) {
    const std::vector<int> ids = label_ids(corpus.sequences[s], schema);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      bool ok = k == 0 ? schema.start_valid(ids[k]) : schema.transition_valid(ids[k - 1], ids[k]);
      if (!ok)
        throw std::runtime_error("BIO-invalid gold sequence " + std::to_string(s) +
                                 " at position " + std::to_string(k) + " (label \"" +
                                 corpus.sequences[s].labels[k] + "\")");
    }
  }
}

}  // namespace softdd
