#include "softdd/synthetic.hpp"

#include <stdexcept>
#include <string>
#include <vector>

#include "softdd/rng.hpp"

namespace softdd {

namespace {

std::string vocab_token(const char* stem, long long i) {
  std::string n = std::to_string(i);
  if (n.size() < 2) n = "0" + n;
  return stem + n;
}

struct Block {
  std::vector<std::string> tokens;
  std::vector<std::string> labels;
};

Block field_block(std::vector<std::string> tokens, const std::string& field) {
  Block b;
  for (std::size_t i = 0; i < tokens.size(); ++i)
    b.labels.push_back((i == 0 ? "B-" : "I-") + field);
  b.tokens = std::move(tokens);
  return b;
}

}  // namespace

Corpus generate(const GeneratorConfig& config) {
  if (config.confusion_rate < 0.0 || config.confusion_rate > 1.0)
    throw std::invalid_argument("generate: confusion rate must be in [0,1]");
  if (config.editor_probability < 0.0 || config.editor_probability > 1.0)
    throw std::invalid_argument("generate: editor probability must be in [0,1]");
  if (config.min_length < 1 || config.max_length < config.min_length)
    throw std::invalid_argument("generate: bad length range");

  const bool hierarchical = config.schema_template == GeneratorConfig::Template::Hierarchical;
  Rng root(config.seed);

  Corpus corpus;
  corpus.sequences.reserve(config.num_sequences);
  for (std::size_t s = 0; s < config.num_sequences; ++s) {
    Rng rng = root.fork(s);

    Block ref = field_block({"[" + std::to_string(rng.uniform_int(1, 99)) + "]"}, "ref-marker");

    // Author block: one person, first + last name.
    Block authors;
    authors.tokens = {vocab_token("fn", rng.uniform_int(0, 29)),
                      vocab_token("ln", rng.uniform_int(0, 29))};
    authors.labels = hierarchical
                         ? std::vector<std::string>{"B-authors/B-person/B-first",
                                                    "I-authors/I-person/B-last"}
                         : std::vector<std::string>{"B-author", "I-author"};

    std::vector<std::string> title_tokens;
    std::size_t title_len = static_cast<std::size_t>(rng.uniform_int(2, 4));
    for (std::size_t i = 0; i < title_len; ++i)
      title_tokens.push_back(vocab_token("tw", rng.uniform_int(0, 59)));
    Block title = field_block(std::move(title_tokens), "title");

    std::vector<std::string> journal_tokens;
    std::size_t journal_len = static_cast<std::size_t>(rng.uniform_int(1, 2));
    for (std::size_t i = 0; i < journal_len; ++i)
      journal_tokens.push_back(vocab_token("jw", rng.uniform_int(0, 19)));
    Block journal = field_block(std::move(journal_tokens), "journal");

    Block year = field_block({std::to_string(rng.uniform_int(1980, 2015))}, "year");

    bool has_pages = rng.bernoulli(0.6);
    long long page_from = rng.uniform_int(1, 400);
    Block pages = field_block(
        {std::to_string(page_from) + "--" + std::to_string(page_from + rng.uniform_int(1, 40))},
        "pages");

    // Editor block: each token ambiguous with the author name vocabulary at
    // the confusion rate, otherwise from an editor-only vocabulary. Placed
    // before or after the rest at random so position alone cannot identify
    // it.
    bool has_editor = rng.bernoulli(config.editor_probability);
    bool editor_early = rng.bernoulli(0.5);
    Block editor;
    editor.tokens = {rng.bernoulli(config.confusion_rate) ? vocab_token("fn", rng.uniform_int(0, 29))
                                                          : vocab_token("gn", rng.uniform_int(0, 29)),
                     rng.bernoulli(config.confusion_rate) ? vocab_token("ln", rng.uniform_int(0, 29))
                                                          : vocab_token("sn", rng.uniform_int(0, 29))};
    editor.labels = {"B-editor", "I-editor"};

    // Sequence layout; optional blocks are skipped from the back when the
    // max length would be exceeded.
    std::vector<std::pair<Block*, bool>> layout;  // (block, optional)
    layout.push_back({&ref, false});
    if (has_editor && editor_early) layout.push_back({&editor, true});
    layout.push_back({&authors, false});
    layout.push_back({&title, false});
    layout.push_back({&journal, false});
    layout.push_back({&year, false});
    if (has_pages) layout.push_back({&pages, true});
    if (has_editor && !editor_early) layout.push_back({&editor, true});

    std::size_t total = 0;
    std::vector<bool> include(layout.size(), true);
    for (std::size_t i = 0; i < layout.size(); ++i)
      total += layout[i].first->tokens.size() + (i > 0 ? 1 : 0);
    for (std::size_t i = layout.size(); i-- > 0 && total > config.max_length;) {
      if (!layout[i].second) continue;
      include[i] = false;
      total -= layout[i].first->tokens.size() + 1;
    }
    // Grow the title in place to reach the minimum length; I-title
    // continuations keep the sequence BIO-valid.
    while (total < config.min_length) {
      title.tokens.push_back(vocab_token("tw", rng.uniform_int(0, 59)));
      title.labels.push_back("I-title");
      ++total;
    }

    Sequence seq;
    for (std::size_t i = 0; i < layout.size(); ++i) {
      if (!include[i]) continue;
      if (!seq.tokens.empty()) {
        seq.tokens.push_back(",");
        seq.labels.push_back("O");
      }
      const Block& b = *layout[i].first;
      seq.tokens.insert(seq.tokens.end(), b.tokens.begin(), b.tokens.end());
      seq.labels.insert(seq.labels.end(), b.labels.begin(), b.labels.end());
    }
    corpus.sequences.push_back(std::move(seq));
  }
  return corpus;
}

}  // namespace softdd
