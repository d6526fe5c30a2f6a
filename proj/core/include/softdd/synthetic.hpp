#pragma once

#include <cstdint>

#include "softdd/corpus.hpp"

namespace softdd {

/// Controls the citation-like corpus generator. The generator's point is a
/// corpus with exploitable global regularities: gold sequences carry at most
/// one segment per field, nested person/name counts agree, and with a
/// positive confusion rate the editor block borrows surface forms from the
/// author name vocabulary, so an unconstrained tagger tends to predict a
/// second author segment that count constraints can veto.
struct GeneratorConfig {
  enum class Template { Flat, Hierarchical };

  std::uint64_t seed = 1;
  std::size_t num_sequences = 100;
  std::size_t min_length = 1;
  std::size_t max_length = 64;  // soft target: optional blocks are dropped to fit
  Template schema_template = Template::Hierarchical;
  double confusion_rate = 0.0;       // per-token chance an editor token looks like a name
  double editor_probability = 0.6;   // chance a sequence has an editor block
};

/// Deterministic in the seed: same config, byte-identical corpus.
Corpus generate(const GeneratorConfig& config);

}  // namespace softdd
