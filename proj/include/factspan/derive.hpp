#pragma once

// Lossy conversions between word-, arc-, and sentence-level factuality
// labels, plus error-taxonomy aggregation.
//
// Rules:
//   word -> arc:      an arc is non-factual iff its head word or child word
//                     is marked non-factual.
//   arc  -> word:     a word is non-factual iff some incident arc is
//                     non-factual. This direction is an approximation; for
//                     generation-centric (GenC) data it is refused unless
//                     forced, since those arc labels have no defined
//                     word-level reading.
//   arc  -> sentence: non-factual iff any arc is non-factual.
//   word -> sentence: non-factual iff any word is marked.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "factspan/error.hpp"
#include "factspan/types.hpp"

namespace factspan {

inline std::vector<Label> words_to_arcs(const DependencyParse& parse,
                                        const WordMask& word_mask) {
  if (word_mask.size() != parse.token_count) {
    throw ValidationError(
        "word_mask: length " + std::to_string(word_mask.size()) +
        " != token_count " + std::to_string(parse.token_count));
  }
  std::vector<Label> labels;
  labels.reserve(parse.arcs.size());
  for (const Arc& a : parse.arcs) {
    const bool bad = word_mask[a.head_index] != 0 || word_mask[a.child_index] != 0;
    labels.push_back(bad ? Label::NonFactual : Label::Factual);
  }
  return labels;
}

inline WordMask arcs_to_words(const DependencyParse& parse,
                              const std::vector<Label>& arc_labels) {
  if (arc_labels.size() != parse.arcs.size()) {
    throw ValidationError(
        "arc_labels: length " + std::to_string(arc_labels.size()) +
        " != arc count " + std::to_string(parse.arcs.size()));
  }
  WordMask mask(parse.token_count, 0);
  for (std::size_t i = 0; i < parse.arcs.size(); ++i) {
    if (arc_labels[i] == Label::NonFactual) {
      mask[parse.arcs[i].head_index] = 1;
      mask[parse.arcs[i].child_index] = 1;
    }
  }
  return mask;
}

inline Label arcs_to_sentence(const std::vector<Label>& arc_labels) {
  if (arc_labels.empty()) {
    throw ValidationError(
        "arc_labels: empty; zero-arc summaries are Factual by convention and "
        "must be handled by the caller");
  }
  for (Label l : arc_labels) {
    if (l == Label::NonFactual) return Label::NonFactual;
  }
  return Label::Factual;
}

inline Label words_to_sentence(const WordMask& word_mask) {
  if (word_mask.empty()) {
    throw ValidationError("word_mask: empty");
  }
  for (auto m : word_mask) {
    if (m != 0) return Label::NonFactual;
  }
  return Label::Factual;
}

// Fills in missing label granularities of an example where a derivation
// rule exists. Arc labels are derived from a word mask; a word mask is
// derived from arc labels except for GenC provenance (refused unless
// force_genc_words is set). Returns true if anything was added.
inline bool derive_missing(AnnotatedExample& ex, bool force_genc_words = false) {
  bool changed = false;
  if (ex.labels.word_mask && !ex.labels.arc_labels) {
    ex.labels.arc_labels = words_to_arcs(ex.summary.parse, *ex.labels.word_mask);
    changed = true;
  }
  if (ex.labels.arc_labels && !ex.labels.word_mask) {
    if (ex.labels.provenance == Provenance::GenC && !force_genc_words) {
      // GenC arc labels have no defined word-level reading.
      return changed;
    }
    ex.labels.word_mask = arcs_to_words(ex.summary.parse, *ex.labels.arc_labels);
    changed = true;
  }
  return changed;
}

// ---------------------------------------------------------------------------
// Error-taxonomy aggregation

// Per-(category, orientation) fractions of examples exhibiting at least one
// such tag. Repeated identical pairs within one example count once. A single
// example may exhibit several types, so fractions can sum to more than 1.
// Two normalizations are reported: over all examples and over examples that
// carry at least one tag.
struct TaxonomyDistribution {
  // [category][orientation] counts of examples with >=1 matching tag
  std::array<std::array<std::size_t, 3>, 4> example_counts{};
  std::size_t total_examples = 0;
  std::size_t tagged_examples = 0;

  double fraction_of_all(ErrorCategory c, Orientation o) const {
    if (total_examples == 0) return 0.0;
    return static_cast<double>(count(c, o)) / static_cast<double>(total_examples);
  }
  double fraction_of_tagged(ErrorCategory c, Orientation o) const {
    if (tagged_examples == 0) return 0.0;
    return static_cast<double>(count(c, o)) / static_cast<double>(tagged_examples);
  }
  std::size_t count(ErrorCategory c, Orientation o) const {
    return example_counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(o)];
  }
};

inline TaxonomyDistribution taxonomy_distribution(
    const std::vector<AnnotatedExample>& examples) {
  TaxonomyDistribution dist;
  dist.total_examples = examples.size();
  for (const AnnotatedExample& ex : examples) {
    if (!ex.error_tags || ex.error_tags->empty()) continue;
    ++dist.tagged_examples;
    std::array<std::array<bool, 3>, 4> seen{};
    for (const ErrorTag& tag : *ex.error_tags) {
      auto& cell = seen[static_cast<std::size_t>(tag.category)]
                       [static_cast<std::size_t>(tag.orientation)];
      if (!cell) {
        cell = true;
        ++dist.example_counts[static_cast<std::size_t>(tag.category)]
                             [static_cast<std::size_t>(tag.orientation)];
      }
    }
  }
  return dist;
}

}  // namespace factspan
