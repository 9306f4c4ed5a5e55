#pragma once

// Generation-centric synthetic data: beam-bottom paraphrases of gold
// summaries, labeled per dependency arc. A paraphrase arc counts as factual
// when both endpoints align to gold tokens connected by a gold arc with the
// same relation; anything else (novel tokens, reattached structure) is
// non-factual. Word-level labels are deliberately not produced for this
// data: the arc labels have no defined word-level reading.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "factspan/derive.hpp"
#include "factspan/error.hpp"
#include "factspan/providers.hpp"
#include "factspan/types.hpp"

namespace factspan {

using TokenAlignment = std::vector<std::optional<std::size_t>>;

inline std::vector<Label> label_genc_arcs(const DependencyParse& gold_parse,
                                          const DependencyParse& para_parse,
                                          const TokenAlignment& alignment) {
  if (alignment.size() != para_parse.token_count) {
    throw ValidationError(
        "alignment: length " + std::to_string(alignment.size()) +
        " != paraphrase token_count " + std::to_string(para_parse.token_count));
  }
  for (const auto& a : alignment) {
    if (a && *a >= gold_parse.token_count) {
      throw ValidationError("alignment: index " + std::to_string(*a) +
                            " out of range for gold token_count " +
                            std::to_string(gold_parse.token_count));
    }
  }
  std::set<std::tuple<std::size_t, std::size_t, std::string>> gold_arcs;
  for (const Arc& a : gold_parse.arcs) {
    gold_arcs.insert({a.head_index, a.child_index, a.relation});
  }
  std::vector<Label> labels;
  labels.reserve(para_parse.arcs.size());
  for (const Arc& a : para_parse.arcs) {
    const auto& head = alignment[a.head_index];
    const auto& child = alignment[a.child_index];
    const bool entailed =
        head && child && gold_arcs.count({*head, *child, a.relation}) > 0;
    labels.push_back(entailed ? Label::Factual : Label::NonFactual);
  }
  return labels;
}

struct GencStats {
  std::size_t gold_emitted = 0;
  std::size_t paraphrases_emitted = 0;
  std::size_t skipped = 0;
  std::size_t positives = 0;  // realized ratio is reported, not enforced
  std::size_t negatives = 0;
};

struct GencResult {
  std::vector<AnnotatedExample> examples;
  GencStats stats;
  std::vector<std::string> log;
};

// For each (document, gold summary) pair, emits the gold summary as a
// factual example plus its rank-th paraphrase with arc-level labels. The
// paraphrase is parsed by the supplied parser provider; the corpus must
// carry gold parses from a compatible parser.
inline GencResult generate_genc(const std::vector<AnnotatedExample>& corpus,
                                const ParaphraseProvider& provider, int rank,
                                const ParserProvider& parser) {
  if (rank < 1) {
    throw ValidationError("rank must be >= 1");
  }
  GencResult result;
  for (const AnnotatedExample& gold : corpus) {
    AnnotatedExample pos;
    pos.id = gold.id + "#gold";
    pos.document = gold.document;
    pos.document.meta["genc_role"] = "gold";
    pos.summary = gold.summary;
    pos.summary.id = pos.id;
    pos.labels.sentence_label = Label::Factual;
    pos.labels.arc_labels =
        std::vector<Label>(gold.summary.parse.arcs.size(), Label::Factual);
    pos.labels.provenance = Provenance::GenC;
    result.examples.push_back(std::move(pos));
    ++result.stats.gold_emitted;

    auto para = provider.paraphrase(gold.summary.tokens, rank);
    if (!para) {
      ++result.stats.skipped;
      result.log.push_back(gold.id + ": no rank-" + std::to_string(rank) +
                           " paraphrase, skipped");
      continue;
    }
    AnnotatedExample neg;
    neg.id = gold.id + "#rank" + std::to_string(rank);
    neg.document = gold.document;
    neg.document.meta["genc_role"] = "paraphrase";
    neg.document.meta["paraphrase_rank"] = std::to_string(rank);
    neg.summary.id = neg.id;
    neg.summary.tokens = para->tokens;
    neg.summary.parse = parser.parse(para->tokens);
    neg.labels.arc_labels =
        label_genc_arcs(gold.summary.parse, neg.summary.parse, para->alignment);
    if (neg.labels.arc_labels->empty()) {
      neg.labels.sentence_label = Label::Factual;  // zero-arc convention
      neg.document.meta["zero_arcs"] = "1";
    } else {
      neg.labels.sentence_label = arcs_to_sentence(*neg.labels.arc_labels);
    }
    neg.labels.provenance = Provenance::GenC;
    result.examples.push_back(std::move(neg));
    ++result.stats.paraphrases_emitted;
  }
  for (const AnnotatedExample& ex : result.examples) {
    if (ex.labels.sentence_label == Label::Factual) {
      ++result.stats.positives;
    } else {
      ++result.stats.negatives;
    }
  }
  return result;
}

}  // namespace factspan
