#pragma once

// Entity-centric synthetic corruption. Claims drawn from a source article
// or reference summary are perturbed by entity/number swapping, pronoun
// swapping, and sentence negation; each negative records the exact token
// span where the error was introduced. Paraphrase positives and
// label-preserving noise injection round out the transformation suite.
//
// Every output's labels are tied to the recorded span: the word mask marks
// exactly the span tokens, arc labels follow from the word -> arc rule, and
// the sentence label from the word -> sentence rule.

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "factspan/derive.hpp"
#include "factspan/error.hpp"
#include "factspan/parse_edit.hpp"
#include "factspan/providers.hpp"
#include "factspan/rng.hpp"
#include "factspan/types.hpp"

namespace factspan {

enum class TransformKind : std::uint8_t {
  Paraphrase,
  EntitySwap,
  NumberSwap,
  PronounSwap,
  SentenceNegation,
  NoiseInjection,
};

enum class Polarity : std::uint8_t { Positive, Negative, LabelPreserving };

inline Polarity polarity_of(TransformKind kind) {
  switch (kind) {
    case TransformKind::Paraphrase:
      return Polarity::Positive;
    case TransformKind::NoiseInjection:
      return Polarity::LabelPreserving;
    default:
      return Polarity::Negative;
  }
}

inline const char* to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::Paraphrase: return "paraphrase";
    case TransformKind::EntitySwap: return "entity_swap";
    case TransformKind::NumberSwap: return "number_swap";
    case TransformKind::PronounSwap: return "pronoun_swap";
    case TransformKind::SentenceNegation: return "negation";
    case TransformKind::NoiseInjection: return "noise";
  }
  return "?";
}

// A single applied corruption. out_span marks the changed tokens in the new
// sequence, src_span the tokens they replaced in the source; outside these
// spans the two sequences are identical.
struct TransformResult {
  std::vector<std::string> tokens;
  DependencyParse parse;
  Span out_span;
  Span src_span;
};

namespace detail {

inline std::vector<std::string> splice_tokens(
    const std::vector<std::string>& tokens, std::size_t begin, std::size_t end,
    const std::vector<std::string>& replacement) {
  std::vector<std::string> out;
  out.reserve(tokens.size() - (end - begin) + replacement.size());
  out.insert(out.end(), tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(begin));
  out.insert(out.end(), replacement.begin(), replacement.end());
  out.insert(out.end(), tokens.begin() + static_cast<std::ptrdiff_t>(end), tokens.end());
  return out;
}

// Sentence-start repair, applied only when the transform touched token 0 so
// the edit never leaks outside the recorded span.
inline void repair_sentence_start(TransformResult& result) {
  if (result.out_span.begin != 0 || result.tokens.empty()) return;
  std::string& first = result.tokens.front();
  if (!first.empty() && std::islower(static_cast<unsigned char>(first[0]))) {
    first[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(first[0])));
  }
}

inline std::optional<long long> numeric_value(const std::string& token) {
  if (lex::is_integer_token(token)) {
    try {
      return std::stoll(token);
    } catch (const std::out_of_range&) {
      return std::nullopt;
    }
  }
  auto it = lex::number_words().find(lex::lower(token));
  if (it != lex::number_words().end()) return it->second;
  return std::nullopt;
}

}  // namespace detail

// Replaces one claim entity with a document entity of the same type and a
// different surface form, chosen uniformly over all eligible pairs.
inline std::optional<TransformResult> apply_entity_swap(
    const std::vector<std::string>& tokens, const DependencyParse& parse,
    const std::vector<TypedSpan>& claim_entities,
    const std::vector<std::string>& doc_tokens,
    const std::vector<TypedSpan>& doc_entities, Rng& rng) {
  auto surface = [](const std::vector<std::string>& toks, Span s) {
    std::string out;
    for (std::size_t i = s.begin; i < s.end; ++i) {
      if (!out.empty()) out += ' ';
      out += lex::lower(toks[i]);
    }
    return out;
  };
  std::vector<std::pair<std::size_t, std::size_t>> candidates;
  for (std::size_t c = 0; c < claim_entities.size(); ++c) {
    for (std::size_t d = 0; d < doc_entities.size(); ++d) {
      if (claim_entities[c].type != doc_entities[d].type) continue;
      if (surface(tokens, claim_entities[c].span) ==
          surface(doc_tokens, doc_entities[d].span)) {
        continue;
      }
      candidates.emplace_back(c, d);
    }
  }
  if (candidates.empty()) return std::nullopt;
  const auto [c, d] = candidates[rng.bounded(candidates.size())];
  const Span src = claim_entities[c].span;
  const Span doc_span = doc_entities[d].span;
  std::vector<std::string> replacement(
      doc_tokens.begin() + static_cast<std::ptrdiff_t>(doc_span.begin),
      doc_tokens.begin() + static_cast<std::ptrdiff_t>(doc_span.end));

  TransformResult result;
  result.tokens = detail::splice_tokens(tokens, src.begin, src.end, replacement);
  result.parse = splice_span(parse, src.begin, src.end, replacement.size());
  result.src_span = src;
  result.out_span = Span{src.begin, src.begin + replacement.size()};
  detail::repair_sentence_start(result);
  return result;
}

// Entity swap restricted to number/date spans. When the document offers no
// distinct same-type value, an integer claim token is perturbed by a uniform
// offset in +-1..10 (results below 1 are discarded).
inline std::optional<TransformResult> apply_number_swap(
    const std::vector<std::string>& tokens, const DependencyParse& parse,
    const std::vector<TypedSpan>& claim_numbers,
    const std::vector<std::string>& doc_tokens,
    const std::vector<TypedSpan>& doc_numbers, Rng& rng) {
  auto distinct = [&](const TypedSpan& claim, const TypedSpan& doc) {
    const std::string claim_tok = tokens[claim.span.begin];
    const std::string doc_tok = doc_tokens[doc.span.begin];
    const auto cv = detail::numeric_value(claim_tok);
    const auto dv = detail::numeric_value(doc_tok);
    if (cv && dv) return *cv != *dv;
    return lex::lower(claim_tok) != lex::lower(doc_tok);
  };
  std::vector<std::pair<std::size_t, std::size_t>> candidates;
  for (std::size_t c = 0; c < claim_numbers.size(); ++c) {
    for (std::size_t d = 0; d < doc_numbers.size(); ++d) {
      if (claim_numbers[c].type != doc_numbers[d].type) continue;
      if (!distinct(claim_numbers[c], doc_numbers[d])) continue;
      candidates.emplace_back(c, d);
    }
  }
  if (!candidates.empty()) {
    const auto [c, d] = candidates[rng.bounded(candidates.size())];
    const Span src = claim_numbers[c].span;
    std::vector<std::string> replacement = {doc_tokens[doc_numbers[d].span.begin]};
    TransformResult result;
    result.tokens = detail::splice_tokens(tokens, src.begin, src.end, replacement);
    result.parse = splice_span(parse, src.begin, src.end, 1);
    result.src_span = src;
    result.out_span = Span{src.begin, src.begin + 1};
    detail::repair_sentence_start(result);
    return result;
  }

  std::vector<std::size_t> perturbable;
  for (std::size_t c = 0; c < claim_numbers.size(); ++c) {
    const Span s = claim_numbers[c].span;
    if (s.size() == 1 && lex::is_integer_token(tokens[s.begin])) {
      perturbable.push_back(c);
    }
  }
  if (perturbable.empty()) return std::nullopt;
  const Span src = claim_numbers[perturbable[rng.bounded(perturbable.size())]].span;
  const long long value = *detail::numeric_value(tokens[src.begin]);
  std::vector<long long> options;
  for (long long d = -10; d <= 10; ++d) {
    if (d != 0 && value + d >= 1) options.push_back(value + d);
  }
  if (options.empty()) return std::nullopt;
  const long long chosen = options[rng.bounded(options.size())];

  TransformResult result;
  result.tokens = detail::splice_tokens(tokens, src.begin, src.end,
                                        {std::to_string(chosen)});
  result.parse = splice_span(parse, src.begin, src.end, 1);
  result.src_span = src;
  result.out_span = Span{src.begin, src.begin + 1};
  return result;
}

// Replaces one pronoun with a different member of its grammatical class,
// uniform over (position, replacement) pairs.
inline std::optional<TransformResult> apply_pronoun_swap(
    const std::vector<std::string>& tokens, const DependencyParse& parse,
    const std::vector<PronounSite>& sites, Rng& rng) {
  std::vector<std::pair<std::size_t, std::string>> candidates;
  for (const PronounSite& site : sites) {
    auto cls = lex::pronoun_classes().find(site.category);
    if (cls == lex::pronoun_classes().end()) continue;
    const std::string original = lex::lower(tokens[site.index]);
    for (const std::string& member : cls->second) {
      if (member != original) candidates.emplace_back(site.index, member);
    }
  }
  if (candidates.empty()) return std::nullopt;
  const auto [pos, replacement] = candidates[rng.bounded(candidates.size())];

  TransformResult result;
  result.tokens = tokens;
  result.tokens[pos] = replacement;
  result.parse = parse;
  result.src_span = Span{pos, pos + 1};
  result.out_span = Span{pos, pos + 1};
  detail::repair_sentence_start(result);
  return result;
}

// Inserts "not" after an auxiliary, or removes an existing negation token.
// With do_support enabled, a bare third-person-singular main verb at the
// parse root is rewritten as "does not" + stem.
inline std::optional<TransformResult> apply_negation(
    const std::vector<std::string>& tokens, const DependencyParse& parse,
    Rng& rng, bool do_support = false) {
  std::vector<std::size_t> negation_positions;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (lex::negations().count(lex::lower(tokens[i]))) negation_positions.push_back(i);
  }
  if (!negation_positions.empty()) {
    const std::size_t pos = negation_positions[rng.bounded(negation_positions.size())];
    if (tokens.size() < 2) return std::nullopt;
    TransformResult result;
    result.tokens = tokens;
    result.tokens.erase(result.tokens.begin() + static_cast<std::ptrdiff_t>(pos));
    result.parse = erase_token(parse, pos);
    const std::size_t anchor = pos == 0 ? 0 : pos - 1;
    result.out_span = Span{anchor, anchor + 1};
    result.src_span = Span{anchor, anchor + 2};
    detail::repair_sentence_start(result);
    return result;
  }

  std::vector<std::size_t> aux_positions;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (lex::auxiliaries().count(lex::lower(tokens[i]))) aux_positions.push_back(i);
  }
  if (!aux_positions.empty()) {
    const std::size_t pos = aux_positions[rng.bounded(aux_positions.size())];
    TransformResult result;
    result.tokens = tokens;
    result.tokens.insert(result.tokens.begin() + static_cast<std::ptrdiff_t>(pos) + 1, "not");
    result.parse = insert_tokens(parse, pos + 1, 1, pos, "neg");
    result.out_span = Span{pos + 1, pos + 2};
    result.src_span = Span{pos + 1, pos + 1};
    return result;
  }

  if (do_support && parse.representation == ParseRepr::Basic) {
    const std::size_t root = parse_root(parse);
    const std::string& verb = tokens[root];
    std::string stem;
    if (verb.size() > 3 && verb.ends_with("ies")) {
      stem = verb.substr(0, verb.size() - 3) + "y";
    } else if (verb.size() > 1 && verb.ends_with("s") && !verb.ends_with("ss")) {
      stem = verb.substr(0, verb.size() - 1);
    } else {
      return std::nullopt;
    }
    TransformResult result;
    result.tokens = detail::splice_tokens(tokens, root, root + 1, {"does", "not", stem});
    result.parse = splice_span(parse, root, root + 1, 3, "aux");
    result.src_span = Span{root, root + 1};
    result.out_span = Span{root, root + 3};
    detail::repair_sentence_start(result);
    return result;
  }
  return std::nullopt;
}

// Label-preserving noise: each token is independently duplicated or deleted
// with probability rate. Noise positions are bookkeeping metadata, not
// factuality errors, so they are never reflected in word masks.
struct NoiseResult {
  std::vector<std::string> tokens;
  DependencyParse parse;
  // origin[j] = source index of new token j (duplicates repeat their source)
  std::vector<std::size_t> origin;
  std::string ops;  // "dup@new_idx" / "del@old_idx", comma separated
  std::size_t op_count = 0;
};

inline NoiseResult apply_noise(const std::vector<std::string>& tokens,
                               const DependencyParse& parse, Rng& rng,
                               double rate, bool duplication_only = false,
                               const WordMask* protect = nullptr) {
  if (rate < 0.0 || rate > 1.0) {
    throw ValidationError("noise rate must lie in [0, 1]");
  }
  enum class Op { None, Dup, Del };
  std::vector<Op> ops(tokens.size(), Op::None);
  std::size_t deletions = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!rng.bernoulli(rate)) continue;
    bool dup = duplication_only || rng.bernoulli(0.5);
    const bool protected_token = protect != nullptr && (*protect)[i] != 0;
    if (!dup && (protected_token || deletions + 1 == tokens.size())) {
      dup = true;  // never delete an error token or the whole sentence
    }
    ops[i] = dup ? Op::Dup : Op::Del;
    if (!dup) ++deletions;
  }

  NoiseResult result;
  result.tokens = tokens;
  result.parse = parse;
  // Apply right-to-left so pending indices stay valid.
  for (std::size_t k = tokens.size(); k-- > 0;) {
    if (ops[k] == Op::Del) {
      result.tokens.erase(result.tokens.begin() + static_cast<std::ptrdiff_t>(k));
      result.parse = erase_token(result.parse, k);
    } else if (ops[k] == Op::Dup) {
      result.tokens.insert(result.tokens.begin() + static_cast<std::ptrdiff_t>(k) + 1,
                           tokens[k]);
      result.parse = insert_tokens(result.parse, k + 1, 1, k, "dep");
    }
  }
  std::size_t new_idx = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    switch (ops[i]) {
      case Op::Del:
        result.ops += (result.ops.empty() ? "" : ",");
        result.ops += "del@" + std::to_string(i);
        ++result.op_count;
        break;
      case Op::Dup:
        result.origin.push_back(i);
        ++new_idx;
        result.origin.push_back(i);
        result.ops += (result.ops.empty() ? "" : ",");
        result.ops += "dup@" + std::to_string(new_idx);
        ++new_idx;
        ++result.op_count;
        break;
      case Op::None:
        result.origin.push_back(i);
        ++new_idx;
        break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Corpus-level generation

struct EntcConfig {
  std::set<TransformKind> transforms = {
      TransformKind::Paraphrase,     TransformKind::EntitySwap,
      TransformKind::NumberSwap,     TransformKind::PronounSwap,
      TransformKind::SentenceNegation, TransformKind::NoiseInjection};
  double noise_rate = 0.05;
  bool noise_duplication_only = false;
  bool noise_on_negatives = false;
  std::size_t per_claim = 0;  // cap on negatives per claim; 0 = no cap
  int paraphrase_rank = 2;    // near-top beam entry, meaning-preserving
  std::string ratio = "1:1";  // positive:negative balance, "none" to disable
  bool negation_do_support = false;
};

struct EntcStats {
  std::map<std::string, std::size_t> emitted;
  std::map<std::string, std::size_t> skipped;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t balance_dropped = 0;
};

struct EntcResult {
  std::vector<AnnotatedExample> examples;
  EntcStats stats;
  std::vector<std::string> log;
};

namespace detail {

inline std::string span_to_string(Span s) {
  return std::to_string(s.begin) + ":" + std::to_string(s.end);
}

inline std::optional<ErrorTag> entc_error_tag(TransformKind kind, Span out_span,
                                              bool replacement_from_document) {
  switch (kind) {
    case TransformKind::EntitySwap:
      return ErrorTag{ErrorCategory::EntityRelated, Orientation::Intrinsic, out_span};
    case TransformKind::NumberSwap:
      return ErrorTag{ErrorCategory::EntityRelated,
                      replacement_from_document ? Orientation::Intrinsic
                                                : Orientation::Extrinsic,
                      out_span};
    case TransformKind::PronounSwap:
    case TransformKind::SentenceNegation:
      return ErrorTag{ErrorCategory::EventRelated, Orientation::Intrinsic, out_span};
    default:
      return std::nullopt;
  }
}

inline std::pair<std::size_t, std::size_t> parse_ratio(const std::string& ratio) {
  const auto colon = ratio.find(':');
  if (colon == std::string::npos) {
    throw ConfigError("ratio must look like '1:1' or be 'none'");
  }
  try {
    const auto pos = std::stoull(ratio.substr(0, colon));
    const auto neg = std::stoull(ratio.substr(colon + 1));
    if (pos == 0 || neg == 0) throw ConfigError("ratio parts must be positive");
    return {pos, neg};
  } catch (const std::invalid_argument&) {
    throw ConfigError("ratio must look like '1:1' or be 'none'");
  }
}

}  // namespace detail

inline EntcResult generate_entc(const std::vector<AnnotatedExample>& corpus,
                                const SpanTagger& tagger,
                                const ParaphraseProvider* paraphraser,
                                const EntcConfig& config, std::uint64_t seed) {
  EntcResult result;
  auto log_skip = [&](const std::string& id, TransformKind kind,
                      const std::string& reason) {
    ++result.stats.skipped[to_string(kind)];
    result.log.push_back(id + ": " + to_string(kind) + " skipped (" + reason + ")");
  };

  for (const AnnotatedExample& claim : corpus) {
    const auto& tokens = claim.summary.tokens;
    const auto& parse = claim.summary.parse;

    auto base_meta = claim.document.meta;
    auto make_example = [&](const std::string& suffix,
                            std::vector<std::string> out_tokens,
                            DependencyParse out_parse, FactLabelSet labels,
                            std::map<std::string, std::string> extra_meta,
                            std::optional<std::vector<ErrorTag>> tags) {
      AnnotatedExample ex;
      ex.id = claim.id + "#" + suffix;
      auto meta = base_meta;
      for (auto& [k, v] : extra_meta) meta[k] = std::move(v);
      ex.document = Document::from_tokens(claim.document.id,
                                          claim.document.tokens, std::move(meta));
      ex.summary.id = ex.id;
      ex.summary.tokens = std::move(out_tokens);
      ex.summary.parse = std::move(out_parse);
      ex.labels = std::move(labels);
      ex.error_tags = std::move(tags);
      return ex;
    };
    auto factual_labels = [&](const DependencyParse& p) {
      FactLabelSet labels;
      labels.sentence_label = Label::Factual;
      labels.word_mask = WordMask(p.token_count, 0);
      labels.arc_labels = std::vector<Label>(p.arcs.size(), Label::Factual);
      labels.provenance = Provenance::EntC;
      return labels;
    };

    // Untransformed positive.
    result.examples.push_back(make_example("orig", tokens, parse,
                                           factual_labels(parse),
                                           {{"transform", "original"}}, {}));
    ++result.stats.emitted["original"];

    if (config.transforms.count(TransformKind::Paraphrase) && paraphraser != nullptr) {
      auto para = paraphraser->paraphrase(tokens, config.paraphrase_rank);
      bool aligned = para.has_value() && para->tokens.size() == tokens.size();
      if (aligned) {
        for (std::size_t i = 0; i < para->alignment.size(); ++i) {
          aligned = aligned && para->alignment[i] == i;
        }
      }
      if (aligned) {
        result.examples.push_back(make_example(
            "para", para->tokens, parse, factual_labels(parse),
            {{"transform", "paraphrase"},
             {"paraphrase_rank", std::to_string(config.paraphrase_rank)}},
            {}));
        ++result.stats.emitted["paraphrase"];
      } else {
        log_skip(claim.id, TransformKind::Paraphrase,
                 para ? "no token-aligned paraphrase" : "provider returned none");
      }
    }

    // Negative transformations, fixed order; each gets its own child RNG so
    // corpus order and transform selection never perturb one another.
    std::vector<AnnotatedExample> negatives;
    const TransformKind negative_kinds[] = {
        TransformKind::EntitySwap, TransformKind::NumberSwap,
        TransformKind::PronounSwap, TransformKind::SentenceNegation};
    for (TransformKind kind : negative_kinds) {
      if (!config.transforms.count(kind)) continue;
      Rng rng = Rng::child(seed, claim.id, to_string(kind));
      std::optional<TransformResult> applied;
      bool from_document = true;
      switch (kind) {
        case TransformKind::EntitySwap:
          applied = apply_entity_swap(tokens, parse, tagger.entities(tokens),
                                      claim.document.tokens,
                                      tagger.entities(claim.document.tokens), rng);
          break;
        case TransformKind::NumberSwap: {
          const auto claim_numbers = tagger.numbers(tokens);
          const auto doc_numbers = tagger.numbers(claim.document.tokens);
          applied = apply_number_swap(tokens, parse, claim_numbers,
                                      claim.document.tokens, doc_numbers, rng);
          if (applied) {
            from_document = false;
            for (const TypedSpan& d : doc_numbers) {
              if (lex::lower(claim.document.tokens[d.span.begin]) ==
                  lex::lower(applied->tokens[applied->out_span.begin])) {
                from_document = true;
              }
            }
          }
          break;
        }
        case TransformKind::PronounSwap:
          applied = apply_pronoun_swap(tokens, parse, tagger.pronouns(tokens), rng);
          break;
        case TransformKind::SentenceNegation:
          applied = apply_negation(tokens, parse, rng, config.negation_do_support);
          break;
        default:
          break;
      }
      if (!applied) {
        log_skip(claim.id, kind, "no applicable sites");
        continue;
      }

      FactLabelSet labels;
      labels.sentence_label = Label::NonFactual;
      WordMask mask(applied->parse.token_count, 0);
      for (std::size_t i = applied->out_span.begin; i < applied->out_span.end; ++i) {
        mask[i] = 1;
      }
      labels.arc_labels = words_to_arcs(applied->parse, mask);
      labels.word_mask = std::move(mask);
      labels.provenance = Provenance::EntC;

      std::optional<std::vector<ErrorTag>> tags;
      if (auto tag = detail::entc_error_tag(kind, applied->out_span, from_document)) {
        tags = std::vector<ErrorTag>{*tag};
      }
      negatives.push_back(make_example(
          to_string(kind), applied->tokens, applied->parse, std::move(labels),
          {{"transform", to_string(kind)},
           {"src_span", detail::span_to_string(applied->src_span)},
           {"out_span", detail::span_to_string(applied->out_span)}},
          std::move(tags)));
    }

    if (config.per_claim > 0 && negatives.size() > config.per_claim) {
      Rng rng = Rng::child(seed, claim.id, "cap");
      std::vector<std::size_t> keep(negatives.size());
      for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i;
      rng.shuffle(keep);
      keep.resize(config.per_claim);
      std::sort(keep.begin(), keep.end());
      std::vector<AnnotatedExample> capped;
      for (std::size_t i : keep) capped.push_back(std::move(negatives[i]));
      negatives = std::move(capped);
    }
    for (auto& neg : negatives) {
      ++result.stats.emitted[neg.document.meta.at("transform")];
      result.examples.push_back(std::move(neg));
    }
    negatives.clear();

    if (config.transforms.count(TransformKind::NoiseInjection)) {
      Rng rng = Rng::child(seed, claim.id, "noise");
      NoiseResult noisy = apply_noise(tokens, parse, rng, config.noise_rate,
                                      config.noise_duplication_only);
      if (noisy.op_count > 0) {
        result.examples.push_back(make_example(
            "noise", noisy.tokens, noisy.parse, factual_labels(noisy.parse),
            {{"transform", "noise"}, {"noise_ops", noisy.ops}}, {}));
        ++result.stats.emitted["noise"];
      } else {
        log_skip(claim.id, TransformKind::NoiseInjection, "no tokens hit at rate " +
                                                              std::to_string(config.noise_rate));
      }
      if (config.noise_on_negatives) {
        // Noisy twins of this claim's negatives, masks remapped through the
        // edit; error tokens are protected from deletion.
        std::vector<std::size_t> negative_indices;
        for (std::size_t i = 0; i < result.examples.size(); ++i) {
          const AnnotatedExample& ex = result.examples[i];
          if (ex.document.meta.count("out_span") != 0 &&
              ex.id.rfind(claim.id + "#", 0) == 0) {
            negative_indices.push_back(i);
          }
        }
        std::size_t twin = 0;
        for (std::size_t i : negative_indices) {
          const AnnotatedExample ex = result.examples[i];
          Rng twin_rng = Rng::child(seed, ex.id, "noise");
          NoiseResult n = apply_noise(ex.summary.tokens, ex.summary.parse, twin_rng,
                                      config.noise_rate, config.noise_duplication_only,
                                      &*ex.labels.word_mask);
          if (n.op_count == 0) continue;
          WordMask mask(n.tokens.size(), 0);
          for (std::size_t j = 0; j < n.origin.size(); ++j) {
            mask[j] = (*ex.labels.word_mask)[n.origin[j]];
          }
          FactLabelSet labels;
          labels.sentence_label = Label::NonFactual;
          labels.arc_labels = words_to_arcs(n.parse, mask);
          labels.word_mask = std::move(mask);
          labels.provenance = Provenance::EntC;
          result.examples.push_back(make_example(
              "noise" + std::to_string(++twin), n.tokens, n.parse, std::move(labels),
              {{"transform", "noise"},
               {"noise_ops", n.ops},
               {"noise_base", ex.id}},
              {}));
          ++result.stats.emitted["noise"];
        }
      }
    }
  }

  for (const AnnotatedExample& ex : result.examples) {
    if (ex.labels.sentence_label == Label::Factual) {
      ++result.stats.positives;
    } else {
      ++result.stats.negatives;
    }
  }

  if (config.ratio != "none") {
    const auto [rp, rn] = detail::parse_ratio(config.ratio);
    const std::size_t pos = result.stats.positives;
    const std::size_t neg = result.stats.negatives;
    std::size_t keep_pos = pos;
    std::size_t keep_neg = neg;
    if (pos * rn > neg * rp) {
      keep_pos = neg * rp / rn;
    } else {
      keep_neg = pos * rn / rp;
    }
    if (keep_pos < pos || keep_neg < neg) {
      Rng rng = Rng::child(seed, "balance");
      std::vector<std::size_t> pos_idx, neg_idx;
      for (std::size_t i = 0; i < result.examples.size(); ++i) {
        (result.examples[i].labels.sentence_label == Label::Factual ? pos_idx
                                                                    : neg_idx)
            .push_back(i);
      }
      rng.shuffle(pos_idx);
      rng.shuffle(neg_idx);
      pos_idx.resize(keep_pos);
      neg_idx.resize(keep_neg);
      std::vector<std::size_t> keep;
      keep.insert(keep.end(), pos_idx.begin(), pos_idx.end());
      keep.insert(keep.end(), neg_idx.begin(), neg_idx.end());
      std::sort(keep.begin(), keep.end());
      std::vector<AnnotatedExample> balanced;
      balanced.reserve(keep.size());
      for (std::size_t i : keep) balanced.push_back(std::move(result.examples[i]));
      result.stats.balance_dropped = result.examples.size() - balanced.size();
      result.examples = std::move(balanced);
      result.stats.positives = keep_pos;
      result.stats.negatives = keep_neg;
    }
  }
  return result;
}

}  // namespace factspan
