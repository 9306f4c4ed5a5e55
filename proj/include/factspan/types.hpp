#pragma once

// Domain types for factuality annotation over single-sentence summaries.
//
// Label polarity convention, used everywhere in the toolkit: NonFactual
// (serialized as 1, mask entry true) means erroneous content; Factual
// (serialized as 0, mask entry false) means supported content.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "factspan/error.hpp"

namespace factspan {

enum class Label : std::uint8_t { Factual = 0, NonFactual = 1 };

enum class Provenance : std::uint8_t { EntC, GenC, Human, ModelPrediction };

enum class ParseRepr : std::uint8_t { Basic, Collapsed };

enum class ErrorCategory : std::uint8_t {
  EntityRelated,
  EventRelated,
  NounPhraseRelated,
  Other,
};

enum class Orientation : std::uint8_t { Intrinsic, Extrinsic, NotApplicable };

// Word mask aligned with summary tokens; nonzero = non-factual word.
using WordMask = std::vector<std::uint8_t>;

// Half-open token index range [begin, end).
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
  bool operator==(const Span&) const = default;
};

struct Arc {
  std::size_t head_index = 0;
  std::size_t child_index = 0;
  std::string relation;

  bool operator==(const Arc&) const = default;
};

struct DependencyParse {
  std::vector<Arc> arcs;
  std::size_t token_count = 0;
  ParseRepr representation = ParseRepr::Basic;

  bool operator==(const DependencyParse&) const = default;
};

struct Document {
  std::string id;
  std::string text;  // normalized: tokens joined with single spaces
  std::vector<std::string> tokens;
  std::map<std::string, std::string> meta;

  static Document from_tokens(std::string id, std::vector<std::string> tokens,
                              std::map<std::string, std::string> meta = {}) {
    Document d;
    d.id = std::move(id);
    d.tokens = std::move(tokens);
    d.meta = std::move(meta);
    std::string text;
    for (const auto& t : d.tokens) {
      if (!text.empty()) text += ' ';
      text += t;
    }
    d.text = std::move(text);
    return d;
  }

  bool operator==(const Document&) const = default;
};

struct SummarySentence {
  std::string id;
  std::vector<std::string> tokens;
  DependencyParse parse;

  bool operator==(const SummarySentence&) const = default;
};

struct ErrorTag {
  ErrorCategory category = ErrorCategory::Other;
  Orientation orientation = Orientation::NotApplicable;
  Span span;

  bool operator==(const ErrorTag&) const = default;
};

struct FactLabelSet {
  Label sentence_label = Label::Factual;
  std::optional<WordMask> word_mask;
  std::optional<std::vector<Label>> arc_labels;
  Provenance provenance = Provenance::Human;

  bool operator==(const FactLabelSet&) const = default;
};

struct AnnotatedExample {
  std::string id;
  Document document;
  SummarySentence summary;
  FactLabelSet labels;
  std::optional<std::vector<ErrorTag>> error_tags;

  bool operator==(const AnnotatedExample&) const = default;
};

// ---------------------------------------------------------------------------
// Validation

namespace detail {

inline std::string where(const std::string& id) {
  return id.empty() ? std::string() : " (example id=" + id + ")";
}

}  // namespace detail

// Checks index bounds, self-loops, duplicate triples, and, for the basic
// representation, that the arcs form a tree rooted at a single token.
inline void validate_parse(const DependencyParse& parse,
                           const std::string& context_id = "") {
  const std::string at = detail::where(context_id);
  if (parse.token_count == 0) {
    throw ValidationError("parse: token_count must be positive" + at);
  }
  std::set<std::tuple<std::size_t, std::size_t, std::string>> seen;
  for (const Arc& a : parse.arcs) {
    if (a.head_index >= parse.token_count || a.child_index >= parse.token_count) {
      throw ValidationError("arcs: index out of range [0, " +
                            std::to_string(parse.token_count) + ")" + at);
    }
    if (a.head_index == a.child_index) {
      throw ValidationError("arcs: head_index equals child_index (" +
                            std::to_string(a.head_index) + ")" + at);
    }
    if (!seen.insert({a.head_index, a.child_index, a.relation}).second) {
      throw ValidationError("arcs: duplicate (head, child, relation) triple" + at);
    }
  }
  if (parse.representation == ParseRepr::Basic) {
    if (parse.arcs.size() + 1 != parse.token_count) {
      throw ValidationError(
          "arcs: basic parse of n tokens must have n-1 arcs, got " +
          std::to_string(parse.arcs.size()) + at);
    }
    std::vector<std::ptrdiff_t> head(parse.token_count, -1);
    for (const Arc& a : parse.arcs) {
      if (head[a.child_index] != -1) {
        throw ValidationError("arcs: token " + std::to_string(a.child_index) +
                              " has multiple heads" + at);
      }
      head[a.child_index] = static_cast<std::ptrdiff_t>(a.head_index);
    }
    // With n-1 arcs and unique heads exactly one token is left headless;
    // walking up from every token must reach it without revisiting.
    for (std::size_t start = 0; start < parse.token_count; ++start) {
      std::size_t cur = start;
      std::size_t hops = 0;
      while (head[cur] != -1) {
        cur = static_cast<std::size_t>(head[cur]);
        if (++hops > parse.token_count) {
          throw ValidationError("arcs: cycle detected in basic parse" + at);
        }
      }
    }
  }
}

inline void validate_labels(const FactLabelSet& labels,
                            const DependencyParse& parse,
                            const std::string& context_id = "") {
  const std::string at = detail::where(context_id);
  if (labels.word_mask) {
    if (labels.word_mask->size() != parse.token_count) {
      throw ValidationError(
          "word_mask: length " + std::to_string(labels.word_mask->size()) +
          " != token_count " + std::to_string(parse.token_count) + at);
    }
  }
  if (labels.arc_labels) {
    if (labels.arc_labels->size() != parse.arcs.size()) {
      throw ValidationError(
          "arc_labels: length " + std::to_string(labels.arc_labels->size()) +
          " != arc count " + std::to_string(parse.arcs.size()) + at);
    }
  }
  bool any_word = false;
  if (labels.word_mask) {
    for (auto m : *labels.word_mask) any_word = any_word || m != 0;
  }
  bool any_arc = false;
  if (labels.arc_labels) {
    for (Label l : *labels.arc_labels) any_arc = any_arc || l == Label::NonFactual;
  }
  if (labels.sentence_label == Label::Factual) {
    if (any_word) {
      throw ValidationError(
          "word_mask: non-factual words under a Factual sentence label" + at);
    }
    if (any_arc) {
      throw ValidationError(
          "arc_labels: non-factual arcs under a Factual sentence label" + at);
    }
  } else {
    if (labels.word_mask && !any_word) {
      throw ValidationError(
          "word_mask: NonFactual sentence requires at least one marked word" + at);
    }
  }
  if (any_arc && labels.sentence_label != Label::NonFactual) {
    throw ValidationError(
        "sentence_label: must be NonFactual when any arc is NonFactual" + at);
  }
}

inline void validate_example(const AnnotatedExample& ex) {
  const std::string at = detail::where(ex.id);
  if (ex.document.tokens.empty()) {
    throw ValidationError("doc_tokens: must be non-empty" + at);
  }
  if (ex.summary.tokens.empty()) {
    throw ValidationError("sum_tokens: must be non-empty" + at);
  }
  if (ex.summary.parse.token_count != ex.summary.tokens.size()) {
    throw ValidationError(
        "parse: token_count " + std::to_string(ex.summary.parse.token_count) +
        " != summary token count " + std::to_string(ex.summary.tokens.size()) + at);
  }
  validate_parse(ex.summary.parse, ex.id);
  validate_labels(ex.labels, ex.summary.parse, ex.id);
  if (ex.error_tags) {
    for (const ErrorTag& tag : *ex.error_tags) {
      if (tag.span.begin >= tag.span.end ||
          tag.span.end > ex.summary.tokens.size()) {
        throw ValidationError("error_tags: span out of range" + at);
      }
      if (tag.category == ErrorCategory::Other &&
          tag.orientation != Orientation::NotApplicable) {
        throw ValidationError(
            "error_tags: Other category requires NotApplicable orientation" + at);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Enum <-> string names (shared by serialization and the CLI)

inline const char* to_string(Label l) {
  return l == Label::Factual ? "factual" : "non_factual";
}

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::EntC: return "entc";
    case Provenance::GenC: return "genc";
    case Provenance::Human: return "human";
    case Provenance::ModelPrediction: return "pred";
  }
  return "human";
}

inline Provenance provenance_from_string(const std::string& s) {
  if (s == "entc") return Provenance::EntC;
  if (s == "genc") return Provenance::GenC;
  if (s == "human") return Provenance::Human;
  if (s == "pred") return Provenance::ModelPrediction;
  throw ParseError("unknown provenance '" + s + "'");
}

inline const char* to_string(ParseRepr r) {
  return r == ParseRepr::Basic ? "basic" : "collapsed";
}

inline ParseRepr parse_repr_from_string(const std::string& s) {
  if (s == "basic") return ParseRepr::Basic;
  if (s == "collapsed") return ParseRepr::Collapsed;
  throw ParseError("unknown parse_repr '" + s + "'");
}

inline const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::EntityRelated: return "entity";
    case ErrorCategory::EventRelated: return "event";
    case ErrorCategory::NounPhraseRelated: return "noun_phrase";
    case ErrorCategory::Other: return "other";
  }
  return "other";
}

inline ErrorCategory error_category_from_string(const std::string& s) {
  if (s == "entity") return ErrorCategory::EntityRelated;
  if (s == "event") return ErrorCategory::EventRelated;
  if (s == "noun_phrase") return ErrorCategory::NounPhraseRelated;
  if (s == "other") return ErrorCategory::Other;
  throw ParseError("unknown error category '" + s + "'");
}

inline const char* to_string(Orientation o) {
  switch (o) {
    case Orientation::Intrinsic: return "intrinsic";
    case Orientation::Extrinsic: return "extrinsic";
    case Orientation::NotApplicable: return "na";
  }
  return "na";
}

inline Orientation orientation_from_string(const std::string& s) {
  if (s == "intrinsic") return Orientation::Intrinsic;
  if (s == "extrinsic") return Orientation::Extrinsic;
  if (s == "na") return Orientation::NotApplicable;
  throw ParseError("unknown orientation '" + s + "'");
}

}  // namespace factspan
