#pragma once

// Pluggable providers: span tagging, paraphrase generation, and parsing.
// The toolkit never tokenizes or parses by itself; it consumes pretokenized
// text and parses through these interfaces. Deterministic rule-based mocks
// ship for hermetic tests and desk-scale runs; real systems are wrapped
// behind the same contracts.

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "factspan/error.hpp"
#include "factspan/rng.hpp"
#include "factspan/types.hpp"

namespace factspan {

// Token index range with a type label ("PERSON", "GPE", "NUM", ...).
struct TypedSpan {
  Span span;
  std::string type;
};

// subject / object / possessive / reflexive
struct PronounSite {
  std::size_t index = 0;
  std::string category;
};

class SpanTagger {
 public:
  virtual ~SpanTagger() = default;
  virtual std::vector<TypedSpan> entities(const std::vector<std::string>& tokens) const = 0;
  virtual std::vector<TypedSpan> numbers(const std::vector<std::string>& tokens) const = 0;
  virtual std::vector<PronounSite> pronouns(const std::vector<std::string>& tokens) const = 0;
};

struct ParaphraseResult {
  std::vector<std::string> tokens;
  // alignment[i] = source token index of paraphrase token i, or nullopt for
  // novel tokens.
  std::vector<std::optional<std::size_t>> alignment;
};

class ParaphraseProvider {
 public:
  virtual ~ParaphraseProvider() = default;
  // Returns the rank-th best paraphrase, or nullopt past the beam. Rank 1
  // must return a result whenever any result exists.
  virtual std::optional<ParaphraseResult> paraphrase(
      const std::vector<std::string>& tokens, int rank) const = 0;
};

class ParserProvider {
 public:
  virtual ~ParserProvider() = default;
  virtual DependencyParse parse(const std::vector<std::string>& tokens) const = 0;
};

namespace lex {

inline std::string lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

inline bool is_capitalized(const std::string& s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

inline bool is_integer_token(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

inline const std::map<std::string, std::string>& pronoun_table() {
  static const std::map<std::string, std::string> table = {
      {"i", "subject"},       {"he", "subject"},      {"she", "subject"},
      {"we", "subject"},      {"they", "subject"},    {"you", "subject"},
      {"it", "subject"},      {"me", "object"},       {"him", "object"},
      {"her", "object"},      {"us", "object"},       {"them", "object"},
      {"my", "possessive"},   {"your", "possessive"}, {"his", "possessive"},
      {"its", "possessive"},  {"our", "possessive"},  {"their", "possessive"},
      {"hers", "possessive"}, {"theirs", "possessive"},
      {"myself", "reflexive"},    {"yourself", "reflexive"},
      {"himself", "reflexive"},   {"herself", "reflexive"},
      {"itself", "reflexive"},    {"ourselves", "reflexive"},
      {"themselves", "reflexive"}};
  return table;
}

inline const std::map<std::string, std::vector<std::string>>& pronoun_classes() {
  static const std::map<std::string, std::vector<std::string>> classes = {
      {"subject", {"i", "he", "she", "we", "they", "you", "it"}},
      {"object", {"me", "him", "her", "us", "them"}},
      {"possessive", {"my", "your", "his", "her", "its", "our", "their"}},
      {"reflexive",
       {"myself", "yourself", "himself", "herself", "itself", "ourselves",
        "themselves"}}};
  return classes;
}

inline const std::set<std::string>& auxiliaries() {
  static const std::set<std::string> words = {
      "is",   "are",  "was",  "were", "am",    "be",   "been", "being",
      "has",  "have", "had",  "do",   "does",  "did",  "will", "would",
      "can",  "could", "shall", "should", "may", "might", "must"};
  return words;
}

inline const std::set<std::string>& negations() {
  static const std::set<std::string> words = {"not", "n't", "never"};
  return words;
}

inline const std::map<std::string, int>& number_words() {
  static const std::map<std::string, int> words = {
      {"zero", 0}, {"one", 1},   {"two", 2},   {"three", 3}, {"four", 4},
      {"five", 5}, {"six", 6},   {"seven", 7}, {"eight", 8}, {"nine", 9},
      {"ten", 10}, {"eleven", 11}, {"twelve", 12}, {"twenty", 20},
      {"thirty", 30}, {"forty", 40}, {"fifty", 50}, {"hundred", 100}};
  return words;
}

inline const std::set<std::string>& weekdays_and_months() {
  static const std::set<std::string> words = {
      "monday",  "tuesday", "wednesday", "thursday", "friday",  "saturday",
      "sunday",  "january", "february",  "march",    "april",   "may",
      "june",    "july",    "august",    "september", "october", "november",
      "december"};
  return words;
}

}  // namespace lex

// ---------------------------------------------------------------------------
// Mock span tagger ("lexicon"): capitalized runs typed by small gazetteers,
// digit/number-word tokens, and a fixed pronoun table.

class LexiconSpanTagger final : public SpanTagger {
 public:
  std::vector<TypedSpan> entities(const std::vector<std::string>& tokens) const override {
    std::vector<TypedSpan> spans;
    std::size_t i = 0;
    while (i < tokens.size()) {
      if (!candidate(tokens, i)) {
        ++i;
        continue;
      }
      std::size_t j = i + 1;
      while (j < tokens.size() && lex::is_capitalized(tokens[j])) ++j;
      spans.push_back(TypedSpan{Span{i, j}, entity_type(tokens, i, j)});
      i = j;
    }
    return spans;
  }

  std::vector<TypedSpan> numbers(const std::vector<std::string>& tokens) const override {
    std::vector<TypedSpan> spans;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const std::string low = lex::lower(tokens[i]);
      if (lex::is_integer_token(tokens[i]) || lex::number_words().count(low)) {
        spans.push_back(TypedSpan{Span{i, i + 1}, "NUM"});
      } else if (lex::weekdays_and_months().count(low)) {
        spans.push_back(TypedSpan{Span{i, i + 1}, "DATE"});
      }
    }
    return spans;
  }

  std::vector<PronounSite> pronouns(const std::vector<std::string>& tokens) const override {
    std::vector<PronounSite> sites;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      auto it = lex::pronoun_table().find(lex::lower(tokens[i]));
      if (it != lex::pronoun_table().end()) {
        sites.push_back(PronounSite{i, it->second});
      }
    }
    return sites;
  }

 private:
  // Sentence-initial capitalized words are entities only when gazetteered,
  // so determiners and ordinary sentence starts are not tagged.
  bool candidate(const std::vector<std::string>& tokens, std::size_t i) const {
    if (!lex::is_capitalized(tokens[i])) return false;
    if (i > 0) return true;
    const std::string low = lex::lower(tokens[i]);
    return persons().count(low) || places().count(low) || orgs().count(low);
  }

  std::string entity_type(const std::vector<std::string>& tokens, std::size_t i,
                          std::size_t j) const {
    std::string phrase;
    for (std::size_t k = i; k < j; ++k) {
      if (!phrase.empty()) phrase += ' ';
      phrase += lex::lower(tokens[k]);
    }
    if (places().count(phrase) || places().count(lex::lower(tokens[j - 1]))) {
      return "GPE";
    }
    if (persons().count(phrase) || persons().count(lex::lower(tokens[j - 1]))) {
      return "PERSON";
    }
    if (orgs().count(phrase) || orgs().count(lex::lower(tokens[j - 1]))) {
      return "ORG";
    }
    return "ENT";
  }

  static const std::set<std::string>& persons() {
    static const std::set<std::string> names = {
        "smith", "jones", "johnson", "williams", "davis",  "miller",
        "wilson", "maria", "james",  "sarah",    "robert", "emma"};
    return names;
  }
  static const std::set<std::string>& places() {
    static const std::set<std::string> names = {
        "norfolk", "ohio",     "london",      "paris",     "texas",
        "berlin",  "new york", "los angeles", "new jersey", "cardiff",
        "bristol", "wales"};
    return names;
  }
  static const std::set<std::string>& orgs() {
    static const std::set<std::string> names = {"bbc", "nasa", "unesco",
                                                "interpol"};
    return names;
  }
};

// ---------------------------------------------------------------------------
// Mock paraphrase provider ("synonym"): a pure function of (tokens, rank).
// Rank 1 is the identity; higher ranks substitute more synonyms; ranks at
// the bottom of the beam additionally insert a novel (unaligned) token,
// mimicking beam-bottom hallucination. Returns nullopt past the beam width.

class SynonymParaphraser final : public ParaphraseProvider {
 public:
  static constexpr int kBeamWidth = 12;
  static constexpr int kHallucinationRank = 8;

  std::optional<ParaphraseResult> paraphrase(
      const std::vector<std::string>& tokens, int rank) const override {
    if (rank < 1 || rank > kBeamWidth) return std::nullopt;
    ParaphraseResult result;
    result.tokens = tokens;
    result.alignment.resize(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) result.alignment[i] = i;

    std::size_t substitutions = static_cast<std::size_t>(rank - 1);
    for (std::size_t i = 0; i < result.tokens.size() && substitutions > 0; ++i) {
      auto it = synonyms().find(lex::lower(result.tokens[i]));
      if (it == synonyms().end()) continue;
      result.tokens[i] = match_case(result.tokens[i], it->second);
      --substitutions;
    }

    if (rank >= kHallucinationRank) {
      const auto& extras = hallucinations();
      std::uint64_t h = fnv1a64_u64(static_cast<std::uint64_t>(rank),
                                    fnv1a64(join(tokens)));
      const std::string& extra = extras[h % extras.size()];
      const std::size_t pos = 1 + h / 7 % std::max<std::size_t>(tokens.size() - 1, 1);
      result.tokens.insert(result.tokens.begin() + static_cast<std::ptrdiff_t>(pos), extra);
      result.alignment.insert(result.alignment.begin() + static_cast<std::ptrdiff_t>(pos),
                              std::nullopt);
    }
    return result;
  }

 private:
  static std::string join(const std::vector<std::string>& tokens) {
    std::string s;
    for (const auto& t : tokens) {
      s += t;
      s += ' ';
    }
    return s;
  }

  static std::string match_case(const std::string& original,
                                const std::string& replacement) {
    if (!lex::is_capitalized(original) || replacement.empty()) return replacement;
    std::string out = replacement;
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out;
  }

  static const std::map<std::string, std::string>& synonyms() {
    static const std::map<std::string, std::string> table = {
        {"big", "large"},       {"small", "tiny"},      {"quick", "fast"},
        {"said", "stated"},     {"bought", "purchased"}, {"built", "constructed"},
        {"created", "made"},    {"started", "began"},   {"house", "home"},
        {"car", "automobile"},  {"movie", "film"},      {"child", "kid"},
        {"street", "road"},     {"author", "writer"},   {"doctor", "physician"},
        {"talked", "spoke"},    {"angry", "furious"},   {"happy", "glad"},
        {"rich", "wealthy"},    {"famous", "renowned"}, {"ended", "finished"},
        {"found", "discovered"}};
    return table;
  }

  static const std::vector<std::string>& hallucinations() {
    static const std::vector<std::string> words = {
        "reportedly", "allegedly", "gleaming", "controversial", "newly"};
    return words;
  }
};

// ---------------------------------------------------------------------------
// Mock parser ("chain"): token i attaches to token i-1; token 0 is the root.
// Adjacent-pair arcs keep the hermetic pipeline consistent with the mock
// encoder's bigram features.

class ChainParser final : public ParserProvider {
 public:
  DependencyParse parse(const std::vector<std::string>& tokens) const override {
    if (tokens.empty()) {
      throw ValidationError("parse: empty token list");
    }
    DependencyParse parse;
    parse.token_count = tokens.size();
    parse.representation = ParseRepr::Basic;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      parse.arcs.push_back(Arc{i - 1, i, "dep"});
    }
    return parse;
  }
};

// ---------------------------------------------------------------------------
// Registry: providers are selected by config key.

inline std::shared_ptr<SpanTagger> make_span_tagger(const std::string& key) {
  if (key == "lexicon") return std::make_shared<LexiconSpanTagger>();
  throw ConfigError("unknown span tagger '" + key + "' (available: lexicon)");
}

inline std::shared_ptr<ParaphraseProvider> make_paraphrase_provider(
    const std::string& key) {
  if (key == "synonym") return std::make_shared<SynonymParaphraser>();
  if (key == "none") return nullptr;
  throw ConfigError("unknown paraphrase provider '" + key +
                    "' (available: synonym, none)");
}

inline std::shared_ptr<ParserProvider> make_parser_provider(const std::string& key) {
  if (key == "chain") return std::make_shared<ChainParser>();
  throw ConfigError("unknown parser provider '" + key + "' (available: chain)");
}

}  // namespace factspan
