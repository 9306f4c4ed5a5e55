#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include <factspan/entc.hpp>
#include <factspan/jsonl.hpp>

#include "support/fixtures.hpp"

using namespace factspan;
using testsupport::TempDir;
using testsupport::tree_from_parents;

namespace {

AnnotatedExample claim_example(const std::string& id,
                               std::vector<std::string> doc_tokens,
                               std::vector<std::string> claim_tokens) {
  AnnotatedExample ex;
  ex.id = id;
  ex.document = Document::from_tokens(id + "-doc", std::move(doc_tokens));
  ex.summary.id = id;
  ex.summary.tokens = std::move(claim_tokens);
  ex.summary.parse = ChainParser().parse(ex.summary.tokens);
  ex.labels.sentence_label = Label::Factual;
  ex.labels.provenance = Provenance::Human;
  return ex;
}

// Output differs from the source exactly on the recorded spans.
void check_exact_diff(const std::vector<std::string>& source, Span src_span,
                      const std::vector<std::string>& output, Span out_span) {
  REQUIRE(out_span.end <= output.size());
  REQUIRE(src_span.end <= source.size());
  std::vector<std::string> src_rest, out_rest;
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (i < src_span.begin || i >= src_span.end) src_rest.push_back(source[i]);
  }
  for (std::size_t i = 0; i < output.size(); ++i) {
    if (i < out_span.begin || i >= out_span.end) out_rest.push_back(output[i]);
  }
  CHECK(src_rest == out_rest);
  const std::vector<std::string> src_in(source.begin() + static_cast<std::ptrdiff_t>(src_span.begin),
                                        source.begin() + static_cast<std::ptrdiff_t>(src_span.end));
  const std::vector<std::string> out_in(output.begin() + static_cast<std::ptrdiff_t>(out_span.begin),
                                        output.begin() + static_cast<std::ptrdiff_t>(out_span.end));
  CHECK(src_in != out_in);
}

Span span_from_meta(const AnnotatedExample& ex, const std::string& key) {
  const auto& value = ex.document.meta.at(key);
  const auto colon = value.find(':');
  return Span{std::stoul(value.substr(0, colon)), std::stoul(value.substr(colon + 1))};
}

}  // namespace

TEST_CASE("entity swap") {
  LexiconSpanTagger tagger;
  Rng rng(1);

  SECTION("claim place swapped for the document's place") {
    std::vector<std::string> claim = {"The", "mayor", "of", "Norfolk",
                                      "opened", "a", "bridge", "."};
    std::vector<std::string> doc = {"Officials", "in", "Ohio", "praised",
                                    "the", "mayor", "."};
    auto parse = ChainParser().parse(claim);
    auto out = apply_entity_swap(claim, parse, tagger.entities(claim), doc,
                                 tagger.entities(doc), rng);
    REQUIRE(out.has_value());
    CHECK(out->tokens[3] == "Ohio");
    CHECK(out->out_span == Span{3, 4});
    check_exact_diff(claim, out->src_span, out->tokens, out->out_span);
    CHECK_NOTHROW(validate_parse(out->parse));
  }

  SECTION("identical document entities yield none") {
    std::vector<std::string> claim = {"The", "mayor", "of", "Norfolk", "spoke"};
    std::vector<std::string> doc = {"People", "in", "Norfolk", "cheered"};
    auto parse = ChainParser().parse(claim);
    CHECK_FALSE(apply_entity_swap(claim, parse, tagger.entities(claim), doc,
                                  tagger.entities(doc), rng)
                    .has_value());
  }

  SECTION("type mismatch yields none") {
    std::vector<std::string> claim = {"A", "visit", "to", "Norfolk"};
    std::vector<std::string> doc = {"A", "talk", "by", "Smith"};
    auto parse = ChainParser().parse(claim);
    CHECK_FALSE(apply_entity_swap(claim, parse, tagger.entities(claim), doc,
                                  tagger.entities(doc), rng)
                    .has_value());
  }

  SECTION("multi-token replacement shifts downstream indices consistently") {
    std::vector<std::string> claim = {"The", "games", "in", "New", "York",
                                      "ended", "early"};
    std::vector<std::string> doc = {"Crowds", "in", "Los", "Angeles",
                                    "watched", "closely"};
    auto parse = ChainParser().parse(claim);
    auto out = apply_entity_swap(claim, parse, tagger.entities(claim), doc,
                                 tagger.entities(doc), rng);
    REQUIRE(out.has_value());
    CHECK(out->tokens == std::vector<std::string>{"The", "games", "in", "Los",
                                                  "Angeles", "ended", "early"});
    CHECK(out->out_span == Span{3, 5});
    check_exact_diff(claim, out->src_span, out->tokens, out->out_span);
    CHECK_NOTHROW(validate_parse(out->parse));
  }

  SECTION("one-to-two swap keeps the tail aligned") {
    std::vector<std::string> claim = {"Reporters", "met", "Smith", "at", "noon"};
    std::vector<std::string> doc = {"A", "talk", "by", "Robert", "Smith",
                                    "followed"};
    auto parse = ChainParser().parse(claim);
    auto out = apply_entity_swap(claim, parse, tagger.entities(claim), doc,
                                 tagger.entities(doc), rng);
    REQUIRE(out.has_value());
    CHECK(out->tokens.size() == 6);
    check_exact_diff(claim, out->src_span, out->tokens, out->out_span);
    CHECK_NOTHROW(validate_parse(out->parse));
  }
}

TEST_CASE("number swap") {
  LexiconSpanTagger tagger;
  Rng rng(5);

  SECTION("document number replaces the claim number") {
    std::vector<std::string> claim = {"They", "lost", "seven", "games"};
    std::vector<std::string> doc = {"The", "team", "won", "nine", "times"};
    auto parse = ChainParser().parse(claim);
    auto out = apply_number_swap(claim, parse, tagger.numbers(claim), doc,
                                 tagger.numbers(doc), rng);
    REQUIRE(out.has_value());
    CHECK(out->tokens == std::vector<std::string>{"They", "lost", "nine", "games"});
    check_exact_diff(claim, out->src_span, out->tokens, out->out_span);
  }

  SECTION("claim without numbers yields none") {
    std::vector<std::string> claim = {"They", "lost", "badly"};
    std::vector<std::string> doc = {"The", "team", "won", "nine", "times"};
    auto parse = ChainParser().parse(claim);
    CHECK_FALSE(apply_number_swap(claim, parse, tagger.numbers(claim), doc,
                                  tagger.numbers(doc), rng)
                    .has_value());
  }

  SECTION("integer perturbation covers exactly 1..17 minus 7") {
    std::vector<std::string> claim = {"They", "lost", "7", "games"};
    std::vector<std::string> doc = {"No", "digits", "here"};
    auto parse = ChainParser().parse(claim);
    std::set<long long> seen;
    for (std::uint64_t s = 0; s < 400; ++s) {
      Rng r(s);
      auto out = apply_number_swap(claim, parse, tagger.numbers(claim), doc,
                                   tagger.numbers(doc), r);
      REQUIRE(out.has_value());
      seen.insert(std::stoll(out->tokens[2]));
    }
    std::set<long long> expected;
    for (long long v = 1; v <= 17; ++v) {
      if (v != 7) expected.insert(v);
    }
    CHECK(seen == expected);
  }

  SECTION("same value in words and digits does not count as distinct") {
    std::vector<std::string> claim = {"They", "lost", "seven", "games"};
    std::vector<std::string> doc = {"They", "lost", "7", "games"};
    auto parse = ChainParser().parse(claim);
    // No distinct document number, and "seven" is not a digit token, so no
    // perturbation either.
    CHECK_FALSE(apply_number_swap(claim, parse, tagger.numbers(claim), doc,
                                  tagger.numbers(doc), rng)
                    .has_value());
  }
}

TEST_CASE("pronoun swap") {
  LexiconSpanTagger tagger;

  SECTION("subject pronoun at sentence start keeps capitalization") {
    std::vector<std::string> claim = {"She", "arrived", "late"};
    auto parse = ChainParser().parse(claim);
    Rng rng(3);
    auto out = apply_pronoun_swap(claim, parse, tagger.pronouns(claim), rng);
    REQUIRE(out.has_value());
    CHECK(out->out_span == Span{0, 1});
    CHECK(std::isupper(static_cast<unsigned char>(out->tokens[0][0])));
    CHECK(lex::lower(out->tokens[0]) != "she");
    check_exact_diff(claim, out->src_span, out->tokens, out->out_span);
  }

  SECTION("object position swaps within the object class") {
    std::vector<std::string> claim = {"Maria", "told", "him", "today"};
    auto parse = ChainParser().parse(claim);
    Rng rng(4);
    auto out = apply_pronoun_swap(claim, parse, tagger.pronouns(claim), rng);
    REQUIRE(out.has_value());
    CHECK(out->out_span == Span{2, 3});
    const auto& object_class = lex::pronoun_classes().at("object");
    CHECK(std::find(object_class.begin(), object_class.end(), out->tokens[2]) !=
          object_class.end());
    CHECK(out->tokens[2] != "him");
  }

  SECTION("claim without pronouns yields none") {
    std::vector<std::string> claim = {"Maria", "told", "reporters"};
    auto parse = ChainParser().parse(claim);
    Rng rng(4);
    CHECK_FALSE(
        apply_pronoun_swap(claim, parse, tagger.pronouns(claim), rng).has_value());
  }
}

TEST_CASE("negation") {
  SECTION("insertion after the auxiliary") {
    std::vector<std::string> claim = {"The", "artist", "has", "created", "works"};
    auto parse = ChainParser().parse(claim);
    Rng rng(9);
    auto out = apply_negation(claim, parse, rng);
    REQUIRE(out.has_value());
    CHECK(out->tokens == std::vector<std::string>{"The", "artist", "has", "not",
                                                  "created", "works"});
    CHECK(out->out_span == Span{3, 4});
    check_exact_diff(claim, out->src_span, out->tokens, out->out_span);
    CHECK_NOTHROW(validate_parse(out->parse));
  }

  SECTION("existing negation is removed") {
    std::vector<std::string> claim = {"The", "engine", "is", "not", "running"};
    auto parse = ChainParser().parse(claim);
    Rng rng(9);
    auto out = apply_negation(claim, parse, rng);
    REQUIRE(out.has_value());
    CHECK(out->tokens == std::vector<std::string>{"The", "engine", "is", "running"});
    CHECK(out->out_span == Span{2, 3});
    check_exact_diff(claim, out->src_span, out->tokens, out->out_span);
  }

  SECTION("verb-less fragment yields none") {
    std::vector<std::string> claim = {"A", "quiet", "village"};
    auto parse = ChainParser().parse(claim);
    Rng rng(9);
    CHECK_FALSE(apply_negation(claim, parse, rng).has_value());
  }

  SECTION("do-support is off by default and crude when enabled") {
    std::vector<std::string> claim = {"The", "mayor", "travels", "often"};
    auto parse = tree_from_parents({1, 2, -1, 2});
    Rng rng(9);
    CHECK_FALSE(apply_negation(claim, parse, rng).has_value());
    auto out = apply_negation(claim, parse, rng, /*do_support=*/true);
    REQUIRE(out.has_value());
    CHECK(out->tokens == std::vector<std::string>{"The", "mayor", "does", "not",
                                                  "travel", "often"});
    CHECK_NOTHROW(validate_parse(out->parse));
  }
}

TEST_CASE("noise injection") {
  std::vector<std::string> tokens = {"a", "b", "c", "d", "e"};
  auto parse = ChainParser().parse(tokens);

  SECTION("rate zero is the identity") {
    Rng rng(2);
    auto out = apply_noise(tokens, parse, rng, 0.0);
    CHECK(out.tokens == tokens);
    CHECK(out.op_count == 0);
    CHECK(out.parse == parse);
  }

  SECTION("rate one in duplication-only mode doubles every token") {
    Rng rng(2);
    auto out = apply_noise(tokens, parse, rng, 1.0, /*duplication_only=*/true);
    CHECK(out.tokens == std::vector<std::string>{"a", "a", "b", "b", "c", "c",
                                                 "d", "d", "e", "e"});
    CHECK(out.op_count == 5);
    CHECK_NOTHROW(validate_parse(out.parse));
  }

  SECTION("fixed seed reproduces the same output") {
    auto run = [&] {
      Rng rng(77);
      return apply_noise(tokens, parse, rng, 0.3);
    };
    auto a = run();
    auto b = run();
    CHECK(a.tokens == b.tokens);
    CHECK(a.ops == b.ops);
  }

  SECTION("protected tokens are never deleted") {
    WordMask protect{0, 1, 0, 1, 0};
    for (std::uint64_t s = 0; s < 50; ++s) {
      Rng rng(s);
      auto out = apply_noise(tokens, parse, rng, 0.8, false, &protect);
      std::size_t b_count = 0, d_count = 0;
      for (const auto& t : out.tokens) {
        b_count += t == "b";
        d_count += t == "d";
      }
      CHECK(b_count >= 1);
      CHECK(d_count >= 1);
    }
  }

  SECTION("out-of-range rate is rejected") {
    Rng rng(1);
    CHECK_THROWS_AS(apply_noise(tokens, parse, rng, 1.5), ValidationError);
  }
}

TEST_CASE("generate_entc") {
  LexiconSpanTagger tagger;
  SynonymParaphraser paraphraser;

  std::vector<AnnotatedExample> corpus = {
      claim_example("c1",
                    {"Officials", "in", "Ohio", "said", "the", "mayor", "of",
                     "Norfolk", "opened", "nine", "schools"},
                    {"The", "mayor", "of", "Norfolk", "has", "opened", "seven",
                     "schools"}),
      claim_example("c2", {"A", "big", "storm", "hit", "the", "coast"},
                    {"She", "said", "the", "storm", "was", "big"}),
  };

  EntcConfig config;
  config.ratio = "none";

  SECTION("emits the untransformed positive plus per-transform outputs") {
    auto result = generate_entc(corpus, tagger, &paraphraser, config, 13);
    REQUIRE(!result.examples.empty());
    CHECK(result.examples[0].id == "c1#orig");
    CHECK(result.examples[0].labels.sentence_label == Label::Factual);
    CHECK(result.stats.emitted.at("original") == 2);
    CHECK(result.stats.emitted.at("entity_swap") == 1);  // only c1 has entities
    CHECK(result.stats.emitted.at("negation") == 2);
    CHECK(result.stats.skipped.count("entity_swap") == 1);
    for (const auto& ex : result.examples) {
      CHECK_NOTHROW(validate_example(ex));
    }
  }

  SECTION("negatives differ from the claim exactly on the recorded span") {
    auto result = generate_entc(corpus, tagger, &paraphraser, config, 13);
    std::size_t checked = 0;
    for (const auto& ex : result.examples) {
      if (ex.labels.sentence_label != Label::NonFactual) continue;
      if (ex.document.meta.count("out_span") == 0) continue;
      const auto& claim = ex.id.rfind("c1", 0) == 0 ? corpus[0] : corpus[1];
      const Span out_span = span_from_meta(ex, "out_span");
      const Span src_span = span_from_meta(ex, "src_span");
      check_exact_diff(claim.summary.tokens, src_span, ex.summary.tokens, out_span);

      // label soundness: mask == span; arcs and sentence follow the rules
      WordMask expected(ex.summary.tokens.size(), 0);
      for (std::size_t i = out_span.begin; i < out_span.end; ++i) expected[i] = 1;
      CHECK(*ex.labels.word_mask == expected);
      CHECK(*ex.labels.arc_labels ==
            words_to_arcs(ex.summary.parse, *ex.labels.word_mask));
      CHECK(words_to_sentence(*ex.labels.word_mask) == Label::NonFactual);
      ++checked;
    }
    CHECK(checked >= 4);
  }

  SECTION("identical seeds give byte-identical output") {
    TempDir dir("entc");
    auto a = generate_entc(corpus, tagger, &paraphraser, config, 13);
    auto b = generate_entc(corpus, tagger, &paraphraser, config, 13);
    save_examples(a.examples, dir.file("a.jsonl"));
    save_examples(b.examples, dir.file("b.jsonl"));
    std::ifstream fa(dir.file("a.jsonl")), fb(dir.file("b.jsonl"));
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
    CHECK_FALSE(sa.str().empty());
  }

  SECTION("corpus order does not change per-example outputs") {
    auto forward = generate_entc(corpus, tagger, &paraphraser, config, 13);
    std::vector<AnnotatedExample> reversed = {corpus[1], corpus[0]};
    auto backward = generate_entc(reversed, tagger, &paraphraser, config, 13);
    std::map<std::string, AnnotatedExample> forward_by_id, backward_by_id;
    for (auto& ex : forward.examples) forward_by_id[ex.id] = ex;
    for (auto& ex : backward.examples) backward_by_id[ex.id] = ex;
    REQUIRE(forward_by_id.size() == backward_by_id.size());
    for (const auto& [id, ex] : forward_by_id) {
      REQUIRE(backward_by_id.count(id) == 1);
      CHECK(backward_by_id.at(id) == ex);
    }
  }

  SECTION("1:1 ratio downsamples the majority side") {
    EntcConfig balanced = config;
    balanced.ratio = "1:1";
    balanced.transforms.erase(TransformKind::NoiseInjection);
    // 4 positives (2 originals + 2 paraphrases) vs 5 negatives.
    auto result = generate_entc(corpus, tagger, &paraphraser, balanced, 13);
    CHECK(result.stats.positives == result.stats.negatives);
    CHECK(result.stats.positives == 4);
    CHECK(result.stats.balance_dropped == 1);
  }

  SECTION("per-claim cap limits negatives") {
    EntcConfig capped = config;
    capped.per_claim = 1;
    auto result = generate_entc(corpus, tagger, &paraphraser, capped, 13);
    std::map<std::string, int> negatives_per_claim;
    for (const auto& ex : result.examples) {
      if (ex.labels.sentence_label == Label::NonFactual) {
        ++negatives_per_claim[ex.id.substr(0, 2)];
      }
    }
    for (const auto& [claim, count] : negatives_per_claim) {
      CHECK(count <= 1);
    }
  }

  SECTION("paraphrase positives carry factual labels; error tags classify swaps") {
    auto result = generate_entc(corpus, tagger, &paraphraser, config, 13);
    bool saw_paraphrase = false;
    for (const auto& ex : result.examples) {
      if (ex.document.meta.at("transform") == "paraphrase") {
        saw_paraphrase = true;
        CHECK(ex.labels.sentence_label == Label::Factual);
      }
      if (ex.document.meta.at("transform") == "entity_swap") {
        REQUIRE(ex.error_tags.has_value());
        CHECK(ex.error_tags->at(0).category == ErrorCategory::EntityRelated);
      }
      if (ex.document.meta.at("transform") == "pronoun_swap") {
        REQUIRE(ex.error_tags.has_value());
        CHECK(ex.error_tags->at(0).category == ErrorCategory::EventRelated);
      }
    }
    CHECK(saw_paraphrase);
  }
}
