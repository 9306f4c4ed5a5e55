#include <catch2/catch_amalgamated.hpp>

#include <factspan/derive.hpp>

#include "support/fixtures.hpp"

using namespace factspan;
using testsupport::tree_from_parents;

TEST_CASE("words_to_arcs basics") {
  // tokens: 0 1 2, arcs: (0 -> 1), (1 -> 2)
  auto parse = tree_from_parents({-1, 0, 1});

  SECTION("all-false mask keeps every arc factual") {
    auto labels = words_to_arcs(parse, WordMask{0, 0, 0});
    CHECK(labels == std::vector<Label>{Label::Factual, Label::Factual});
  }

  SECTION("a marked word flags exactly its incident arcs") {
    auto labels = words_to_arcs(parse, WordMask{1, 0, 0});
    CHECK(labels == std::vector<Label>{Label::NonFactual, Label::Factual});
  }

  SECTION("length mismatch is a validation error") {
    CHECK_THROWS_AS(words_to_arcs(parse, WordMask{1, 0}), ValidationError);
  }

  SECTION("swapped-entity highlight flags the arcs touching the swap") {
    // "The mayor of Ohio resigned" with Ohio swapped in for the original
    // place; only arcs incident to token 3 go bad.
    auto p = tree_from_parents({1, 4, 1, 2, -1}, {"det", "nsubj", "prep", "pobj", ""});
    auto labels = words_to_arcs(p, WordMask{0, 0, 0, 1, 0});
    for (std::size_t i = 0; i < p.arcs.size(); ++i) {
      const bool touches =
          p.arcs[i].head_index == 3 || p.arcs[i].child_index == 3;
      CHECK((labels[i] == Label::NonFactual) == touches);
    }
  }
}

TEST_CASE("arcs_to_words basics") {
  auto parse = tree_from_parents({-1, 0, 1});

  SECTION("all-factual arcs give an all-false mask") {
    auto mask = arcs_to_words(parse, {Label::Factual, Label::Factual});
    CHECK(mask == WordMask{0, 0, 0});
  }

  SECTION("one bad arc marks both endpoints") {
    auto mask = arcs_to_words(parse, {Label::NonFactual, Label::Factual});
    CHECK(mask == WordMask{1, 1, 0});
  }

  SECTION("a single bad arc in a two-token sentence marks both words") {
    auto two = tree_from_parents({-1, 0});
    CHECK(arcs_to_words(two, {Label::NonFactual}) == WordMask{1, 1});
  }

  SECTION("alignment mismatch is a validation error") {
    CHECK_THROWS_AS(arcs_to_words(parse, {Label::Factual}), ValidationError);
  }
}

TEST_CASE("sentence aggregation") {
  CHECK(arcs_to_sentence({Label::Factual, Label::Factual}) == Label::Factual);
  CHECK(arcs_to_sentence({Label::Factual, Label::NonFactual}) == Label::NonFactual);
  CHECK_THROWS_AS(arcs_to_sentence({}), ValidationError);

  // "games <- arrested" judged non-factual while "games -> seven" holds:
  // one bad arc suffices.
  CHECK(arcs_to_sentence({Label::NonFactual, Label::Factual}) == Label::NonFactual);

  CHECK(words_to_sentence(WordMask{0, 0, 0}) == Label::Factual);
  CHECK(words_to_sentence(WordMask{0, 1, 0}) == Label::NonFactual);
  CHECK_THROWS_AS(words_to_sentence(WordMask{}), ValidationError);
}

TEST_CASE("derivation oracle on all small trees and masks") {
  for (std::size_t n = 1; n <= 5; ++n) {
    const auto trees = testsupport::enumerate_trees(n);
    for (const auto& parents : trees) {
      const auto parse = tree_from_parents(parents);
      for (std::size_t bits = 0; bits < (1u << n); ++bits) {
        WordMask mask(n, 0);
        for (std::size_t i = 0; i < n; ++i) mask[i] = (bits >> i) & 1;

        const auto arc_labels = words_to_arcs(parse, mask);
        // brute force per arc
        for (std::size_t a = 0; a < parse.arcs.size(); ++a) {
          const bool expect =
              mask[parse.arcs[a].head_index] || mask[parse.arcs[a].child_index];
          REQUIRE((arc_labels[a] == Label::NonFactual) == expect);
        }
        // brute force per word
        const auto derived = arcs_to_words(parse, arc_labels);
        for (std::size_t w = 0; w < n; ++w) {
          bool expect = false;
          for (std::size_t a = 0; a < parse.arcs.size(); ++a) {
            if (parse.arcs[a].head_index == w || parse.arcs[a].child_index == w) {
              expect = expect || arc_labels[a] == Label::NonFactual;
            }
          }
          REQUIRE((derived[w] != 0) == expect);
        }
        if (!arc_labels.empty()) {
          bool any = false;
          for (auto l : arc_labels) any = any || l == Label::NonFactual;
          REQUIRE((arcs_to_sentence(arc_labels) == Label::NonFactual) == any);
        }
      }
    }
  }
}

TEST_CASE("property: consistency chain, inflation, monotonicity") {
  Rng rng(11);
  for (int round = 0; round < 200; ++round) {
    const std::size_t n = 2 + rng.bounded(7);
    const auto parse = testsupport::random_tree(n, rng);
    WordMask mask(n, 0);
    for (std::size_t i = 0; i < n; ++i) mask[i] = rng.bounded(2);

    const auto arcs = words_to_arcs(parse, mask);

    // Chain: sentence-from-arcs equals sentence-from-mask restricted to
    // arc-incident tokens.
    WordMask incident(n, 0);
    for (const Arc& a : parse.arcs) {
      incident[a.head_index] = 1;
      incident[a.child_index] = 1;
    }
    WordMask restricted(n, 0);
    bool any_restricted = false;
    for (std::size_t i = 0; i < n; ++i) {
      restricted[i] = mask[i] && incident[i];
      any_restricted = any_restricted || restricted[i];
    }
    CHECK((arcs_to_sentence(arcs) == Label::NonFactual) == any_restricted);

    // Inflation: derived words contain every marked arc-incident word.
    const auto derived = arcs_to_words(parse, arcs);
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i] && incident[i]) CHECK(derived[i] != 0);
    }

    // Monotonicity: marking one more word never clears an arc.
    WordMask more = mask;
    more[rng.bounded(n)] = 1;
    const auto arcs_more = words_to_arcs(parse, more);
    for (std::size_t a = 0; a < arcs.size(); ++a) {
      if (arcs[a] == Label::NonFactual) CHECK(arcs_more[a] == Label::NonFactual);
    }
  }
}

TEST_CASE("derive_missing fills gaps and honors the GenC refusal") {
  auto parse = tree_from_parents({-1, 0, 1});

  AnnotatedExample ex;
  ex.id = "d";
  ex.document = Document::from_tokens("d", {"x"});
  ex.summary.id = "d";
  ex.summary.tokens = {"a", "b", "c"};
  ex.summary.parse = parse;
  ex.labels.provenance = Provenance::Human;

  SECTION("word mask to arcs") {
    ex.labels.sentence_label = Label::NonFactual;
    ex.labels.word_mask = WordMask{0, 1, 0};
    CHECK(derive_missing(ex));
    CHECK(*ex.labels.arc_labels ==
          std::vector<Label>{Label::NonFactual, Label::NonFactual});
  }

  SECTION("arcs to word mask for non-GenC provenance") {
    ex.labels.sentence_label = Label::NonFactual;
    ex.labels.arc_labels = std::vector<Label>{Label::NonFactual, Label::Factual};
    CHECK(derive_missing(ex));
    CHECK(*ex.labels.word_mask == WordMask{1, 1, 0});
  }

  SECTION("GenC word derivation requires force") {
    ex.labels.sentence_label = Label::NonFactual;
    ex.labels.provenance = Provenance::GenC;
    ex.labels.arc_labels = std::vector<Label>{Label::NonFactual, Label::Factual};
    CHECK_FALSE(derive_missing(ex));
    CHECK_FALSE(ex.labels.word_mask.has_value());
    CHECK(derive_missing(ex, /*force_genc_words=*/true));
    CHECK(ex.labels.word_mask.has_value());
  }
}

TEST_CASE("taxonomy distribution") {
  auto base = [](const std::string& id) {
    AnnotatedExample ex;
    ex.id = id;
    ex.document = Document::from_tokens(id, {"x"});
    ex.summary.id = id;
    ex.summary.tokens = {"a", "b"};
    ex.summary.parse = tree_from_parents({-1, 0});
    ex.labels.sentence_label = Label::Factual;
    return ex;
  };

  SECTION("no tags anywhere gives all-zero fractions") {
    auto dist = taxonomy_distribution({base("a"), base("b")});
    CHECK(dist.fraction_of_all(ErrorCategory::EntityRelated,
                               Orientation::Extrinsic) == 0.0);
    CHECK(dist.tagged_examples == 0);
  }

  SECTION("repeated identical tags count once per example") {
    auto a = base("a");
    a.error_tags = std::vector<ErrorTag>{
        {ErrorCategory::EntityRelated, Orientation::Extrinsic, {0, 1}},
        {ErrorCategory::EntityRelated, Orientation::Extrinsic, {1, 2}}};
    auto dist = taxonomy_distribution({a, base("b")});
    CHECK(dist.fraction_of_all(ErrorCategory::EntityRelated,
                               Orientation::Extrinsic) == 0.5);
    CHECK(dist.fraction_of_tagged(ErrorCategory::EntityRelated,
                                  Orientation::Extrinsic) == 1.0);
  }

  SECTION("multiple error types in one example can push the sum over 1") {
    auto a = base("a");
    a.error_tags = std::vector<ErrorTag>{
        {ErrorCategory::EntityRelated, Orientation::Intrinsic, {0, 1}},
        {ErrorCategory::EventRelated, Orientation::Intrinsic, {1, 2}}};
    auto dist = taxonomy_distribution({a});
    CHECK(dist.fraction_of_all(ErrorCategory::EntityRelated,
                               Orientation::Intrinsic) == 1.0);
    CHECK(dist.fraction_of_all(ErrorCategory::EventRelated,
                               Orientation::Intrinsic) == 1.0);
  }
}
