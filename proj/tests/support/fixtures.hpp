#pragma once

// Shared test fixtures: hand-built parses, random/exhaustive tree
// generation, scratch directories, and the toy learnability corpus used by
// the model and acceptance suites.

#include <unistd.h>

#include <filesystem>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <factspan/derive.hpp>
#include <factspan/providers.hpp>
#include <factspan/rng.hpp>
#include <factspan/types.hpp>

namespace testsupport {

using namespace factspan;

// Parse from a parent vector: parent[i] = head of token i, -1 for root.
inline DependencyParse tree_from_parents(const std::vector<int>& parents,
                                         const std::vector<std::string>& relations = {}) {
  DependencyParse parse;
  parse.token_count = parents.size();
  for (std::size_t i = 0; i < parents.size(); ++i) {
    if (parents[i] < 0) continue;
    const std::string rel =
        i < relations.size() ? relations[i] : std::string("dep");
    parse.arcs.push_back(Arc{static_cast<std::size_t>(parents[i]), i, rel});
  }
  return parse;
}

// All single-rooted trees on n labeled tokens as parent vectors.
inline std::vector<std::vector<int>> enumerate_trees(std::size_t n) {
  std::vector<std::vector<int>> trees;
  if (n == 0) return trees;
  std::vector<int> parents(n, -1);
  auto acyclic = [&]() {
    for (std::size_t start = 0; start < n; ++start) {
      std::size_t cur = start, hops = 0;
      while (parents[cur] >= 0) {
        cur = static_cast<std::size_t>(parents[cur]);
        if (++hops > n) return false;
      }
    }
    return true;
  };
  for (std::size_t root = 0; root < n; ++root) {
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < n; ++i) {
      if (i != root) others.push_back(i);
    }
    std::vector<std::size_t> choice(others.size(), 0);
    while (true) {
      for (std::size_t k = 0; k < others.size(); ++k) {
        std::size_t p = choice[k];
        if (p >= others[k]) ++p;  // skip self
        parents[others[k]] = static_cast<int>(p);
      }
      parents[root] = -1;
      if (acyclic()) trees.push_back(parents);
      // odometer over parent choices
      std::size_t k = 0;
      for (; k < choice.size(); ++k) {
        if (++choice[k] < n - 1) break;
        choice[k] = 0;
      }
      if (choice.empty() || k == choice.size()) break;
    }
    if (others.empty()) {
      trees.push_back(std::vector<int>(n, -1));
      break;
    }
  }
  return trees;
}

// Random single-rooted tree: token order shuffled, each node attaches to a
// random earlier node.
inline DependencyParse random_tree(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<int> parents(n, -1);
  static const char* kRelations[] = {"nsubj", "obj", "det", "amod", "dep"};
  std::vector<std::string> relations(n, "dep");
  for (std::size_t k = 1; k < n; ++k) {
    parents[order[k]] = static_cast<int>(order[rng.bounded(k)]);
    relations[order[k]] = kRelations[rng.bounded(5)];
  }
  return tree_from_parents(parents, relations);
}

inline std::vector<std::string> numbered_tokens(std::size_t n,
                                                const std::string& prefix = "w") {
  std::vector<std::string> tokens;
  tokens.reserve(n);
  for (std::size_t i = 0; i < n; ++i) tokens.push_back(prefix + std::to_string(i));
  return tokens;
}

// RAII scratch directory under the system temp root.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    auto base = std::filesystem::temp_directory_path();
    for (int attempt = 0;; ++attempt) {
      auto candidate =
          base / ("factspan_" + tag + "_" + std::to_string(::getpid()) + "_" +
                  std::to_string(attempt));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate;
        return;
      }
    }
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

// ---------------------------------------------------------------------------
// Toy learnability corpus. Documents are random token sequences; summaries
// copy a contiguous document window and negatives corrupt some interior
// positions so the incident bigrams become unsupported. Arc gold labels
// follow the deterministic rule "factual iff the (head word, child word)
// bigram occurs in the document", which the mock encoder exposes as an
// indicator feature. Parses are chains (adjacent-token arcs), so document
// dependency pairs coincide with document bigrams.

struct ToyCorpus {
  std::vector<AnnotatedExample> train;
  std::vector<AnnotatedExample> test;
};

inline std::vector<std::string> toy_vocab() {
  return {"storm",  "coast",  "village", "mayor",  "bridge", "river",  "team",
          "season", "record", "crowd",   "museum", "artist", "statue", "harbor",
          "market", "farmer", "harvest", "winter", "festival", "singer",
          "stadium", "doctor", "clinic", "garden", "castle", "miner",  "tunnel",
          "engine", "driver", "signal",  "island", "ferry",  "school", "teacher",
          "library", "novel", "bakery",  "cheese", "valley", "meadow"};
}

inline AnnotatedExample make_toy_example(const std::string& id, bool corrupt,
                                         Rng& rng) {
  const auto vocab = toy_vocab();
  const std::size_t doc_len = 30;
  const std::size_t sum_len = 8;

  std::vector<std::string> doc(doc_len);
  for (auto& t : doc) t = vocab[rng.bounded(vocab.size())];

  const std::size_t start = rng.bounded(doc_len - sum_len);
  std::vector<std::string> sum(doc.begin() + static_cast<std::ptrdiff_t>(start),
                               doc.begin() + static_cast<std::ptrdiff_t>(start + sum_len));

  std::set<std::pair<std::string, std::string>> doc_bigrams;
  for (std::size_t i = 0; i + 1 < doc.size(); ++i) {
    doc_bigrams.insert({doc[i], doc[i + 1]});
  }

  if (corrupt) {
    const std::size_t k = 1 + rng.bounded(2);
    for (std::size_t c = 0; c < k; ++c) {
      const std::size_t pos = 1 + rng.bounded(sum_len - 2);
      for (int attempt = 0; attempt < 64; ++attempt) {
        const std::string& w = vocab[rng.bounded(vocab.size())];
        const bool left_supported = doc_bigrams.count({sum[pos - 1], w}) > 0;
        const bool right_supported = doc_bigrams.count({w, sum[pos + 1]}) > 0;
        if (!left_supported && !right_supported && w != sum[pos]) {
          sum[pos] = w;
          break;
        }
      }
    }
  }

  AnnotatedExample ex;
  ex.id = id;
  ex.document = Document::from_tokens(id + "-doc", doc);
  ex.summary.id = id;
  ex.summary.tokens = sum;
  ex.summary.parse = ChainParser().parse(sum);

  std::vector<Label> arc_labels;
  for (const Arc& a : ex.summary.parse.arcs) {
    const bool supported =
        doc_bigrams.count({sum[a.head_index], sum[a.child_index]}) > 0;
    arc_labels.push_back(supported ? Label::Factual : Label::NonFactual);
  }
  ex.labels.arc_labels = arc_labels;
  ex.labels.sentence_label = arcs_to_sentence(arc_labels);
  ex.labels.word_mask = arcs_to_words(ex.summary.parse, arc_labels);
  ex.labels.provenance = Provenance::Human;
  return ex;
}

inline ToyCorpus make_toy_corpus(std::size_t n_train, std::size_t n_test,
                                 std::uint64_t seed) {
  ToyCorpus corpus;
  Rng rng(seed);
  for (std::size_t i = 0; i < n_train; ++i) {
    corpus.train.push_back(
        make_toy_example("train-" + std::to_string(i), i % 2 == 1, rng));
  }
  for (std::size_t i = 0; i < n_test; ++i) {
    corpus.test.push_back(
        make_toy_example("test-" + std::to_string(i), i % 2 == 1, rng));
  }
  return corpus;
}

}  // namespace testsupport
