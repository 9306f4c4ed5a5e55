#pragma once

// Encoder abstraction: a (document; summary) pair goes in, a pooled vector
// plus per-summary-token contextual vectors come out. Real pretrained
// encoders are wrapped behind this contract out of tree; the deterministic
// mock below supports hermetic tests and desk-scale runs.

#include <cmath>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "factspan/error.hpp"
#include "factspan/rng.hpp"
#include "factspan/types.hpp"

namespace factspan {

struct Encoding {
  std::vector<double> pooled;                     // d
  std::vector<std::vector<double>> token_vectors;  // summary_len x d
};

class EncoderProvider {
 public:
  virtual ~EncoderProvider() = default;
  virtual std::size_t dim() const = 0;
  virtual Encoding encode(const std::vector<std::string>& doc_tokens,
                          const std::vector<std::string>& sum_tokens) const = 0;
};

struct EncoderOptions {
  std::size_t dim = 32;
  std::uint64_t seed = 0;
  // Joint token budget for (document; summary). Documents are truncated
  // from the right; summaries are never truncated.
  std::size_t max_seq = 512;
};

// Deterministic featurizer. Per summary token: a seeded pseudorandom
// projection of the token string plus document-membership and local-bigram
// indicator features; the pooled vector is the token mean. The indicator
// features make simple lexical-support rules linearly recoverable, which is
// what the toy learnability suites rely on.
class MockEncoder final : public EncoderProvider {
 public:
  explicit MockEncoder(EncoderOptions options = {}) : options_(options) {
    if (options_.dim < 8) {
      throw ConfigError("mock encoder dim must be >= 8");
    }
  }

  std::size_t dim() const override { return options_.dim; }

  Encoding encode(const std::vector<std::string>& doc_tokens,
                  const std::vector<std::string>& sum_tokens) const override {
    if (sum_tokens.empty()) {
      throw ValidationError("encode: empty summary");
    }
    std::size_t doc_budget = doc_tokens.size();
    if (sum_tokens.size() < options_.max_seq) {
      doc_budget = std::min(doc_budget, options_.max_seq - sum_tokens.size());
    } else {
      doc_budget = 0;
    }

    std::set<std::string> doc_vocab;
    std::set<std::pair<std::string, std::string>> doc_bigrams;
    for (std::size_t i = 0; i < doc_budget; ++i) {
      doc_vocab.insert(doc_tokens[i]);
      if (i + 1 < doc_budget) {
        doc_bigrams.insert({doc_tokens[i], doc_tokens[i + 1]});
      }
    }

    Encoding enc;
    enc.token_vectors.reserve(sum_tokens.size());
    enc.pooled.assign(options_.dim, 0.0);
    for (std::size_t i = 0; i < sum_tokens.size(); ++i) {
      std::vector<double> v = hash_vector(sum_tokens[i]);
      v[0] += doc_vocab.count(sum_tokens[i]) ? 1.0 : -1.0;
      if (i > 0) {
        v[1] += doc_bigrams.count({sum_tokens[i - 1], sum_tokens[i]}) ? 1.0 : -1.0;
      }
      if (i + 1 < sum_tokens.size()) {
        v[2] += doc_bigrams.count({sum_tokens[i], sum_tokens[i + 1]}) ? 1.0 : -1.0;
      }
      v[3] += static_cast<double>(i) / static_cast<double>(sum_tokens.size()) - 0.5;
      for (std::size_t d = 0; d < options_.dim; ++d) {
        if (!std::isfinite(v[d])) {
          throw ValidationError("encode: non-finite feature value");
        }
        enc.pooled[d] += v[d];
      }
      enc.token_vectors.push_back(std::move(v));
    }
    for (double& p : enc.pooled) {
      p /= static_cast<double>(sum_tokens.size());
    }
    return enc;
  }

 private:
  std::vector<double> hash_vector(const std::string& token) const {
    Rng rng(fnv1a64(token, fnv1a64_u64(options_.seed, 0x9e3779b97f4a7c15ULL)));
    std::vector<double> v(options_.dim);
    for (double& x : v) {
      x = (rng.uniform01() - 0.5) * 0.5;
    }
    return v;
  }

  EncoderOptions options_;
};

inline std::shared_ptr<EncoderProvider> make_encoder(const std::string& key,
                                                     EncoderOptions options = {}) {
  if (key == "mock") return std::make_shared<MockEncoder>(options);
  throw ConfigError("unknown encoder '" + key + "' (available: mock)");
}

}  // namespace factspan
