#pragma once

// Turns an arc-level factuality model into masked summarization training
// data, and defines the masked NLL objective contract: tokens flagged
// non-factual contribute exactly zero to the loss and its gradient.

#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "factspan/error.hpp"
#include "factspan/model.hpp"
#include "factspan/types.hpp"

namespace factspan {

struct MaskedTarget {
  std::string id;
  std::string doc_id;
  std::vector<std::string> sum_tokens;
  // 1 = train on this token (factual), 0 = ignore it.
  std::vector<std::uint8_t> train_mask;
  std::map<std::string, std::string> provenance;  // model, threshold, ...

  bool operator==(const MaskedTarget&) const = default;
};

// train_mask[i] = NOT localized-word-mask[i]; tokens incident to no arc can
// never be flagged and default to trainable.
inline std::vector<MaskedTarget> derive_masks(
    const FactualityModel& model, const std::vector<AnnotatedExample>& corpus,
    std::map<std::string, std::string> provenance = {}) {
  provenance["threshold"] = std::to_string(model.threshold());
  provenance["model_kind"] = to_string(model.kind());
  std::vector<MaskedTarget> targets;
  targets.reserve(corpus.size());
  for (const AnnotatedExample& ex : corpus) {
    if (ex.summary.parse.token_count != ex.summary.tokens.size()) {
      throw ValidationError("derive_masks: parse/token misalignment on '" +
                            ex.id + "'");
    }
    const Localization loc = model.localize(ex.document.tokens, ex.summary);
    MaskedTarget target;
    target.id = ex.id;
    target.doc_id = ex.document.id;
    target.sum_tokens = ex.summary.tokens;
    target.train_mask.reserve(loc.word_mask.size());
    for (auto flagged : loc.word_mask) {
      target.train_mask.push_back(flagged != 0 ? 0 : 1);
    }
    target.provenance = provenance;
    targets.push_back(std::move(target));
  }
  return targets;
}

enum class LossNormalization : std::uint8_t {
  Sum,       // the contract: plain masked sum
  MeanKept,  // practical variant: mean over unmasked positions
};

// Negated masked log-likelihood: -sum_i M_i * logprob_i. Masked-out
// positions contribute exactly zero to the value and the gradient; an
// all-zero mask yields exactly 0 (the example contributes nothing).
inline double masked_nll(const std::vector<double>& token_logprobs,
                         const std::vector<std::uint8_t>& train_mask,
                         LossNormalization normalization = LossNormalization::Sum) {
  if (token_logprobs.size() != train_mask.size()) {
    throw ValidationError("masked_nll: log-probs not aligned with mask");
  }
  double total = 0.0;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < token_logprobs.size(); ++i) {
    if (token_logprobs[i] > 0.0) {
      throw ValidationError("masked_nll: log-probabilities must be <= 0");
    }
    if (train_mask[i] != 0) {
      total -= token_logprobs[i];
      ++kept;
    }
  }
  if (normalization == LossNormalization::MeanKept && kept > 0) {
    total /= static_cast<double>(kept);
  }
  return total;
}

struct MaskStats {
  std::size_t total_tokens = 0;
  std::size_t masked_tokens = 0;       // train_mask == 0
  std::size_t all_masked_targets = 0;  // examples contributing nothing
  double masked_fraction = 0.0;        // micro: masked / total
};

inline MaskStats mask_statistics(const std::vector<MaskedTarget>& targets) {
  MaskStats stats;
  for (const MaskedTarget& t : targets) {
    bool any_kept = false;
    for (auto m : t.train_mask) {
      ++stats.total_tokens;
      if (m == 0) {
        ++stats.masked_tokens;
      } else {
        any_kept = true;
      }
    }
    if (!any_kept && !t.train_mask.empty()) ++stats.all_masked_targets;
  }
  if (stats.total_tokens > 0) {
    stats.masked_fraction = static_cast<double>(stats.masked_tokens) /
                            static_cast<double>(stats.total_tokens);
  }
  return stats;
}

// JSONL: {"id", "doc_id", "sum_tokens", "train_mask", "mask_provenance"};
// TSV: id, doc_id, space-joined tokens, compact 0/1 mask. Both
// byte-deterministic.
inline std::size_t export_masked_corpus(const std::vector<MaskedTarget>& targets,
                                        const std::string& path,
                                        const std::string& format = "jsonl") {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  if (format == "jsonl") {
    for (const MaskedTarget& t : targets) {
      nlohmann::json j;
      j["id"] = t.id;
      j["doc_id"] = t.doc_id;
      j["sum_tokens"] = t.sum_tokens;
      j["train_mask"] = t.train_mask;
      j["mask_provenance"] = t.provenance;
      out << j.dump() << '\n';
    }
  } else if (format == "tsv") {
    out << "id\tdoc_id\tsum_tokens\ttrain_mask\n";
    for (const MaskedTarget& t : targets) {
      out << t.id << '\t' << t.doc_id << '\t';
      for (std::size_t i = 0; i < t.sum_tokens.size(); ++i) {
        out << (i > 0 ? " " : "") << t.sum_tokens[i];
      }
      out << '\t';
      for (auto m : t.train_mask) out << (m != 0 ? '1' : '0');
      out << '\n';
    }
  } else {
    throw ConfigError("unknown masked-corpus format '" + format +
                      "' (jsonl|tsv)");
  }
  out.flush();
  if (!out) {
    throw IoError("write failed for '" + path + "'");
  }
  return targets.size();
}

inline std::vector<MaskedTarget> load_masked_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path + "' for reading");
  }
  std::vector<MaskedTarget> targets;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      MaskedTarget t;
      t.id = j.at("id").get<std::string>();
      t.doc_id = j.at("doc_id").get<std::string>();
      t.sum_tokens = j.at("sum_tokens").get<std::vector<std::string>>();
      t.train_mask = j.at("train_mask").get<std::vector<std::uint8_t>>();
      if (j.contains("mask_provenance") && !j.at("mask_provenance").is_null()) {
        t.provenance =
            j.at("mask_provenance").get<std::map<std::string, std::string>>();
      }
      if (t.train_mask.size() != t.sum_tokens.size()) {
        throw ValidationError("train_mask length != sum_tokens length");
      }
      targets.push_back(std::move(t));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return targets;
}

}  // namespace factspan
