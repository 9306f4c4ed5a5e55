#pragma once

// Evaluation metrics and experiment protocols: class-balanced accuracy,
// micro/macro localization precision-recall-F1, corpus error rates,
// generation-model splits, and checkpoint evaluation curves.
//
// Undefined metrics (single-class gold, zero predicted positives) surface
// as errors or explicit empty optionals, never as silent zeros.

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "factspan/error.hpp"
#include "factspan/model.hpp"
#include "factspan/rng.hpp"
#include "factspan/types.hpp"

namespace factspan {

// Mean of per-class recalls. Exactly 0.5 for any constant predictor on
// two-class gold; requires both classes in the gold labels.
inline double balanced_accuracy(const std::vector<Label>& gold,
                                const std::vector<Label>& pred) {
  if (gold.size() != pred.size()) {
    throw ValidationError("balanced_accuracy: gold and predictions not aligned");
  }
  if (gold.empty()) {
    throw ValidationError("balanced_accuracy: empty label lists");
  }
  std::size_t n_factual = 0, n_nonfactual = 0;
  std::size_t hit_factual = 0, hit_nonfactual = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == Label::Factual) {
      ++n_factual;
      if (pred[i] == Label::Factual) ++hit_factual;
    } else {
      ++n_nonfactual;
      if (pred[i] == Label::NonFactual) ++hit_nonfactual;
    }
  }
  if (n_factual == 0 || n_nonfactual == 0) {
    throw MetricUndefinedError(
        "balanced accuracy needs both classes in the gold labels");
  }
  const double recall_factual =
      static_cast<double>(hit_factual) / static_cast<double>(n_factual);
  const double recall_nonfactual =
      static_cast<double>(hit_nonfactual) / static_cast<double>(n_nonfactual);
  return (recall_factual + recall_nonfactual) / 2.0;
}

enum class Averaging : std::uint8_t { Micro, Macro };

struct PrfResult {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
};

namespace detail {

inline std::optional<double> harmonic_f1(std::optional<double> p,
                                         std::optional<double> r) {
  if (!p || !r) return std::nullopt;
  if (*p + *r == 0.0) return 0.0;
  return 2.0 * *p * *r / (*p + *r);
}

}  // namespace detail

// Positive class = NonFactual. Micro averaging pools unit counts over the
// corpus (the reported contract); macro averages per-example values over
// the examples where they are defined. With undefined_as_zero set,
// undefined precision/recall collapse to 0 instead of empty.
inline PrfResult localization_prf(const std::vector<std::vector<Label>>& gold,
                                  const std::vector<std::vector<Label>>& pred,
                                  Averaging averaging = Averaging::Micro,
                                  bool undefined_as_zero = false) {
  if (gold.size() != pred.size()) {
    throw ValidationError("localization_prf: example counts differ");
  }
  std::vector<std::array<std::size_t, 3>> counts;  // tp, fp, fn per example
  counts.reserve(gold.size());
  for (std::size_t e = 0; e < gold.size(); ++e) {
    if (gold[e].size() != pred[e].size()) {
      throw ValidationError("localization_prf: example " + std::to_string(e) +
                            " label sequences not aligned");
    }
    std::array<std::size_t, 3> c{0, 0, 0};
    for (std::size_t i = 0; i < gold[e].size(); ++i) {
      const bool g = gold[e][i] == Label::NonFactual;
      const bool p = pred[e][i] == Label::NonFactual;
      if (p && g) ++c[0];
      if (p && !g) ++c[1];
      if (!p && g) ++c[2];
    }
    counts.push_back(c);
  }

  PrfResult out;
  for (const auto& c : counts) {
    out.true_positives += c[0];
    out.false_positives += c[1];
    out.false_negatives += c[2];
  }
  auto ratio = [&](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) {
      if (undefined_as_zero) return 0.0;
      return std::nullopt;
    }
    return static_cast<double>(num) / static_cast<double>(den);
  };
  if (averaging == Averaging::Micro) {
    out.precision = ratio(out.true_positives, out.true_positives + out.false_positives);
    out.recall = ratio(out.true_positives, out.true_positives + out.false_negatives);
    out.f1 = detail::harmonic_f1(out.precision, out.recall);
    return out;
  }
  double p_sum = 0.0, r_sum = 0.0, f_sum = 0.0;
  std::size_t p_n = 0, r_n = 0, f_n = 0;
  for (const auto& c : counts) {
    const auto p = ratio(c[0], c[0] + c[1]);
    const auto r = ratio(c[0], c[0] + c[2]);
    if (p) {
      p_sum += *p;
      ++p_n;
    }
    if (r) {
      r_sum += *r;
      ++r_n;
    }
    if (auto f = detail::harmonic_f1(p, r)) {
      f_sum += *f;
      ++f_n;
    }
  }
  if (p_n > 0) out.precision = p_sum / static_cast<double>(p_n);
  if (r_n > 0) out.recall = r_sum / static_cast<double>(r_n);
  if (f_n > 0) out.f1 = f_sum / static_cast<double>(f_n);
  return out;
}

// ---------------------------------------------------------------------------
// Corpus error rates under a model

struct ErrorRates {
  double word_rate = 0.0;      // flagged words / all summary words
  double sentence_rate = 0.0;  // flagged sentences / all sentences
  std::size_t flagged_words = 0;
  std::size_t total_words = 0;
  std::size_t flagged_sentences = 0;
  std::size_t total_sentences = 0;
};

// Word denominators count every summary token, including tokens incident to
// no arc (which can never be flagged).
inline ErrorRates error_rates(const FactualityModel& model,
                              const std::vector<AnnotatedExample>& corpus) {
  if (corpus.empty()) {
    throw ValidationError("error_rates: empty corpus");
  }
  ErrorRates out;
  for (const AnnotatedExample& ex : corpus) {
    const Localization loc = model.localize(ex.document.tokens, ex.summary);
    bool any = false;
    for (auto m : loc.word_mask) {
      out.flagged_words += m != 0 ? 1 : 0;
      any = any || m != 0;
    }
    out.total_words += ex.summary.tokens.size();
    out.flagged_sentences += any ? 1 : 0;
    ++out.total_sentences;
  }
  out.word_rate =
      static_cast<double>(out.flagged_words) / static_cast<double>(out.total_words);
  out.sentence_rate = static_cast<double>(out.flagged_sentences) /
                      static_cast<double>(out.total_sentences);
  return out;
}

// ---------------------------------------------------------------------------
// Generation-model splits

enum class SplitMode : std::uint8_t { AllModels, OtherModels };

struct SplitResult {
  std::vector<AnnotatedExample> train;
  std::vector<AnnotatedExample> test;
};

// Splits on meta["model"]. Other-models: train excludes the held-out model
// entirely. All-models: train additionally receives a seeded sample of at
// most train_cap held-out-model examples; the rest of them form the test
// set. Train and test are disjoint in both modes.
inline SplitResult split_by_generation_model(
    const std::vector<AnnotatedExample>& examples, const std::string& model_name,
    SplitMode mode, std::size_t train_cap = 0, std::uint64_t seed = 0) {
  std::vector<std::size_t> held_out;
  std::set<std::string> known;
  SplitResult out;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    auto it = examples[i].document.meta.find("model");
    const std::string name =
        it == examples[i].document.meta.end() ? std::string() : it->second;
    if (!name.empty()) known.insert(name);
    if (name == model_name) {
      held_out.push_back(i);
    } else {
      out.train.push_back(examples[i]);
    }
  }
  if (held_out.empty()) {
    std::string names;
    for (const auto& n : known) names += (names.empty() ? "" : ", ") + n;
    throw ValidationError("unknown generation model '" + model_name +
                          "' (seen: " + (names.empty() ? "none" : names) + ")");
  }
  if (out.train.empty()) {
    throw ValidationError("split: no training examples remain outside model '" +
                          model_name + "'");
  }

  std::set<std::size_t> into_train;
  if (mode == SplitMode::AllModels && train_cap > 0) {
    std::vector<std::size_t> order = held_out;
    Rng rng = Rng::child(seed, "split", model_name);
    rng.shuffle(order);
    order.resize(std::min(train_cap, order.size()));
    into_train.insert(order.begin(), order.end());
  }
  for (std::size_t i : held_out) {
    if (into_train.count(i)) {
      out.train.push_back(examples[i]);
    } else {
      out.test.push_back(examples[i]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoint evaluation curves

struct CurveRow {
  long long step = 0;
  std::string set_name;
  std::optional<double> balanced_acc;  // empty = undefined on that set
};

using NamedEvalSet = std::pair<std::string, const std::vector<AnnotatedExample>*>;

// Full (checkpoint x eval set) grid of sentence-level balanced accuracy.
inline std::vector<CurveRow> eval_curve(const FactualityModel& base,
                                        const std::vector<CheckpointRecord>& checkpoints,
                                        const std::vector<NamedEvalSet>& sets) {
  if (checkpoints.empty() || sets.empty()) {
    throw ValidationError("eval_curve: need at least one checkpoint and one set");
  }
  std::vector<CurveRow> rows;
  for (const CheckpointRecord& ckpt : checkpoints) {
    FactualityModel model = base;
    if (ckpt.theta.size() != model.head().theta().size()) {
      throw ValidationError("checkpoint parameter count mismatch at step " +
                            std::to_string(ckpt.step));
    }
    model.head().theta() = ckpt.theta;
    for (const auto& [name, examples] : sets) {
      std::vector<Label> gold, pred;
      gold.reserve(examples->size());
      for (const AnnotatedExample& ex : *examples) {
        gold.push_back(ex.labels.sentence_label);
        pred.push_back(model.predict_sentence(ex.document.tokens, ex.summary).label);
      }
      CurveRow row{ckpt.step, name, std::nullopt};
      try {
        row.balanced_acc = balanced_accuracy(gold, pred);
      } catch (const MetricUndefinedError&) {
        // leave empty; the table prints an explicit marker
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace factspan
