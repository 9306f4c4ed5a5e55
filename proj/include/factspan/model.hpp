#pragma once

// Factuality classifiers over a pluggable encoder.
//
//   Sent     — classifies the pooled (document; summary) vector.
//   Dae      — classifies each dependency arc independently from the
//              concatenated head/child token vectors; sentence judgments
//              aggregate over arcs (any non-factual arc => non-factual).
//   DaeWeak  — same architecture as Dae, trained from sentence labels only
//              through a marginal-likelihood objective: arcs in the
//              constraint set F must be factual, and for a non-factual
//              sentence at least one remaining arc must be non-factual.
//
// Loss conventions: all losses are negated log-likelihoods (minimized).
// Probabilities entering a log are clamped to [1e-7, 1 - 1e-7]; the
// at-least-one-non-factual term is evaluated in log space.

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "factspan/derive.hpp"
#include "factspan/encoder.hpp"
#include "factspan/error.hpp"
#include "factspan/providers.hpp"
#include "factspan/rng.hpp"
#include "factspan/types.hpp"

namespace factspan {

inline constexpr double kProbEps = 1e-7;

inline double clamp_prob(double p) {
  if (p < kProbEps) return kProbEps;
  if (p > 1.0 - kProbEps) return 1.0 - kProbEps;
  return p;
}

// log(1 - exp(x)) for x < 0, computed without cancellation.
inline double log1m_exp(double x) {
  if (x > -0.6931471805599453) {  // ln 2
    return std::log(-std::expm1(x));
  }
  return std::log1p(-std::exp(x));
}

// Concatenated head/child token vectors for one arc: [E(D;S)_h ; E(D;S)_c].
inline std::vector<double> arc_representation(const Encoding& encoding,
                                              const Arc& arc) {
  const auto& head = encoding.token_vectors.at(arc.head_index);
  const auto& child = encoding.token_vectors.at(arc.child_index);
  std::vector<double> r;
  r.reserve(head.size() + child.size());
  r.insert(r.end(), head.begin(), head.end());
  r.insert(r.end(), child.begin(), child.end());
  return r;
}

// ---------------------------------------------------------------------------
// Classification head: affine map to two logits (optionally through one
// tanh hidden layer) followed by softmax. Index 0 = Factual, 1 = NonFactual.

class ClassifierHead {
 public:
  ClassifierHead() = default;
  ClassifierHead(std::size_t in_dim, std::size_t hidden = 0)
      : in_dim_(in_dim), hidden_(hidden), theta_(param_count(in_dim, hidden), 0.0) {}

  static std::size_t param_count(std::size_t in_dim, std::size_t hidden) {
    if (hidden == 0) return 2 * in_dim + 2;
    return hidden * in_dim + hidden + 2 * hidden + 2;
  }

  static ClassifierHead random_init(std::size_t in_dim, std::size_t hidden,
                                    Rng& rng, double scale = 0.05) {
    ClassifierHead head(in_dim, hidden);
    for (double& w : head.theta_) {
      w = (rng.uniform01() - 0.5) * 2.0 * scale;
    }
    return head;
  }

  std::size_t in_dim() const { return in_dim_; }
  std::size_t hidden() const { return hidden_; }
  std::vector<double>& theta() { return theta_; }
  const std::vector<double>& theta() const { return theta_; }

  std::array<double, 2> logits(const std::vector<double>& x) const {
    check_input(x);
    if (hidden_ == 0) {
      std::array<double, 2> z{};
      for (std::size_t j = 0; j < 2; ++j) {
        double acc = theta_[2 * in_dim_ + j];
        for (std::size_t i = 0; i < in_dim_; ++i) {
          acc += theta_[j * in_dim_ + i] * x[i];
        }
        z[j] = acc;
      }
      return z;
    }
    std::vector<double> h = hidden_activations(x);
    std::array<double, 2> z{};
    const std::size_t w2 = hidden_ * in_dim_ + hidden_;
    for (std::size_t j = 0; j < 2; ++j) {
      double acc = theta_[w2 + 2 * hidden_ + j];
      for (std::size_t k = 0; k < hidden_; ++k) {
        acc += theta_[w2 + j * hidden_ + k] * h[k];
      }
      z[j] = acc;
    }
    return z;
  }

  // Softmax probabilities (Factual, NonFactual); sums to 1.
  std::array<double, 2> probabilities(const std::vector<double>& x) const {
    return softmax(logits(x));
  }

  static std::array<double, 2> softmax(const std::array<double, 2>& z) {
    const double m = std::max(z[0], z[1]);
    const double e0 = std::exp(z[0] - m);
    const double e1 = std::exp(z[1] - m);
    return {e0 / (e0 + e1), e1 / (e0 + e1)};
  }

  // Accumulates d loss / d theta given d loss / d logits at input x.
  void accumulate_gradient(const std::vector<double>& x,
                           const std::array<double, 2>& dlogits,
                           std::vector<double>& grad) const {
    check_input(x);
    if (grad.size() != theta_.size()) {
      throw ValidationError("gradient buffer size mismatch");
    }
    if (hidden_ == 0) {
      for (std::size_t j = 0; j < 2; ++j) {
        for (std::size_t i = 0; i < in_dim_; ++i) {
          grad[j * in_dim_ + i] += dlogits[j] * x[i];
        }
        grad[2 * in_dim_ + j] += dlogits[j];
      }
      return;
    }
    std::vector<double> h = hidden_activations(x);
    const std::size_t w2 = hidden_ * in_dim_ + hidden_;
    std::vector<double> dh(hidden_, 0.0);
    for (std::size_t j = 0; j < 2; ++j) {
      for (std::size_t k = 0; k < hidden_; ++k) {
        grad[w2 + j * hidden_ + k] += dlogits[j] * h[k];
        dh[k] += dlogits[j] * theta_[w2 + j * hidden_ + k];
      }
      grad[w2 + 2 * hidden_ + j] += dlogits[j];
    }
    for (std::size_t k = 0; k < hidden_; ++k) {
      const double dz = dh[k] * (1.0 - h[k] * h[k]);
      for (std::size_t i = 0; i < in_dim_; ++i) {
        grad[k * in_dim_ + i] += dz * x[i];
      }
      grad[hidden_ * in_dim_ + k] += dz;
    }
  }

  bool operator==(const ClassifierHead&) const = default;

 private:
  void check_input(const std::vector<double>& x) const {
    if (x.size() != in_dim_) {
      throw ValidationError("head input size " + std::to_string(x.size()) +
                            " != in_dim " + std::to_string(in_dim_));
    }
  }

  std::vector<double> hidden_activations(const std::vector<double>& x) const {
    std::vector<double> h(hidden_);
    for (std::size_t k = 0; k < hidden_; ++k) {
      double acc = theta_[hidden_ * in_dim_ + k];
      for (std::size_t i = 0; i < in_dim_; ++i) {
        acc += theta_[k * in_dim_ + i] * x[i];
      }
      h[k] = std::tanh(acc);
    }
    return h;
  }

  std::size_t in_dim_ = 0;
  std::size_t hidden_ = 0;
  std::vector<double> theta_;
};

// ---------------------------------------------------------------------------
// Losses (values on probabilities; gradient variants further down)

// Mean negative log-likelihood of gold arc labels.
inline double dae_loss(const std::vector<double>& arc_p_factual,
                       const std::vector<Label>& arc_labels) {
  if (arc_p_factual.size() != arc_labels.size()) {
    throw ValidationError("arc probabilities not aligned with labels");
  }
  if (arc_p_factual.empty()) {
    throw ValidationError("dae_loss: no arcs");
  }
  double total = 0.0;
  for (std::size_t a = 0; a < arc_p_factual.size(); ++a) {
    const double p = clamp_prob(arc_p_factual[a]);
    total += -std::log(arc_labels[a] == Label::Factual ? p : 1.0 - p);
  }
  return total / static_cast<double>(arc_p_factual.size());
}

inline double sent_loss(double p_factual, Label gold) {
  const double p = clamp_prob(p_factual);
  return -std::log(gold == Label::Factual ? p : 1.0 - p);
}

// Arc index sets for the weak objective: F holds arcs constrained to be
// factual, free_arcs the rest (candidates for the required error).
struct WeakConstraintSet {
  std::vector<std::size_t> factual_arcs;
  std::vector<std::size_t> free_arcs;
  Label sentence_label = Label::Factual;
};

// Negated weak-supervision objective:
//   -sum_{a in F} log p_a - log(1 - prod_{a in free} p_a)
// The second term is the log-probability of at least one non-factual arc
// among the free arcs; it is omitted for factual sentences (empty free set).
inline double dae_weak_loss(const std::vector<double>& arc_p_factual,
                            const WeakConstraintSet& constraints) {
  if (constraints.free_arcs.empty() &&
      constraints.sentence_label == Label::NonFactual) {
    throw InfeasibleConstraintError(
        "non-factual sentence with no free arcs (second term is log 0)");
  }
  double loss = 0.0;
  for (std::size_t a : constraints.factual_arcs) {
    loss += -std::log(clamp_prob(arc_p_factual.at(a)));
  }
  if (!constraints.free_arcs.empty()) {
    double log_all_factual = 0.0;
    for (std::size_t a : constraints.free_arcs) {
      log_all_factual += std::log(clamp_prob(arc_p_factual.at(a)));
    }
    loss += -log1m_exp(log_all_factual);
  }
  return loss;
}

// ---------------------------------------------------------------------------
// Weak constraint construction

// Unordered lower-cased word pairs connected by a dependency anywhere in the
// parsed source; the stand-in for "arcs common with the source article".
inline std::set<std::pair<std::string, std::string>> dependency_word_pairs(
    const std::vector<std::string>& tokens, const ParserProvider& parser) {
  std::set<std::pair<std::string, std::string>> pairs;
  if (tokens.empty()) return pairs;
  const DependencyParse parse = parser.parse(tokens);
  for (const Arc& a : parse.arcs) {
    std::string h = lex::lower(tokens[a.head_index]);
    std::string c = lex::lower(tokens[a.child_index]);
    if (c < h) std::swap(h, c);
    pairs.insert({std::move(h), std::move(c)});
  }
  return pairs;
}

// For a factual sentence every arc lands in F. For a non-factual sentence F
// holds the arcs whose word pair occurs as a dependency in the source; the
// rest are free. A non-factual example with an empty free set is infeasible
// and must be dropped by the caller.
inline WeakConstraintSet build_weak_constraints(
    const AnnotatedExample& example,
    const std::set<std::pair<std::string, std::string>>& source_pairs) {
  WeakConstraintSet out;
  out.sentence_label = example.labels.sentence_label;
  const auto& arcs = example.summary.parse.arcs;
  const auto& tokens = example.summary.tokens;
  if (example.labels.sentence_label == Label::Factual) {
    for (std::size_t a = 0; a < arcs.size(); ++a) out.factual_arcs.push_back(a);
    return out;
  }
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    std::string h = lex::lower(tokens.at(arcs[a].head_index));
    std::string c = lex::lower(tokens.at(arcs[a].child_index));
    if (c < h) std::swap(h, c);
    if (source_pairs.count({h, c})) {
      out.factual_arcs.push_back(a);
    } else {
      out.free_arcs.push_back(a);
    }
  }
  if (out.free_arcs.empty()) {
    throw InfeasibleConstraintError(
        "every arc of non-factual example '" + example.id +
        "' is source-supported");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Per-example loss gradients through the head. Each returns the loss value
// and accumulates d loss / d theta into grad. Arcs whose factual probability
// sits at a clamp boundary contribute zero gradient.

namespace detail {

inline bool clamped(double p) { return p <= kProbEps || p >= 1.0 - kProbEps; }

}  // namespace detail

inline double dae_example_gradient(const ClassifierHead& head,
                                   const std::vector<std::vector<double>>& arc_inputs,
                                   const std::vector<Label>& labels,
                                   std::vector<double>& grad) {
  if (arc_inputs.size() != labels.size() || arc_inputs.empty()) {
    throw ValidationError("dae gradient: arcs not aligned with labels");
  }
  const double inv_n = 1.0 / static_cast<double>(arc_inputs.size());
  double loss = 0.0;
  for (std::size_t a = 0; a < arc_inputs.size(); ++a) {
    const auto p = head.probabilities(arc_inputs[a]);
    const std::size_t y = labels[a] == Label::Factual ? 0 : 1;
    loss += -std::log(clamp_prob(p[y])) * inv_n;
    if (detail::clamped(p[y])) continue;
    std::array<double, 2> dlogits{p[0] * inv_n, p[1] * inv_n};
    dlogits[y] -= inv_n;
    head.accumulate_gradient(arc_inputs[a], dlogits, grad);
  }
  return loss;
}

inline double sent_example_gradient(const ClassifierHead& head,
                                    const std::vector<double>& pooled, Label gold,
                                    std::vector<double>& grad) {
  const auto p = head.probabilities(pooled);
  const std::size_t y = gold == Label::Factual ? 0 : 1;
  const double loss = -std::log(clamp_prob(p[y]));
  if (!detail::clamped(p[y])) {
    std::array<double, 2> dlogits{p[0], p[1]};
    dlogits[y] -= 1.0;
    head.accumulate_gradient(pooled, dlogits, grad);
  }
  return loss;
}

inline double dae_weak_example_gradient(
    const ClassifierHead& head, const std::vector<std::vector<double>>& arc_inputs,
    const WeakConstraintSet& constraints, std::vector<double>& grad) {
  std::vector<std::array<double, 2>> probs;
  probs.reserve(arc_inputs.size());
  std::vector<double> p_factual(arc_inputs.size());
  for (std::size_t a = 0; a < arc_inputs.size(); ++a) {
    probs.push_back(head.probabilities(arc_inputs[a]));
    p_factual[a] = probs.back()[0];
  }
  const double loss = dae_weak_loss(p_factual, constraints);

  for (std::size_t a : constraints.factual_arcs) {
    if (detail::clamped(p_factual[a])) continue;
    // -d log p0 / d logits = p - e0
    const std::array<double, 2> dlogits{probs[a][0] - 1.0, probs[a][1]};
    head.accumulate_gradient(arc_inputs[a], dlogits, grad);
  }
  if (!constraints.free_arcs.empty()) {
    double log_all = 0.0;
    for (std::size_t a : constraints.free_arcs) {
      log_all += std::log(clamp_prob(p_factual[a]));
    }
    // d/dS of -log(1 - e^S) is e^S / (1 - e^S)
    const double coef = std::exp(log_all) / (-std::expm1(log_all));
    for (std::size_t a : constraints.free_arcs) {
      if (detail::clamped(p_factual[a])) continue;
      const std::array<double, 2> dlogits{coef * (1.0 - probs[a][0]),
                                          coef * (0.0 - probs[a][1])};
      head.accumulate_gradient(arc_inputs[a], dlogits, grad);
    }
  }
  return loss;
}

// ---------------------------------------------------------------------------
// Trained model: encoder + head + decision threshold

enum class ModelKind : std::uint8_t { Sent, Dae, DaeWeak };

inline const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Sent: return "sent";
    case ModelKind::Dae: return "dae";
    case ModelKind::DaeWeak: return "dae-weak";
  }
  return "?";
}

inline ModelKind model_kind_from_string(const std::string& s) {
  if (s == "sent") return ModelKind::Sent;
  if (s == "dae") return ModelKind::Dae;
  if (s == "dae-weak" || s == "dae_weak") return ModelKind::DaeWeak;
  throw ConfigError("unknown model kind '" + s + "' (sent|dae|dae-weak)");
}

struct SentencePrediction {
  Label label = Label::Factual;
  double score = 0.0;  // P(NonFactual): pooled for Sent, max over arcs otherwise
};

struct Localization {
  std::vector<Label> arc_labels;
  std::vector<double> arc_scores;  // P(NonFactual) per arc
  WordMask word_mask;
};

class FactualityModel {
 public:
  FactualityModel() = default;
  FactualityModel(ModelKind kind, std::shared_ptr<const EncoderProvider> encoder,
                  ClassifierHead head, double threshold = 0.5,
                  std::string encoder_key = "mock", EncoderOptions encoder_options = {})
      : kind_(kind),
        encoder_(std::move(encoder)),
        head_(std::move(head)),
        threshold_(threshold),
        encoder_key_(std::move(encoder_key)),
        encoder_options_(encoder_options) {
    if (threshold_ <= 0.0 || threshold_ >= 1.0) {
      throw ValidationError("threshold must lie in (0, 1)");
    }
  }

  ModelKind kind() const { return kind_; }
  const EncoderProvider& encoder() const { return *encoder_; }
  const ClassifierHead& head() const { return head_; }
  ClassifierHead& head() { return head_; }
  double threshold() const { return threshold_; }
  void set_threshold(double t) {
    if (t <= 0.0 || t >= 1.0) {
      throw ValidationError("threshold must lie in (0, 1)");
    }
    threshold_ = t;
  }
  const std::string& encoder_key() const { return encoder_key_; }
  const EncoderOptions& encoder_options() const { return encoder_options_; }

  // Independent per-arc P(NonFactual). Dae-family models only.
  std::vector<double> predict_arcs(const std::vector<std::string>& doc_tokens,
                                   const SummarySentence& summary) const {
    require_arc_kind("predict_arcs");
    const Encoding enc = encoder_->encode(doc_tokens, summary.tokens);
    std::vector<double> scores;
    scores.reserve(summary.parse.arcs.size());
    for (const Arc& arc : summary.parse.arcs) {
      scores.push_back(head_.probabilities(arc_representation(enc, arc))[1]);
    }
    return scores;
  }

  SentencePrediction predict_sentence(const std::vector<std::string>& doc_tokens,
                                      const SummarySentence& summary) const {
    SentencePrediction out;
    if (kind_ == ModelKind::Sent) {
      const Encoding enc = encoder_->encode(doc_tokens, summary.tokens);
      out.score = head_.probabilities(enc.pooled)[1];
    } else {
      const std::vector<double> scores = predict_arcs(doc_tokens, summary);
      out.score = 0.0;
      for (double s : scores) out.score = std::max(out.score, s);
      // Zero-arc summaries are factual by the aggregation convention.
    }
    out.label = out.score > threshold_ ? Label::NonFactual : Label::Factual;
    return out;
  }

  // Arc labels by threshold plus the derived word mask.
  Localization localize(const std::vector<std::string>& doc_tokens,
                        const SummarySentence& summary) const {
    require_arc_kind("localize");
    Localization out;
    out.arc_scores = predict_arcs(doc_tokens, summary);
    out.arc_labels.reserve(out.arc_scores.size());
    for (double s : out.arc_scores) {
      out.arc_labels.push_back(s > threshold_ ? Label::NonFactual : Label::Factual);
    }
    out.word_mask = arcs_to_words(summary.parse, out.arc_labels);
    return out;
  }

 private:
  void require_arc_kind(const char* op) const {
    if (kind_ == ModelKind::Sent) {
      throw ValidationError(std::string(op) +
                            ": requires an arc-level model (dae or dae-weak)");
    }
  }

  ModelKind kind_ = ModelKind::Dae;
  std::shared_ptr<const EncoderProvider> encoder_;
  ClassifierHead head_;
  double threshold_ = 0.5;
  std::string encoder_key_ = "mock";
  EncoderOptions encoder_options_;
};

// Head snapshot taken at a dev-evaluation step during training.
struct CheckpointRecord {
  long long step = 0;
  std::vector<double> theta;
  std::optional<double> dev_metric;  // sentence balanced accuracy
};

// ---------------------------------------------------------------------------
// Model directory I/O: config.json + head.json (+ training artifacts written
// by the trainer: checkpoints/, dev_curve.tsv)

inline void save_model(const std::string& dir, const FactualityModel& model) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  nlohmann::json config;
  config["kind"] = to_string(model.kind());
  config["threshold"] = model.threshold();
  config["encoder"] = model.encoder_key();
  config["encoder_dim"] = model.encoder_options().dim;
  config["encoder_seed"] = model.encoder_options().seed;
  config["max_seq"] = model.encoder_options().max_seq;
  config["in_dim"] = model.head().in_dim();
  config["hidden"] = model.head().hidden();
  std::ofstream cfg(fs::path(dir) / "config.json");
  if (!cfg) throw IoError("cannot write model config in '" + dir + "'");
  cfg << config.dump(2) << '\n';

  nlohmann::json head;
  head["theta"] = model.head().theta();
  std::ofstream hd(fs::path(dir) / "head.json");
  if (!hd) throw IoError("cannot write model head in '" + dir + "'");
  hd << head.dump() << '\n';
}

inline FactualityModel load_model(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream cfg(fs::path(dir) / "config.json");
  if (!cfg) throw IoError("cannot read model config in '" + dir + "'");
  nlohmann::json config = nlohmann::json::parse(cfg);
  std::ifstream hd(fs::path(dir) / "head.json");
  if (!hd) throw IoError("cannot read model head in '" + dir + "'");
  nlohmann::json head_json = nlohmann::json::parse(hd);

  EncoderOptions options;
  options.dim = config.at("encoder_dim").get<std::size_t>();
  options.seed = config.at("encoder_seed").get<std::uint64_t>();
  options.max_seq = config.at("max_seq").get<std::size_t>();
  ClassifierHead head(config.at("in_dim").get<std::size_t>(),
                      config.at("hidden").get<std::size_t>());
  head.theta() = head_json.at("theta").get<std::vector<double>>();
  if (head.theta().size() !=
      ClassifierHead::param_count(head.in_dim(), head.hidden())) {
    throw ValidationError("head.json: parameter count mismatch");
  }
  const std::string encoder_key = config.at("encoder").get<std::string>();
  return FactualityModel(model_kind_from_string(config.at("kind").get<std::string>()),
                         make_encoder(encoder_key, options), std::move(head),
                         config.at("threshold").get<double>(), encoder_key, options);
}

}  // namespace factspan
