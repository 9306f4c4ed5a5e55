#pragma once

// Training loop for the factuality models: Adam with linear learning-rate
// decay and global gradient-norm clipping, dev-set balanced accuracy at a
// fixed step cadence, and checkpoint bookkeeping. Single-threaded and fully
// deterministic given (data, hyperparameters, seed).

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "factspan/encoder.hpp"
#include "factspan/error.hpp"
#include "factspan/metrics.hpp"
#include "factspan/model.hpp"
#include "factspan/providers.hpp"
#include "factspan/rng.hpp"
#include "factspan/types.hpp"

namespace factspan {

// Defaults follow the standard fine-tuning recipe for this model family:
// Adam(0.9, 0.999, 1e-8), lr 2e-5 with linear decay, no warmup, no weight
// decay, gradient norm clipped at 1, batch 8, 3 epochs, sequence budget 512.
struct Hyperparams {
  double lr = 2e-5;
  std::size_t batch_size = 8;
  std::size_t epochs = 3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double weight_decay = 0.0;
  double max_grad_norm = 1.0;
  std::size_t warmup_steps = 0;
  std::size_t eval_every = 100;
  std::size_t hidden = 0;  // 0 = single affine classification layer
  double threshold = 0.5;
  // Plumbed for real encoder backends; the mock encoder has no trainable
  // parameters, so this is a no-op in hermetic runs.
  bool freeze_encoder = false;
};

struct TrainStats {
  std::size_t train_examples_used = 0;
  std::size_t dropped_missing_labels = 0;  // wrong-granularity or zero-arc
  std::size_t dropped_infeasible = 0;      // weak constraints unsatisfiable
  std::size_t steps = 0;
  double final_train_loss = 0.0;
};

struct TrainResult {
  FactualityModel model;  // best dev checkpoint
  std::vector<CheckpointRecord> checkpoints;
  long long best_step = 0;
  TrainStats stats;
};

namespace detail {

// Precomputed per-example training inputs.
struct PreparedExample {
  std::vector<std::vector<double>> arc_inputs;  // dae / dae-weak
  std::vector<Label> arc_labels;                // dae
  WeakConstraintSet constraints;                // dae-weak
  std::vector<double> pooled;                   // sent
  Label sentence_label = Label::Factual;
};

class Adam {
 public:
  Adam(std::size_t n, const Hyperparams& hp) : hp_(hp), m_(n, 0.0), v_(n, 0.0) {}

  void step(std::vector<double>& theta, std::vector<double>& grad, double lr) {
    ++t_;
    double norm_sq = 0.0;
    for (double g : grad) norm_sq += g * g;
    const double norm = std::sqrt(norm_sq);
    if (hp_.max_grad_norm > 0.0 && norm > hp_.max_grad_norm) {
      const double scale = hp_.max_grad_norm / norm;
      for (double& g : grad) g *= scale;
    }
    const double bc1 = 1.0 - std::pow(hp_.adam_beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(hp_.adam_beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < theta.size(); ++i) {
      double g = grad[i];
      if (hp_.weight_decay > 0.0) g += hp_.weight_decay * theta[i];
      m_[i] = hp_.adam_beta1 * m_[i] + (1.0 - hp_.adam_beta1) * g;
      v_[i] = hp_.adam_beta2 * v_[i] + (1.0 - hp_.adam_beta2) * g * g;
      const double m_hat = m_[i] / bc1;
      const double v_hat = v_[i] / bc2;
      theta[i] -= lr * m_hat / (std::sqrt(v_hat) + hp_.adam_eps);
    }
  }

 private:
  Hyperparams hp_;
  long long t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

inline double scheduled_lr(const Hyperparams& hp, std::size_t step,
                           std::size_t total_steps) {
  if (hp.warmup_steps > 0 && step < hp.warmup_steps) {
    return hp.lr * static_cast<double>(step + 1) /
           static_cast<double>(hp.warmup_steps);
  }
  if (total_steps <= hp.warmup_steps) return hp.lr;
  const double remaining = static_cast<double>(total_steps - step);
  const double span = static_cast<double>(total_steps - hp.warmup_steps);
  return hp.lr * std::max(0.0, remaining / span);
}

}  // namespace detail

// Trains a factuality model of the given kind. Label requirements: dae
// needs per-arc labels, dae-weak and sent need sentence labels. For
// dae-weak, source-side dependency pairs come from doc_parser (weak
// constraint construction); infeasible examples are dropped and counted.
// Returns the checkpoint with the best dev sentence balanced accuracy
// (ties resolved toward the earliest step) plus the full checkpoint series.
inline TrainResult train(ModelKind kind,
                         const std::vector<AnnotatedExample>& train_examples,
                         const std::vector<AnnotatedExample>& dev_examples,
                         const Hyperparams& hp, std::uint64_t seed,
                         std::shared_ptr<const EncoderProvider> encoder,
                         const std::string& encoder_key = "mock",
                         EncoderOptions encoder_options = {},
                         const ParserProvider* doc_parser = nullptr) {
  if (train_examples.empty()) {
    throw ValidationError("train: empty training set");
  }
  if (dev_examples.empty()) {
    throw ValidationError("train: empty dev set");
  }
  {
    bool has_factual = false, has_nonfactual = false;
    for (const AnnotatedExample& ex : dev_examples) {
      (ex.labels.sentence_label == Label::Factual ? has_factual : has_nonfactual) =
          true;
    }
    if (!has_factual || !has_nonfactual) {
      throw ValidationError(
          "train: dev set must contain both sentence classes for balanced "
          "accuracy");
    }
  }
  if (kind == ModelKind::Dae) {
    for (const AnnotatedExample& ex : train_examples) {
      if (!ex.labels.arc_labels && !ex.summary.parse.arcs.empty()) {
        throw ValidationError("train: dae requires arc labels on '" + ex.id + "'");
      }
    }
  }
  if (kind == ModelKind::DaeWeak && doc_parser == nullptr) {
    throw ValidationError("train: dae-weak requires a document parser provider");
  }

  TrainStats stats;
  const std::size_t dim = encoder->dim();
  const std::size_t in_dim = kind == ModelKind::Sent ? dim : 2 * dim;

  std::vector<detail::PreparedExample> prepared;
  prepared.reserve(train_examples.size());
  for (const AnnotatedExample& ex : train_examples) {
    detail::PreparedExample pe;
    pe.sentence_label = ex.labels.sentence_label;
    const Encoding enc = encoder->encode(ex.document.tokens, ex.summary.tokens);
    if (kind == ModelKind::Sent) {
      pe.pooled = enc.pooled;
    } else {
      if (ex.summary.parse.arcs.empty()) {
        ++stats.dropped_missing_labels;
        continue;
      }
      for (const Arc& arc : ex.summary.parse.arcs) {
        pe.arc_inputs.push_back(arc_representation(enc, arc));
      }
      if (kind == ModelKind::Dae) {
        pe.arc_labels = *ex.labels.arc_labels;
      } else {
        try {
          pe.constraints = build_weak_constraints(
              ex, dependency_word_pairs(ex.document.tokens, *doc_parser));
        } catch (const InfeasibleConstraintError&) {
          ++stats.dropped_infeasible;
          continue;
        }
      }
    }
    prepared.push_back(std::move(pe));
  }
  if (prepared.empty()) {
    throw ValidationError("train: no usable training examples after filtering");
  }
  stats.train_examples_used = prepared.size();

  // Dev encodings are fixed; only the head changes between evaluations.
  struct DevExample {
    Encoding encoding;
    const AnnotatedExample* example;
  };
  std::vector<DevExample> dev;
  dev.reserve(dev_examples.size());
  for (const AnnotatedExample& ex : dev_examples) {
    dev.push_back({encoder->encode(ex.document.tokens, ex.summary.tokens), &ex});
  }
  auto dev_balanced_acc = [&](const ClassifierHead& head) {
    std::vector<Label> gold, pred;
    gold.reserve(dev.size());
    for (const DevExample& d : dev) {
      gold.push_back(d.example->labels.sentence_label);
      double score = 0.0;
      if (kind == ModelKind::Sent) {
        score = head.probabilities(d.encoding.pooled)[1];
      } else {
        for (const Arc& arc : d.example->summary.parse.arcs) {
          score = std::max(score,
                           head.probabilities(arc_representation(d.encoding, arc))[1]);
        }
      }
      pred.push_back(score > hp.threshold ? Label::NonFactual : Label::Factual);
    }
    return balanced_accuracy(gold, pred);
  };

  Rng init_rng = Rng::child(seed, "init");
  ClassifierHead head = ClassifierHead::random_init(in_dim, hp.hidden, init_rng);

  const std::size_t steps_per_epoch =
      (prepared.size() + hp.batch_size - 1) / std::max<std::size_t>(hp.batch_size, 1);
  const std::size_t total_steps = steps_per_epoch * hp.epochs;

  TrainResult result;
  auto record_checkpoint = [&](long long step) {
    result.checkpoints.push_back(
        CheckpointRecord{step, head.theta(), dev_balanced_acc(head)});
  };
  record_checkpoint(0);

  detail::Adam adam(head.theta().size(), hp);
  std::vector<std::size_t> order(prepared.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::size_t step = 0;
  double last_loss = 0.0;
  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    Rng shuffle_rng = Rng::child(seed, "shuffle", std::to_string(epoch));
    shuffle_rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += hp.batch_size) {
      const std::size_t stop = std::min(order.size(), start + hp.batch_size);
      std::vector<double> grad(head.theta().size(), 0.0);
      double batch_loss = 0.0;
      for (std::size_t k = start; k < stop; ++k) {
        const detail::PreparedExample& pe = prepared[order[k]];
        switch (kind) {
          case ModelKind::Sent:
            batch_loss +=
                sent_example_gradient(head, pe.pooled, pe.sentence_label, grad);
            break;
          case ModelKind::Dae:
            batch_loss +=
                dae_example_gradient(head, pe.arc_inputs, pe.arc_labels, grad);
            break;
          case ModelKind::DaeWeak:
            batch_loss +=
                dae_weak_example_gradient(head, pe.arc_inputs, pe.constraints, grad);
            break;
        }
      }
      const double inv_b = 1.0 / static_cast<double>(stop - start);
      for (double& g : grad) g *= inv_b;
      batch_loss *= inv_b;
      adam.step(head.theta(), grad, detail::scheduled_lr(hp, step, total_steps));
      ++step;
      last_loss = batch_loss;
      if (hp.eval_every > 0 && step % hp.eval_every == 0 && step < total_steps) {
        record_checkpoint(static_cast<long long>(step));
      }
    }
  }
  if (total_steps > 0) {
    record_checkpoint(static_cast<long long>(total_steps));
  }
  stats.steps = step;
  stats.final_train_loss = last_loss;

  std::size_t best = 0;
  for (std::size_t i = 1; i < result.checkpoints.size(); ++i) {
    if (result.checkpoints[i].dev_metric > result.checkpoints[best].dev_metric) {
      best = i;
    }
  }
  result.best_step = result.checkpoints[best].step;
  ClassifierHead best_head(in_dim, hp.hidden);
  best_head.theta() = result.checkpoints[best].theta;
  result.model = FactualityModel(kind, std::move(encoder), std::move(best_head),
                                 hp.threshold, encoder_key, encoder_options);
  result.stats = stats;
  return result;
}

}  // namespace factspan
