#include "jointex/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>

#include "jointex/checkpoint.hpp"
#include "jointex/errors.hpp"
#include "jointex/tape.hpp"

namespace jointex {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

const char kMetricsCsvHeader[] =
    "epoch,split,ent_p,ent_r,ent_f1,rel_p,rel_r,rel_f1,overall_f1,"
    "loss_clean,loss_adv";

double AdvConfig::epsilon_for(std::size_t input_dim) const {
  return alpha * std::sqrt(static_cast<double>(input_dim));
}

AdamState::AdamState(const ParameterStore& params, AdamConfig config)
    : config_(config), params_(params.trainable()) {
  for (const auto& [name, t] : params_) {
    m_.emplace_back(t.size(), 0.0);
    v_.emplace_back(t.size(), 0.0);
  }
}

void AdamState::update() {
  ++step_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
  for (std::size_t p = 0; p < params_.size(); ++p) {
    Tensor& t = params_[p].second;
    if (!t.has_grad()) {
      throw Error("adam update: no gradient for trainable parameter " +
                  params_[p].first);
    }
    const auto& g = t.grad();
    auto& m = m_[p];
    auto& v = v_[p];
    for (std::size_t i = 0; i < g.size(); ++i) {
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g[i];
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      t[i] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.eps);
    }
    t.zero_grad();
  }
}

Tensor adversarial_perturbation(const Tensor& g, double epsilon,
                                bool per_token_norm) {
  Tensor eta = Tensor::zeros(g.shape());
  if (per_token_norm && g.rank() == 2) {
    const std::size_t rows = g.dim(0), cols = g.dim(1);
    for (std::size_t i = 0; i < rows; ++i) {
      double norm = 0.0;
      for (std::size_t j = 0; j < cols; ++j) norm += g.at(i, j) * g.at(i, j);
      norm = std::sqrt(norm);
      if (norm == 0.0) {
        std::cerr << "warning: zero input gradient row, zero perturbation\n";
        continue;
      }
      for (std::size_t j = 0; j < cols; ++j) {
        eta.at(i, j) = epsilon * g.at(i, j) / norm;
      }
    }
    return eta;
  }
  const double norm = value_l2_norm(g);
  if (norm == 0.0) {
    std::cerr << "warning: zero input gradient, zero perturbation\n";
    return eta;
  }
  for (std::size_t i = 0; i < g.size(); ++i) eta[i] = epsilon * g[i] / norm;
  return eta;
}

InputGradient input_gradient(JointModel& model, const EncodedSentence& sentence,
                             bool training, Rng& rng) {
  Tape tape;
  ForwardResult r = model.forward(tape, sentence, training, rng);
  tape.backward(r.loss_joint);

  InputGradient out;
  out.embedded = r.embedded_input.detached_copy();
  out.grad = Tensor::from_values(r.embedded_input.shape(),
                                 r.embedded_input.grad());
  out.loss = r.loss_joint.item();
  // This pass only serves to produce g; drop what it pushed into the
  // parameter gradients.
  model.params().zero_grads();
  return out;
}

StepMetrics adversarial_step(JointModel& model, const EncodedSentence& sentence,
                             const AdvConfig& adv, AdamState& adam, Rng& rng) {
  StepMetrics metrics;
  if (!adv.enabled) {
    Tape tape;
    ForwardResult r = model.forward(tape, sentence, /*training=*/true, rng);
    metrics.loss_clean = r.loss_joint.item();
    tape.backward(r.loss_joint);
    adam.update();
    return metrics;
  }

  InputGradient ig = input_gradient(model, sentence, /*training=*/true, rng);
  metrics.grad_norm = value_l2_norm(ig.grad);
  const double epsilon = adv.epsilon_for(model.input_dim());
  Tensor eta = adversarial_perturbation(ig.grad, epsilon, adv.per_token_norm);

  Tape tape;
  ForwardResult clean = model.forward(tape, sentence, /*training=*/true, rng);
  ForwardResult perturbed =
      model.forward(tape, sentence, /*training=*/true, rng, &eta);
  Tensor total = tape.add(clean.loss_joint, perturbed.loss_joint);
  metrics.loss_clean = clean.loss_joint.item();
  metrics.loss_adv = perturbed.loss_joint.item();
  tape.backward(total);
  adam.update();
  return metrics;
}

bool EarlyStopState::observe(double metric, std::size_t epoch) {
  if (metric > best_metric) {
    best_metric = metric;
    best_epoch = epoch;
    epochs_since_improvement = 0;
    return true;
  }
  ++epochs_since_improvement;
  return false;
}

namespace {

std::string csv_metrics_row(std::size_t epoch, const std::string& split,
                            const EvalReport& report, double loss_clean,
                            double loss_adv) {
  std::string row = std::to_string(epoch) + "," + split;
  row += "," + fmt(report.entity.precision) + "," + fmt(report.entity.recall) +
         "," + fmt(report.entity.f1);
  row += "," + fmt(report.relation.precision) + "," +
         fmt(report.relation.recall) + "," + fmt(report.relation.f1);
  row += "," + fmt(report.overall_f1);
  row += "," + fmt(loss_clean) + "," + fmt(loss_adv);
  return row;
}

EvalReport evaluate_model(JointModel& model,
                          const std::vector<AnnotatedSentence>& gold,
                          EvalMode mode) {
  std::vector<Prediction> preds;
  preds.reserve(gold.size());
  for (const AnnotatedSentence& s : gold) preds.push_back(model.predict(s.tokens));
  return evaluate_corpus(gold, preds, mode, model.config().mode);
}

double mean_clean_loss(JointModel& model,
                       const std::vector<EncodedSentence>& sentences,
                       Rng& rng) {
  if (sentences.empty()) return 0.0;
  double total = 0.0;
  for (const EncodedSentence& s : sentences) {
    Tape tape(/*recording=*/false);
    total += model.forward(tape, s, /*training=*/false, rng).loss_joint.item();
  }
  return total / static_cast<double>(sentences.size());
}

std::vector<EncodedSentence> encode_corpus(
    JointModel& model, const std::vector<AnnotatedSentence>& sentences,
    const std::string& name) {
  if (sentences.empty()) throw DataError(name + " corpus is empty");
  const auto violations = validate_head_convention(sentences);
  if (!violations.empty()) {
    throw DataError(name + " corpus violates the head convention: " +
                    violations.front() + " (" +
                    std::to_string(violations.size()) + " total)");
  }
  std::vector<EncodedSentence> out;
  out.reserve(sentences.size());
  for (const AnnotatedSentence& s : sentences) out.push_back(model.encode(s));
  return out;
}

}  // namespace

FitReport fit(JointModel& model, const std::vector<AnnotatedSentence>& train,
              const std::vector<AnnotatedSentence>& dev,
              const FitConfig& config) {
  // Surface corpus problems before any training step.
  std::vector<EncodedSentence> train_enc = encode_corpus(model, train, "train");
  std::vector<EncodedSentence> dev_enc = encode_corpus(model, dev, "dev");

  FitReport report;
  std::ofstream csv;
  if (!config.output_dir.empty()) {
    std::filesystem::create_directories(config.output_dir);
    report.metrics_csv = config.output_dir / "metrics.csv";
    report.best_checkpoint = config.output_dir / "best.ckpt";
    csv.open(report.metrics_csv, std::ios::binary);
    if (!csv) throw DataError("cannot write " + report.metrics_csv.string());
    csv << kMetricsCsvHeader << "\n";
  }

  Rng rng(config.seed);
  AdamState adam(model.params(), config.adam);
  EarlyStopState stopper(config.patience);
  std::vector<std::size_t> order(train_enc.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double clean_sum = 0.0, adv_sum = 0.0;
    for (std::size_t idx : order) {
      StepMetrics m = adversarial_step(model, train_enc[idx], config.adv, adam, rng);
      clean_sum += m.loss_clean;
      adv_sum += m.loss_adv;
    }

    EpochMetrics em;
    em.epoch = epoch;
    em.train_loss_clean = clean_sum / static_cast<double>(train_enc.size());
    em.train_loss_adv = adv_sum / static_cast<double>(train_enc.size());
    em.train_eval = evaluate_model(model, train, config.eval_mode);
    em.dev_eval = evaluate_model(model, dev, config.eval_mode);
    em.dev_loss = mean_clean_loss(model, dev_enc, rng);

    if (csv.is_open()) {
      csv << csv_metrics_row(epoch, "train", em.train_eval, em.train_loss_clean,
                             em.train_loss_adv)
          << "\n";
      csv << csv_metrics_row(epoch, "dev", em.dev_eval, em.dev_loss, 0.0) << "\n";
      csv.flush();
    }
    std::cerr << "epoch " << epoch << ": train loss " << em.train_loss_clean
              << ", dev overall F1 " << em.dev_eval.overall_f1 << "\n";

    const bool improved = stopper.observe(em.dev_eval.overall_f1, epoch);
    if (improved && !config.output_dir.empty()) {
      save_checkpoint(model, report.best_checkpoint);
    }
    report.epochs.push_back(std::move(em));
    if (stopper.should_stop()) {
      report.stopped_early = true;
      break;
    }
  }

  report.best_epoch = stopper.best_epoch;
  report.best_overall_f1 = stopper.best_metric;
  return report;
}

}  // namespace jointex
