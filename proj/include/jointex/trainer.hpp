#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "jointex/eval.hpp"
#include "jointex/model.hpp"
#include "jointex/rng.hpp"

namespace jointex {

// Worst-case input perturbation settings. The magnitude is derived from the
// scaling factor: epsilon = alpha * sqrt(D) with D the width of the
// concatenated token representation.
struct AdvConfig {
  bool enabled = false;
  double alpha = 1e-3;
  bool per_token_norm = false;  // normalize each row instead of the whole input

  double epsilon_for(std::size_t input_dim) const;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction over the trainable entries of a ParameterStore.
// update() consumes and zeroes the accumulated gradients.
class AdamState {
 public:
  AdamState(const ParameterStore& params, AdamConfig config);

  void update();

  std::size_t step_count() const { return step_; }
  const AdamConfig& config() const { return config_; }
  const std::vector<std::vector<double>>& first_moments() const { return m_; }
  const std::vector<std::vector<double>>& second_moments() const { return v_; }

 private:
  AdamConfig config_;
  std::size_t step_ = 0;
  std::vector<std::pair<std::string, Tensor>> params_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

// eta = epsilon * g / ||g||. With per_token_norm each row is scaled to
// epsilon independently. A zero gradient yields a zero perturbation and a
// warning.
Tensor adversarial_perturbation(const Tensor& g, double epsilon,
                                bool per_token_norm = false);

// Forward + backward against frozen parameter values, returning the loss
// gradient at the concatenated input representation. Parameter gradients
// accumulated by this pass are discarded; values and optimizer moments are
// untouched.
struct InputGradient {
  Tensor grad;      // n x D
  Tensor embedded;  // n x D input values
  double loss = 0.0;
};
InputGradient input_gradient(JointModel& model, const EncodedSentence& sentence,
                             bool training, Rng& rng);

struct StepMetrics {
  double loss_clean = 0.0;
  double loss_adv = 0.0;
  double grad_norm = 0.0;
};

// One optimization step on one sentence. With adversarial training disabled
// this is exactly a clean forward/backward/update. Enabled, it computes the
// input gradient against frozen parameters, builds the perturbation, and
// updates on the sum of the clean and perturbed losses.
StepMetrics adversarial_step(JointModel& model, const EncodedSentence& sentence,
                             const AdvConfig& adv, AdamState& adam, Rng& rng);

struct EarlyStopState {
  explicit EarlyStopState(std::size_t patience_epochs)
      : patience(patience_epochs) {}

  // Returns true when the metric strictly improved.
  bool observe(double metric, std::size_t epoch);
  bool should_stop() const { return epochs_since_improvement >= patience; }

  double best_metric = -std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;
  std::size_t patience = 0;
  std::size_t epochs_since_improvement = 0;
};

struct FitConfig {
  std::size_t max_epochs = 100;
  std::size_t patience = 30;
  std::uint64_t seed = 42;
  EvalMode eval_mode = EvalMode::Strict;
  AdamConfig adam;
  AdvConfig adv;
  std::filesystem::path output_dir;  // empty: keep everything in memory
};

struct EpochMetrics {
  std::size_t epoch = 0;
  EvalReport train_eval;
  EvalReport dev_eval;
  double train_loss_clean = 0.0;
  double train_loss_adv = 0.0;
  double dev_loss = 0.0;
};

struct FitReport {
  std::vector<EpochMetrics> epochs;
  std::size_t best_epoch = 0;
  double best_overall_f1 = 0.0;
  bool stopped_early = false;
  std::filesystem::path metrics_csv;
  std::filesystem::path best_checkpoint;
};

extern const char kMetricsCsvHeader[];

// Shuffled sentence-level epochs with per-epoch train/dev evaluation, best
// checkpoint tracking on dev overall F1, and early stopping.
FitReport fit(JointModel& model, const std::vector<AnnotatedSentence>& train,
              const std::vector<AnnotatedSentence>& dev, const FitConfig& config);

}  // namespace jointex
