#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "jointex/eval.hpp"
#include "jointex/model.hpp"
#include "jointex/trainer.hpp"

namespace jointex {

// Flat key-value run configuration. Every key has a default except the
// corpus paths; unknown keys are rejected. CLI flags override file values,
// and JOINTEX_SEED is used when no seed is given anywhere.
struct RunConfig {
  // paths
  std::string train_corpus;
  std::string dev_corpus;
  std::string test_corpus;
  std::string embeddings;
  std::string checkpoint;
  std::string output_dir = "runs/default";

  // model
  std::size_t word_dim = 50;
  std::size_t char_dim = 25;
  std::size_t char_hidden = 25;
  std::size_t hidden = 64;
  std::size_t rel_hidden = 64;
  std::size_t label_dim = 25;
  double dropout = 0.2;
  std::string mode = "ner-crf";  // or "ec-softmax"
  bool constrain_bio = true;
  double rel_threshold = 0.5;
  bool teacher_forcing = false;
  bool train_word_embeddings = true;

  // trainer
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t patience = 30;
  std::size_t max_epochs = 100;
  std::uint64_t seed = 42;
  std::string eval_mode = "S";

  // adversarial training
  bool adv_enabled = false;
  double alpha = 1e-3;
  bool adv_per_token_norm = false;

  static RunConfig from_file(const std::filesystem::path& path);
  static RunConfig from_json_text(const std::string& text,
                                  const std::string& source);
  std::string to_json_text() const;
  void save(const std::filesystem::path& path) const;

  void validate() const;  // throws ConfigError

  ModelConfig model_config() const;
  FitConfig fit_config() const;
};

struct TrainOverrides {
  std::optional<double> alpha;
  std::optional<bool> adv_enabled;
  std::optional<std::uint64_t> seed;
};

}  // namespace jointex
