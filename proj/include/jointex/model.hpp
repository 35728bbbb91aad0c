#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "jointex/data.hpp"
#include "jointex/layers.hpp"
#include "jointex/ner.hpp"
#include "jointex/relation.hpp"
#include "jointex/tagset.hpp"

namespace jointex {

// All model tensors by stable unique name, in registration order. Trainable
// entries are the ones whose tensor requires grad.
class ParameterStore {
 public:
  void add(const std::string& name, Tensor t);
  const Tensor& get(const std::string& name) const;
  bool contains(const std::string& name) const;
  const std::vector<std::pair<std::string, Tensor>>& entries() const {
    return entries_;
  }
  std::vector<std::pair<std::string, Tensor>> trainable() const;
  void zero_grads();

 private:
  std::vector<std::pair<std::string, Tensor>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class ModelMode { NerCrf, EcSoftmax };

struct ModelConfig {
  std::size_t word_dim = 50;
  std::size_t char_dim = 25;
  std::size_t char_hidden = 25;  // per direction
  std::size_t hidden = 64;       // encoder LSTM size per direction
  std::size_t rel_hidden = 64;
  std::size_t label_dim = 25;
  double dropout = 0.2;
  ModelMode mode = ModelMode::NerCrf;
  bool constrain_bio = true;
  double rel_threshold = 0.5;
  bool teacher_forcing = false;  // gold tags for label embeddings in training
  bool train_word_embeddings = true;
};

// A sentence mapped into model id space.
struct EncodedSentence {
  std::vector<std::string> tokens;
  std::vector<std::size_t> word_ids;
  std::vector<std::vector<std::size_t>> char_ids;
  std::vector<std::size_t> gold_tags;  // scheme ids
  RelationArcs gold_arcs;              // relation label ids
  std::size_t size() const { return word_ids.size(); }
};

struct ForwardResult {
  Tensor loss_ner;
  Tensor loss_rel;
  Tensor loss_joint;
  Tensor embedded_input;  // n x D concatenated token representations
  std::vector<std::size_t> label_tags;  // tags used for label embeddings
};

struct Prediction {
  std::vector<std::string> tags;
  std::vector<std::vector<TokenArc>> arcs;
};

// Embeddings -> shared BiLSTM -> entity head (CRF or softmax) -> relation
// head, trained on the sum of both losses.
class JointModel {
 public:
  JointModel(ModelConfig config, Vocab vocab, TagScheme tags,
             std::vector<std::string> relation_labels, Rng& rng,
             std::optional<EmbeddingTable> pretrained_words = std::nullopt);

  EncodedSentence encode(const AnnotatedSentence& sentence) const;

  // Computes both losses. The returned embedded_input always collects its
  // gradient during backward; input_perturbation, when given, is added to it
  // before the encoder (n x D, values only).
  ForwardResult forward(Tape& tape, const EncodedSentence& sentence,
                        bool training, Rng& rng,
                        const Tensor* input_perturbation = nullptr);

  Prediction predict(const std::vector<std::string>& tokens) const;

  const ModelConfig& config() const { return config_; }
  const Vocab& vocab() const { return vocab_; }
  const TagScheme& tags() const { return tags_; }
  const std::vector<std::string>& relation_labels() const { return relations_; }
  std::size_t input_dim() const;  // D = word_dim + 2 * char_hidden

  ParameterStore& params() { return params_; }
  const ParameterStore& params() const { return params_; }

 private:
  struct EncoderOut {
    Tensor embedded;  // n x D, pre-perturbation
    Tensor encoded;   // n x 2H
  };
  EncoderOut run_encoder(Tape& tape, const EncodedSentence& sentence,
                         bool training, Rng& rng,
                         const Tensor* input_perturbation) const;
  std::vector<std::size_t> decode_tags(const Tensor& encoded) const;
  void register_params();

  ModelConfig config_;
  Vocab vocab_;
  TagScheme tags_;
  std::vector<std::string> relations_;

  EmbeddingTable word_table_;
  EmbeddingTable char_table_;
  EmbeddingTable label_table_;
  LstmParams char_fwd_;
  LstmParams char_bwd_;
  LstmParams enc_fwd_;
  LstmParams enc_bwd_;
  std::optional<CrfParams> crf_;
  std::optional<EmissionParams> ec_;
  RelScorerParams rel_;
  ParameterStore params_;
};

}  // namespace jointex
