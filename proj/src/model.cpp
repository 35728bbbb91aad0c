#include "jointex/model.hpp"

#include "jointex/errors.hpp"

namespace jointex {

void ParameterStore::add(const std::string& name, Tensor t) {
  if (index_.count(name)) throw Error("duplicate parameter name: " + name);
  index_[name] = entries_.size();
  entries_.emplace_back(name, std::move(t));
}

const Tensor& ParameterStore::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error("unknown parameter: " + name);
  return entries_[it->second].second;
}

bool ParameterStore::contains(const std::string& name) const {
  return index_.count(name) > 0;
}

std::vector<std::pair<std::string, Tensor>> ParameterStore::trainable() const {
  std::vector<std::pair<std::string, Tensor>> out;
  for (const auto& e : entries_) {
    if (e.second.requires_grad()) out.push_back(e);
  }
  return out;
}

void ParameterStore::zero_grads() {
  for (auto& e : entries_) e.second.zero_grad();
}

namespace {

EmbeddingTable make_word_table(const ModelConfig& config, const Vocab& vocab,
                               Rng& rng,
                               std::optional<EmbeddingTable>& pretrained) {
  if (pretrained.has_value()) {
    if (pretrained->vocab_size() != vocab.word_count()) {
      throw DataError("pretrained table does not cover the vocabulary");
    }
    return std::move(*pretrained);
  }
  return EmbeddingTable(vocab.word_count(), config.word_dim,
                        config.train_word_embeddings, rng);
}

}  // namespace

JointModel::JointModel(ModelConfig config, Vocab vocab, TagScheme tags,
                       std::vector<std::string> relation_labels, Rng& rng,
                       std::optional<EmbeddingTable> pretrained_words)
    : config_(config),
      vocab_(std::move(vocab)),
      tags_(std::move(tags)),
      relations_(std::move(relation_labels)),
      word_table_(make_word_table(config, vocab_, rng, pretrained_words)),
      char_table_(vocab_.char_count(), config.char_dim, true, rng),
      label_table_(tags_.size(), config.label_dim, true, rng),
      char_fwd_(config.char_dim, config.char_hidden, rng),
      char_bwd_(config.char_dim, config.char_hidden, rng),
      enc_fwd_(word_table_.dim() + 2 * config.char_hidden, config.hidden, rng),
      enc_bwd_(word_table_.dim() + 2 * config.char_hidden, config.hidden, rng),
      rel_(2 * config.hidden + config.label_dim, config.rel_hidden,
           relations_.size(), rng) {
  config_.word_dim = word_table_.dim();
  if (relations_.empty() || relations_[0] != "N") {
    throw DataError("relation label list must start with N");
  }
  if ((config_.mode == ModelMode::NerCrf) != tags_.bio_mode()) {
    throw ConfigError("model mode does not match tag scheme");
  }
  const std::size_t feature_dim = 2 * config_.hidden;
  if (config_.mode == ModelMode::NerCrf) {
    crf_.emplace(feature_dim, tags_.size(), rng);
  } else {
    ec_.emplace(feature_dim, tags_.size(), rng);
  }
  register_params();
}

void JointModel::register_params() {
  params_.add("embeddings.word", word_table_.weights);
  params_.add("embeddings.char", char_table_.weights);
  params_.add("embeddings.label", label_table_.weights);
  auto add_lstm = [this](const std::string& prefix, const LstmParams& p) {
    params_.add(prefix + ".input_weights", p.input_weights);
    params_.add(prefix + ".hidden_weights", p.hidden_weights);
    params_.add(prefix + ".bias", p.bias);
  };
  add_lstm("char_lstm.fwd", char_fwd_);
  add_lstm("char_lstm.bwd", char_bwd_);
  add_lstm("encoder.fwd", enc_fwd_);
  add_lstm("encoder.bwd", enc_bwd_);
  const EmissionParams& emission = crf_ ? crf_->emission : *ec_;
  params_.add("ner.emission.weight", emission.weight);
  params_.add("ner.emission.bias", emission.bias);
  if (crf_) {
    params_.add("ner.crf.transition", crf_->transition);
    params_.add("ner.crf.start", crf_->start);
    params_.add("ner.crf.stop", crf_->stop);
  }
  params_.add("relation.head_proj", rel_.head_proj);
  params_.add("relation.dep_proj", rel_.dep_proj);
  params_.add("relation.bias", rel_.bias);
  params_.add("relation.output", rel_.output);
}

std::size_t JointModel::input_dim() const {
  return word_table_.dim() + 2 * config_.char_hidden;
}

EncodedSentence JointModel::encode(const AnnotatedSentence& sentence) const {
  if (sentence.size() == 0) throw DataError("cannot encode an empty sentence");
  EncodedSentence out;
  out.tokens = sentence.tokens;
  for (const std::string& tok : sentence.tokens) {
    out.word_ids.push_back(vocab_.word_id(tok));
    out.char_ids.push_back(vocab_.char_ids(tok));
  }
  if (config_.mode == ModelMode::NerCrf) {
    for (const std::string& tag : sentence.bio_tags) {
      out.gold_tags.push_back(tags_.index_of(tag));
    }
  } else {
    // Type-only targets: the covering entity's type, O outside entities.
    std::vector<std::string> types(sentence.size(), "O");
    for (const Span& sp : decode_bio(sentence.bio_tags)) {
      for (std::size_t i = sp.start; i <= sp.end; ++i) types[i] = sp.type;
    }
    for (const std::string& t : types) out.gold_tags.push_back(tags_.index_of(t));
  }
  out.gold_arcs.resize(sentence.size());
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    for (const TokenArc& a : sentence.arcs[i]) {
      out.gold_arcs[i].push_back(RelArc{a.head, vocab_.relation_id(a.label)});
    }
  }
  normalize_arcs(out.gold_arcs);
  return out;
}

JointModel::EncoderOut JointModel::run_encoder(
    Tape& tape, const EncodedSentence& sentence, bool training, Rng& rng,
    const Tensor* input_perturbation) const {
  const std::size_t n = sentence.size();
  std::vector<Tensor> reps;
  reps.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    reps.push_back(char_word_representation(tape, sentence.word_ids[t],
                                            sentence.char_ids[t], word_table_,
                                            char_table_, char_fwd_, char_bwd_));
  }
  Tensor embedded = tape.stack_rows(reps);
  // The perturbation site: its gradient is collected even when every
  // embedding parameter is frozen.
  if (tape.recording()) embedded.set_requires_grad(true);

  Tensor x = embedded;
  if (input_perturbation) {
    if (input_perturbation->shape() != embedded.shape()) {
      throw DimensionError("input perturbation shape mismatch");
    }
    x = tape.add_const(x, *input_perturbation);
  }
  x = dropout_apply(tape, x, config_.dropout, training, rng);
  Tensor encoded = bilstm_sequence(tape, x, enc_fwd_, enc_bwd_);
  encoded = dropout_apply(tape, encoded, config_.dropout, training, rng);
  return {embedded, encoded};
}

std::vector<std::size_t> JointModel::decode_tags(const Tensor& encoded) const {
  if (config_.mode == ModelMode::NerCrf) {
    return config_.constrain_bio ? viterbi_decode(encoded, *crf_, tags_)
                                 : viterbi_decode(encoded, *crf_);
  }
  return greedy_decode(encoded, *ec_);
}

ForwardResult JointModel::forward(Tape& tape, const EncodedSentence& sentence,
                                  bool training, Rng& rng,
                                  const Tensor* input_perturbation) {
  if (sentence.size() == 0) throw DataError("forward: empty sentence");
  if (sentence.gold_tags.size() != sentence.size() ||
      sentence.gold_arcs.size() != sentence.size()) {
    throw DataError("forward: sentence is missing gold annotations");
  }
  EncoderOut enc = run_encoder(tape, sentence, training, rng, input_perturbation);

  ForwardResult result;
  result.embedded_input = enc.embedded;
  if (config_.mode == ModelMode::NerCrf) {
    result.loss_ner = crf_nll(tape, enc.encoded, sentence.gold_tags, *crf_);
  } else {
    result.loss_ner = ec_softmax_loss(tape, enc.encoded, sentence.gold_tags, *ec_);
  }

  // Label embeddings come from decoded tags unless teacher forcing is on,
  // matching what the relation head sees at inference.
  if (training && config_.teacher_forcing) {
    result.label_tags = sentence.gold_tags;
  } else {
    result.label_tags = decode_tags(enc.encoded);
  }
  Tensor z = build_relation_inputs(tape, enc.encoded, result.label_tags,
                                   label_table_);
  Tensor scores = score_heads(tape, z, rel_);
  result.loss_rel = rel_loss(tape, scores, sentence.gold_arcs);
  result.loss_joint = tape.add(result.loss_ner, result.loss_rel);
  return result;
}

Prediction JointModel::predict(const std::vector<std::string>& tokens) const {
  if (tokens.empty()) throw DataError("predict: empty token list");
  EncodedSentence sentence;
  sentence.tokens = tokens;
  for (const std::string& tok : tokens) {
    sentence.word_ids.push_back(vocab_.word_id(tok));
    sentence.char_ids.push_back(vocab_.char_ids(tok));
  }

  Tape tape(/*recording=*/false);
  Rng unused(0);
  EncoderOut enc = run_encoder(tape, sentence, /*training=*/false, unused,
                               nullptr);
  const std::vector<std::size_t> tag_ids = decode_tags(enc.encoded);
  Tensor z = build_relation_inputs(tape, enc.encoded, tag_ids, label_table_);
  Tensor scores = score_heads(tape, z, rel_);
  const RelationArcs arcs = decode_relations(scores, config_.rel_threshold);

  Prediction out;
  for (std::size_t id : tag_ids) out.tags.push_back(tags_.name(id));
  out.arcs.resize(arcs.size());
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    for (const RelArc& a : arcs[i]) {
      out.arcs[i].push_back(TokenArc{a.head, relations_[a.label]});
    }
  }
  return out;
}

}  // namespace jointex
