#pragma once

#include <cstddef>
#include <vector>

#include "jointex/rng.hpp"
#include "jointex/tape.hpp"
#include "jointex/tensor.hpp"

namespace jointex {

// Weight init: uniform(-sqrt(3/fan_in), +sqrt(3/fan_in)).
Tensor init_weight(std::vector<std::size_t> shape, std::size_t fan_in, Rng& rng);

// One LSTM direction. Gate blocks are stacked [input, forget, cell, output];
// the forget-gate bias block starts at +1.
struct LstmParams {
  LstmParams(std::size_t input_dim, std::size_t hidden_dim, Rng& rng);

  std::size_t input_dim() const { return input_weights.dim(1); }
  std::size_t hidden_dim() const { return hidden; }

  Tensor input_weights;   // 4H x d
  Tensor hidden_weights;  // 4H x H
  Tensor bias;            // 4H
  std::size_t hidden;
};

struct LstmState {
  Tensor h;
  Tensor c;
};

LstmState lstm_zero_state(std::size_t hidden_dim);
LstmState lstm_cell_step(Tape& tape, const Tensor& x, const LstmState& prev,
                         const LstmParams& p);

// xs is n x d; output row t is [forward h_t ; backward h_t], both directions
// starting from zero states.
Tensor bilstm_sequence(Tape& tape, const Tensor& xs, const LstmParams& fwd,
                       const LstmParams& bwd);

struct EmbeddingTable {
  EmbeddingTable(std::size_t vocab_size, std::size_t dim, bool trainable,
                 Rng& rng);
  explicit EmbeddingTable(Tensor weights);

  std::size_t vocab_size() const { return weights.dim(0); }
  std::size_t dim() const { return weights.dim(1); }
  bool trainable() const { return weights.requires_grad(); }

  Tensor weights;  // V x d; row 0 is the unknown symbol
};

Tensor embedding_lookup(Tape& tape, const EmbeddingTable& table,
                        const std::vector<std::size_t>& ids);

// Word embedding concatenated with the final forward/backward states of a
// character-level BiLSTM over the word's characters.
Tensor char_word_representation(Tape& tape, std::size_t word_id,
                                const std::vector<std::size_t>& char_ids,
                                const EmbeddingTable& word_table,
                                const EmbeddingTable& char_table,
                                const LstmParams& char_fwd,
                                const LstmParams& char_bwd);

// Inverted dropout: training keeps each unit with probability 1-rate and
// scales by 1/(1-rate); inference is the identity.
Tensor dropout_apply(Tape& tape, const Tensor& x, double rate, bool training,
                     Rng& rng);

}  // namespace jointex
