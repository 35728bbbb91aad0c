#include "jointex/layers.hpp"

#include <cmath>

#include "jointex/errors.hpp"

namespace jointex {

Tensor init_weight(std::vector<std::size_t> shape, std::size_t fan_in,
                   Rng& rng) {
  const double bound = std::sqrt(3.0 / static_cast<double>(fan_in));
  Tensor t = Tensor::zeros(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = uniform_real(rng, -bound, bound);
  }
  t.set_requires_grad(true);
  return t;
}

LstmParams::LstmParams(std::size_t input_dim, std::size_t hidden_dim, Rng& rng)
    : input_weights(init_weight({4 * hidden_dim, input_dim}, input_dim, rng)),
      hidden_weights(init_weight({4 * hidden_dim, hidden_dim}, hidden_dim, rng)),
      bias(Tensor::zeros({4 * hidden_dim})),
      hidden(hidden_dim) {
  for (std::size_t i = hidden_dim; i < 2 * hidden_dim; ++i) bias[i] = 1.0;
  bias.set_requires_grad(true);
}

LstmState lstm_zero_state(std::size_t hidden_dim) {
  return {Tensor::zeros({hidden_dim}), Tensor::zeros({hidden_dim})};
}

LstmState lstm_cell_step(Tape& tape, const Tensor& x, const LstmState& prev,
                         const LstmParams& p) {
  const std::size_t H = p.hidden;
  if (x.rank() != 1 || x.dim(0) != p.input_dim()) {
    throw DimensionError("lstm_cell_step: input dimension mismatch");
  }
  if (prev.h.dim(0) != H || prev.c.dim(0) != H) {
    throw DimensionError("lstm_cell_step: state dimension mismatch");
  }
  Tensor gates = tape.add(
      tape.add(tape.matvec(p.input_weights, x), tape.matvec(p.hidden_weights, prev.h)),
      p.bias);
  Tensor in_gate = tape.sigmoid(tape.slice(gates, 0, H));
  Tensor forget_gate = tape.sigmoid(tape.slice(gates, H, H));
  Tensor cell_cand = tape.tanh(tape.slice(gates, 2 * H, H));
  Tensor out_gate = tape.sigmoid(tape.slice(gates, 3 * H, H));
  Tensor c = tape.add(tape.mul(forget_gate, prev.c), tape.mul(in_gate, cell_cand));
  Tensor h = tape.mul(out_gate, tape.tanh(c));
  return {h, c};
}

Tensor bilstm_sequence(Tape& tape, const Tensor& xs, const LstmParams& fwd,
                       const LstmParams& bwd) {
  if (xs.rank() != 2 || xs.dim(0) == 0) {
    throw DimensionError("bilstm_sequence: expected a non-empty n x d input");
  }
  const std::size_t n = xs.dim(0);

  std::vector<Tensor> inputs;
  inputs.reserve(n);
  for (std::size_t t = 0; t < n; ++t) inputs.push_back(tape.row(xs, t));

  std::vector<Tensor> forward(n), backward(n);
  LstmState state = lstm_zero_state(fwd.hidden);
  for (std::size_t t = 0; t < n; ++t) {
    state = lstm_cell_step(tape, inputs[t], state, fwd);
    forward[t] = state.h;
  }
  state = lstm_zero_state(bwd.hidden);
  for (std::size_t t = n; t-- > 0;) {
    state = lstm_cell_step(tape, inputs[t], state, bwd);
    backward[t] = state.h;
  }

  std::vector<Tensor> rows;
  rows.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    rows.push_back(tape.concat({forward[t], backward[t]}));
  }
  return tape.stack_rows(rows);
}

EmbeddingTable::EmbeddingTable(std::size_t vocab_size, std::size_t dim,
                               bool trainable, Rng& rng)
    : weights(init_weight({vocab_size, dim}, dim, rng)) {
  weights.set_requires_grad(trainable);
}

EmbeddingTable::EmbeddingTable(Tensor w) : weights(std::move(w)) {
  if (weights.rank() != 2) {
    throw DimensionError("EmbeddingTable: weights must be rank-2");
  }
}

Tensor embedding_lookup(Tape& tape, const EmbeddingTable& table,
                        const std::vector<std::size_t>& ids) {
  return tape.lookup_rows(table.weights, ids);
}

Tensor char_word_representation(Tape& tape, std::size_t word_id,
                                const std::vector<std::size_t>& char_ids,
                                const EmbeddingTable& word_table,
                                const EmbeddingTable& char_table,
                                const LstmParams& char_fwd,
                                const LstmParams& char_bwd) {
  if (char_ids.empty()) {
    throw DimensionError("char_word_representation: empty character sequence");
  }
  Tensor chars = embedding_lookup(tape, char_table, char_ids);
  const std::size_t m = chars.dim(0);

  LstmState state = lstm_zero_state(char_fwd.hidden);
  for (std::size_t t = 0; t < m; ++t) {
    state = lstm_cell_step(tape, tape.row(chars, t), state, char_fwd);
  }
  Tensor last_fwd = state.h;

  state = lstm_zero_state(char_bwd.hidden);
  for (std::size_t t = m; t-- > 0;) {
    state = lstm_cell_step(tape, tape.row(chars, t), state, char_bwd);
  }
  Tensor last_bwd = state.h;

  Tensor word = tape.row(embedding_lookup(tape, word_table, {word_id}), 0);
  return tape.concat({word, last_fwd, last_bwd});
}

Tensor dropout_apply(Tape& tape, const Tensor& x, double rate, bool training,
                     Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) {
    throw ConfigError("dropout rate must be in [0, 1)");
  }
  if (!training || rate == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - rate);
  Tensor mask = Tensor::zeros(x.shape());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    mask[i] = (uniform_real(rng, 0.0, 1.0) >= rate) ? keep_scale : 0.0;
  }
  return tape.mul_const(x, mask);
}

}  // namespace jointex
