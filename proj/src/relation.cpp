#include "jointex/relation.hpp"

#include <algorithm>
#include <cmath>

#include "jointex/errors.hpp"

namespace jointex {

RelationArcs self_arcs(std::size_t n) {
  RelationArcs arcs(n);
  for (std::size_t i = 0; i < n; ++i) arcs[i] = {RelArc{i, kNoRelation}};
  return arcs;
}

void normalize_arcs(RelationArcs& arcs) {
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    auto& list = arcs[i];
    if (list.size() > 1) {
      list.erase(std::remove(list.begin(), list.end(), RelArc{i, kNoRelation}),
                 list.end());
    }
    if (list.empty()) list.push_back(RelArc{i, kNoRelation});
  }
}

RelScorerParams::RelScorerParams(std::size_t input_dim, std::size_t hidden_dim,
                                 std::size_t num_labels, Rng& rng)
    : head_proj(init_weight({hidden_dim, input_dim}, input_dim, rng)),
      dep_proj(init_weight({hidden_dim, input_dim}, input_dim, rng)),
      bias(Tensor::zeros({hidden_dim})),
      output(init_weight({num_labels, hidden_dim}, hidden_dim, rng)) {
  bias.set_requires_grad(true);
}

RelScorerParams::RelScorerParams(Tensor hp, Tensor dp, Tensor b, Tensor out)
    : head_proj(std::move(hp)),
      dep_proj(std::move(dp)),
      bias(std::move(b)),
      output(std::move(out)) {}

Tensor build_relation_inputs(Tape& tape, const Tensor& encoded,
                             const std::vector<std::size_t>& tags,
                             const EmbeddingTable& label_table) {
  const std::size_t n = encoded.dim(0);
  if (tags.size() != n) {
    throw DimensionError("build_relation_inputs: tag count mismatch");
  }
  Tensor labels = embedding_lookup(tape, label_table, tags);
  std::vector<Tensor> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows.push_back(tape.concat({tape.row(encoded, i), tape.row(labels, i)}));
  }
  return tape.stack_rows(rows);
}

Tensor score_heads(Tape& tape, const Tensor& z, const RelScorerParams& p) {
  const std::size_t n = z.dim(0);
  if (z.dim(1) != p.input_dim()) {
    throw DimensionError("score_heads: input width mismatch");
  }
  // head_part[j] = head_proj . z_j, dep_part[i] = dep_proj . z_i + bias;
  // the pair hidden state is tanh(head_part[j] + dep_part[i]).
  Tensor head_part = tape.matmul_nt(z, p.head_proj);                   // n x L
  Tensor dep_part = tape.add_row_vector(tape.matmul_nt(z, p.dep_proj), p.bias);

  std::vector<Tensor> per_dependent;
  per_dependent.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Tensor hidden = tape.tanh(tape.add_row_vector(head_part, tape.row(dep_part, i)));
    per_dependent.push_back(tape.matmul_nt(hidden, p.output));  // n x R
  }
  return tape.reshape(tape.vstack(per_dependent), {n, n, p.num_labels()});
}

Tensor rel_loss(Tape& tape, const Tensor& scores, const RelationArcs& gold) {
  if (scores.rank() != 3 || scores.dim(0) != scores.dim(1)) {
    throw DimensionError("rel_loss: expected n x n x R scores");
  }
  const std::size_t n = scores.dim(0), R = scores.dim(2);
  if (gold.size() != n) throw DimensionError("rel_loss: arc count mismatch");

  Tensor targets = Tensor::zeros({n, n, R});
  for (std::size_t i = 0; i < n; ++i) {
    if (gold[i].empty()) throw DataError("rel_loss: token without arcs");
    for (const RelArc& arc : gold[i]) {
      if (arc.head >= n || arc.label >= R) {
        throw DataError("rel_loss: arc out of range");
      }
      targets.at(i, arc.head, arc.label) = 1.0;
    }
  }
  return tape.bce_with_logits_sum(scores, targets);
}

RelationArcs decode_relations(const Tensor& scores, double threshold) {
  if (threshold <= 0.0 || threshold >= 1.0) {
    throw ConfigError("relation threshold must be in (0, 1)");
  }
  if (scores.rank() != 3 || scores.dim(0) != scores.dim(1)) {
    throw DimensionError("decode_relations: expected n x n x R scores");
  }
  const std::size_t n = scores.dim(0), R = scores.dim(2);
  // sigma(s) >= threshold  <=>  s >= logit(threshold)
  const double cutoff = std::log(threshold / (1.0 - threshold));

  RelationArcs arcs(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < R; ++k) {
        if (k == kNoRelation) continue;
        if (scores.at(i, j, k) >= cutoff) arcs[i].push_back(RelArc{j, k});
      }
    }
    if (arcs[i].empty()) arcs[i].push_back(RelArc{i, kNoRelation});
  }
  return arcs;
}

}  // namespace jointex
