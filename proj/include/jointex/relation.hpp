#pragma once

#include <cstddef>
#include <vector>

#include "jointex/layers.hpp"
#include "jointex/tape.hpp"
#include "jointex/tensor.hpp"

namespace jointex {

// Relation label id 0 is always the auxiliary no-relation label "N".
constexpr std::size_t kNoRelation = 0;

struct RelArc {
  std::size_t head;
  std::size_t label;
  bool operator==(const RelArc&) const = default;
};

// arcs[i] lists the (head, label) pairs of token i. A token with no relation
// carries exactly {i, kNoRelation}.
using RelationArcs = std::vector<std::vector<RelArc>>;

RelationArcs self_arcs(std::size_t n);
// Drops redundant self-N arcs when real arcs exist; inserts the self-N
// fallback when a token has none.
void normalize_arcs(RelationArcs& arcs);

// Scores s(w_j, w_i, r_k) = output_k . tanh(head_proj z_j + dep_proj z_i + b).
struct RelScorerParams {
  RelScorerParams(std::size_t input_dim, std::size_t hidden_dim,
                  std::size_t num_labels, Rng& rng);
  RelScorerParams(Tensor head_proj, Tensor dep_proj, Tensor bias, Tensor output);

  std::size_t input_dim() const { return head_proj.dim(1); }
  std::size_t hidden_dim() const { return head_proj.dim(0); }
  std::size_t num_labels() const { return output.dim(0); }

  Tensor head_proj;  // L x din, applied to the candidate head
  Tensor dep_proj;   // L x din, applied to the dependent
  Tensor bias;       // L
  Tensor output;     // R x L, one row per relation label (including "N")
};

// Per token: encoder output concatenated with the embedding of its entity
// tag. Tags are discrete decisions, so no gradient flows through them.
Tensor build_relation_inputs(Tape& tape, const Tensor& encoded,
                             const std::vector<std::size_t>& tags,
                             const EmbeddingTable& label_table);

// z (n x din) -> scores (n x n x R); entry [i][j][k] scores token j as head
// of token i under relation k.
Tensor score_heads(Tape& tape, const Tensor& z, const RelScorerParams& p);

// Multi-label binary cross-entropy over the full n x R candidate grid of
// every token: -log sigma(s) on gold pairs, -log(1 - sigma(s)) elsewhere,
// summed over the sentence.
Tensor rel_loss(Tape& tape, const Tensor& scores, const RelationArcs& gold);

// Emits every (head, label != N) whose sigmoid probability reaches the
// threshold; tokens with none fall back to the self-N arc. Arcs are ordered
// by head, then label.
RelationArcs decode_relations(const Tensor& scores, double threshold);

}  // namespace jointex
