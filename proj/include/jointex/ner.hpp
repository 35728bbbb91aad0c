#pragma once

#include <cstddef>
#include <vector>

#include "jointex/layers.hpp"
#include "jointex/tagset.hpp"
#include "jointex/tape.hpp"
#include "jointex/tensor.hpp"

namespace jointex {

// Projects encoder features to per-tag scores. Shared by the softmax and CRF
// entity heads.
struct EmissionParams {
  EmissionParams(std::size_t feature_dim, std::size_t num_tags, Rng& rng);
  EmissionParams(Tensor weight, Tensor bias);

  std::size_t num_tags() const { return weight.dim(0); }
  std::size_t feature_dim() const { return weight.dim(1); }

  Tensor weight;  // T x 2H
  Tensor bias;    // T
};

// Linear-chain CRF scores: emissions plus tag-to-tag transition scores and
// start/stop scores. transition[from][to]. Transitions are unconstrained
// real values; BIO constraints are applied only at decode time.
struct CrfParams {
  CrfParams(std::size_t feature_dim, std::size_t num_tags, Rng& rng);
  CrfParams(EmissionParams emission, Tensor transition, Tensor start,
            Tensor stop);

  std::size_t num_tags() const { return emission.num_tags(); }

  EmissionParams emission;
  Tensor transition;  // T x T
  Tensor start;       // T
  Tensor stop;        // T
};

// features (n x 2H) -> per-token tag scores (n x T).
Tensor emission_scores(Tape& tape, const Tensor& features,
                       const EmissionParams& p);

// Sum over tokens of -log softmax(gold tag).
Tensor ec_softmax_loss(Tape& tape, const Tensor& features,
                       const std::vector<std::size_t>& gold_tags,
                       const EmissionParams& p);

// -score(gold path) + log Z, with log Z from the forward algorithm in
// log space.
Tensor crf_nll(Tape& tape, const Tensor& features,
               const std::vector<std::size_t>& gold_tags, const CrfParams& p);

// Exact argmax tag path. Ties break toward the lowest tag index.
std::vector<std::size_t> viterbi_decode(const Tensor& features,
                                        const CrfParams& p);
// Same, with transitions that would produce invalid BIO bigrams masked out.
std::vector<std::size_t> viterbi_decode(const Tensor& features,
                                        const CrfParams& p,
                                        const TagScheme& tags);

// Independent per-token argmax. Ties break toward the lowest tag index.
std::vector<std::size_t> greedy_decode(const Tensor& features,
                                       const EmissionParams& p);

}  // namespace jointex
