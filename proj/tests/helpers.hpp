#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <vector>

#include "jointex/data.hpp"
#include "jointex/model.hpp"
#include "jointex/ner.hpp"
#include "jointex/relation.hpp"
#include "jointex/rng.hpp"
#include "jointex/tensor.hpp"

namespace jointex::testing {

inline std::filesystem::path data_dir() {
  return std::filesystem::path(JOINTEX_DATA_DIR);
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "jointex_tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng,
                            double lo = -1.0, double hi = 1.0,
                            bool requires_grad = false) {
  Tensor t = Tensor::zeros(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = uniform_real(rng, lo, hi);
  t.set_requires_grad(requires_grad);
  return t;
}

// ---- brute-force linear-chain oracles -------------------------------------
// All of these enumerate the T^n tag paths directly. emissions is n x T;
// transition is T x T [from][to].

struct CrfInstance {
  Tensor emissions;
  Tensor transition;
  Tensor start;
  Tensor stop;
  std::size_t n() const { return emissions.dim(0); }
  std::size_t num_tags() const { return emissions.dim(1); }
};

inline CrfInstance random_crf_instance(std::size_t n, std::size_t num_tags,
                                       Rng& rng, double scale = 2.0) {
  return CrfInstance{random_tensor({n, num_tags}, rng, -scale, scale),
                     random_tensor({num_tags, num_tags}, rng, -scale, scale),
                     random_tensor({num_tags}, rng, -scale, scale),
                     random_tensor({num_tags}, rng, -scale, scale)};
}

inline double path_score(const CrfInstance& inst,
                         const std::vector<std::size_t>& path) {
  const std::size_t n = inst.n();
  double score = inst.start[path[0]] + inst.emissions.at(0, path[0]);
  for (std::size_t t = 1; t < n; ++t) {
    score += inst.transition.at(path[t - 1], path[t]);
    score += inst.emissions.at(t, path[t]);
  }
  score += inst.stop[path[n - 1]];
  return score;
}

template <typename Fn>
void for_each_path(std::size_t n, std::size_t num_tags, Fn&& fn) {
  std::vector<std::size_t> path(n, 0);
  while (true) {
    fn(path);
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++path[pos] < num_tags) break;
      path[pos] = 0;
      if (pos == 0) return;
    }
  }
}

inline double brute_force_log_z(const CrfInstance& inst) {
  std::vector<double> scores;
  for_each_path(inst.n(), inst.num_tags(), [&](const auto& path) {
    scores.push_back(path_score(inst, path));
  });
  const double mx = *std::max_element(scores.begin(), scores.end());
  double acc = 0.0;
  for (double s : scores) acc += std::exp(s - mx);
  return mx + std::log(acc);
}

inline std::vector<std::size_t> brute_force_viterbi(const CrfInstance& inst) {
  std::vector<std::size_t> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for_each_path(inst.n(), inst.num_tags(), [&](const auto& path) {
    const double s = path_score(inst, path);
    if (s > best_score) {
      best_score = s;
      best = path;
    }
  });
  return best;
}

// marginals[t * T + k] = P(tag_t = k)
inline std::vector<double> brute_force_marginals(const CrfInstance& inst) {
  const std::size_t n = inst.n(), T = inst.num_tags();
  const double log_z = brute_force_log_z(inst);
  std::vector<double> marginals(n * T, 0.0);
  for_each_path(n, T, [&](const auto& path) {
    const double p = std::exp(path_score(inst, path) - log_z);
    for (std::size_t t = 0; t < n; ++t) marginals[t * T + path[t]] += p;
  });
  return marginals;
}

// CrfParams whose emission projection is the identity, so the supplied
// feature matrix is the emission matrix.
inline CrfParams identity_crf_params(const CrfInstance& inst) {
  const std::size_t T = inst.num_tags();
  Tensor eye = Tensor::zeros({T, T});
  for (std::size_t i = 0; i < T; ++i) eye.at(i, i) = 1.0;
  return CrfParams(EmissionParams(eye, Tensor::zeros({T})), inst.transition,
                   inst.start, inst.stop);
}

// ---- naive relation-loss oracle --------------------------------------------
// Direct sigmoid/log double loop, independent of the stable form used by the
// implementation.
inline double naive_rel_loss(const Tensor& scores, const RelationArcs& gold) {
  const std::size_t n = scores.dim(0), R = scores.dim(2);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < R; ++k) {
        const double p = 1.0 / (1.0 + std::exp(-scores.at(i, j, k)));
        const bool positive =
            std::find(gold[i].begin(), gold[i].end(), RelArc{j, k}) !=
            gold[i].end();
        loss += positive ? -std::log(p) : -std::log(1.0 - p);
      }
    }
  }
  return loss;
}

// ---- tiny corpus / model builders ------------------------------------------

inline AnnotatedSentence make_sentence(
    std::vector<std::string> tokens, std::vector<std::string> tags,
    std::vector<std::vector<TokenArc>> arcs) {
  AnnotatedSentence s;
  s.tokens = std::move(tokens);
  s.bio_tags = std::move(tags);
  s.arcs = std::move(arcs);
  return s;
}

inline std::vector<AnnotatedSentence> tiny_corpus() {
  return {
      make_sentence({"ada", "at", "rome"}, {"B-PER", "O", "B-LOC"},
                    {{{0, "N"}}, {{1, "N"}}, {{2, "N"}}}),
      make_sentence({"bo", "likes", "rome"}, {"B-PER", "O", "B-LOC"},
                    {{{2, "LivesIn"}}, {{1, "N"}}, {{2, "N"}}}),
  };
}

inline ModelConfig tiny_model_config() {
  ModelConfig c;
  c.word_dim = 8;
  c.char_dim = 5;
  c.char_hidden = 4;
  c.hidden = 6;
  c.rel_hidden = 7;
  c.label_dim = 3;
  c.dropout = 0.0;
  return c;
}

inline JointModel tiny_model(Rng& rng, ModelConfig config = tiny_model_config()) {
  const auto corpus = tiny_corpus();
  Vocab vocab = Vocab::build(corpus);
  const auto types = Vocab::entity_types(corpus);
  TagScheme tags = (config.mode == ModelMode::NerCrf)
                       ? TagScheme::bio(types)
                       : TagScheme::type_only(types);
  return JointModel(config, vocab, tags, vocab.relations(), rng);
}

}  // namespace jointex::testing
