#include "jointex/ner.hpp"

#include <cmath>
#include <limits>

#include "jointex/errors.hpp"

namespace jointex {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_gold(const std::vector<std::size_t>& gold, std::size_t n,
                std::size_t num_tags) {
  if (gold.size() != n) {
    throw DimensionError("gold tag sequence length does not match features");
  }
  for (std::size_t g : gold) {
    if (g >= num_tags) throw DataError("gold tag index out of range");
  }
}

// Raw emission values for decode paths (no tape).
std::vector<double> emission_values(const Tensor& features,
                                    const EmissionParams& p) {
  const std::size_t n = features.dim(0), f = features.dim(1), T = p.num_tags();
  if (p.feature_dim() != f) {
    throw DimensionError("emission projection does not match feature width");
  }
  std::vector<double> e(n * T, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t k = 0; k < T; ++k) {
      double acc = p.bias[k];
      for (std::size_t j = 0; j < f; ++j) {
        acc += features.at(t, j) * p.weight.at(k, j);
      }
      e[t * T + k] = acc;
    }
  }
  return e;
}

std::vector<std::size_t> viterbi_impl(const Tensor& features,
                                      const CrfParams& p,
                                      const TagScheme* tags) {
  const std::size_t n = features.dim(0), T = p.num_tags();
  if (n == 0) throw DimensionError("viterbi_decode: empty sequence");
  const std::vector<double> e = emission_values(features, p.emission);

  std::vector<double> score(T), next(T);
  std::vector<std::size_t> backptr((n - 1) * T, 0);
  for (std::size_t k = 0; k < T; ++k) {
    const bool ok = !tags || tags->allowed_at_start(k);
    score[k] = ok ? p.start[k] + e[k] : kNegInf;
  }
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t to = 0; to < T; ++to) {
      double best = kNegInf;
      std::size_t best_from = 0;
      for (std::size_t from = 0; from < T; ++from) {
        if (tags && !tags->transition_allowed(from, to)) continue;
        const double s = score[from] + p.transition.at(from, to);
        if (s > best) {
          best = s;
          best_from = from;
        }
      }
      next[to] = best + e[t * T + to];
      backptr[(t - 1) * T + to] = best_from;
    }
    std::swap(score, next);
  }

  std::size_t best_last = 0;
  double best_score = kNegInf;
  for (std::size_t k = 0; k < T; ++k) {
    const double s = score[k] + p.stop[k];
    if (s > best_score) {
      best_score = s;
      best_last = k;
    }
  }

  std::vector<std::size_t> path(n);
  path[n - 1] = best_last;
  for (std::size_t t = n - 1; t > 0; --t) {
    path[t - 1] = backptr[(t - 1) * T + path[t]];
  }
  return path;
}

}  // namespace

EmissionParams::EmissionParams(std::size_t feature_dim, std::size_t num_tags,
                               Rng& rng)
    : weight(init_weight({num_tags, feature_dim}, feature_dim, rng)),
      bias(Tensor::zeros({num_tags})) {
  bias.set_requires_grad(true);
}

EmissionParams::EmissionParams(Tensor w, Tensor b)
    : weight(std::move(w)), bias(std::move(b)) {}

CrfParams::CrfParams(std::size_t feature_dim, std::size_t num_tags, Rng& rng)
    : emission(feature_dim, num_tags, rng),
      transition(Tensor::zeros({num_tags, num_tags})),
      start(Tensor::zeros({num_tags})),
      stop(Tensor::zeros({num_tags})) {
  transition.set_requires_grad(true);
  start.set_requires_grad(true);
  stop.set_requires_grad(true);
}

CrfParams::CrfParams(EmissionParams e, Tensor t, Tensor s, Tensor st)
    : emission(std::move(e)),
      transition(std::move(t)),
      start(std::move(s)),
      stop(std::move(st)) {}

Tensor emission_scores(Tape& tape, const Tensor& features,
                       const EmissionParams& p) {
  if (features.rank() != 2 || features.dim(1) != p.feature_dim()) {
    throw DimensionError("emission_scores: feature width mismatch");
  }
  return tape.add_row_vector(tape.matmul_nt(features, p.weight), p.bias);
}

Tensor ec_softmax_loss(Tape& tape, const Tensor& features,
                       const std::vector<std::size_t>& gold_tags,
                       const EmissionParams& p) {
  const std::size_t n = features.dim(0), T = p.num_tags();
  check_gold(gold_tags, n, T);
  Tensor emis = emission_scores(tape, features, p);
  Tensor loss;
  for (std::size_t t = 0; t < n; ++t) {
    Tensor term = tape.sub(tape.logsumexp(tape.row(emis, t)),
                           tape.pick(emis, t * T + gold_tags[t]));
    loss = (t == 0) ? term : tape.add(loss, term);
  }
  return loss;
}

Tensor crf_nll(Tape& tape, const Tensor& features,
               const std::vector<std::size_t>& gold_tags, const CrfParams& p) {
  const std::size_t n = features.dim(0), T = p.num_tags();
  if (n == 0) throw DimensionError("crf_nll: empty sequence");
  check_gold(gold_tags, n, T);
  Tensor emis = emission_scores(tape, features, p.emission);

  // Forward algorithm in log space.
  Tensor alpha = tape.add(tape.row(emis, 0), p.start);
  for (std::size_t t = 1; t < n; ++t) {
    Tensor expanded = tape.add_col_vector(p.transition, alpha);
    alpha = tape.add(tape.logsumexp(expanded, /*axis=*/0), tape.row(emis, t));
  }
  Tensor log_z = tape.logsumexp(tape.add(alpha, p.stop));

  Tensor gold = tape.add(tape.pick(p.start, gold_tags[0]),
                         tape.pick(emis, gold_tags[0]));
  for (std::size_t t = 1; t < n; ++t) {
    gold = tape.add(gold, tape.pick(p.transition, gold_tags[t - 1] * T + gold_tags[t]));
    gold = tape.add(gold, tape.pick(emis, t * T + gold_tags[t]));
  }
  gold = tape.add(gold, tape.pick(p.stop, gold_tags[n - 1]));

  return tape.sub(log_z, gold);
}

std::vector<std::size_t> viterbi_decode(const Tensor& features,
                                        const CrfParams& p) {
  return viterbi_impl(features, p, nullptr);
}

std::vector<std::size_t> viterbi_decode(const Tensor& features,
                                        const CrfParams& p,
                                        const TagScheme& tags) {
  return viterbi_impl(features, p, &tags);
}

std::vector<std::size_t> greedy_decode(const Tensor& features,
                                       const EmissionParams& p) {
  const std::size_t n = features.dim(0), T = p.num_tags();
  const std::vector<double> e = emission_values(features, p);
  std::vector<std::size_t> out(n, 0);
  for (std::size_t t = 0; t < n; ++t) {
    double best = e[t * T];
    for (std::size_t k = 1; k < T; ++k) {
      if (e[t * T + k] > best) {
        best = e[t * T + k];
        out[t] = k;
      }
    }
  }
  return out;
}

}  // namespace jointex
