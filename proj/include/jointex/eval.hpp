#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "jointex/data.hpp"
#include "jointex/model.hpp"

namespace jointex {

// Entity correctness:
//   Strict     — boundaries and type must match.
//   Boundaries — boundaries must match, type ignored.
//   Relaxed    — boundaries assumed known; a gold entity counts as correct
//                when at least one of its tokens received the gold type.
enum class EvalMode { Strict, Boundaries, Relaxed };

EvalMode eval_mode_from_string(const std::string& s);  // "S" | "B" | "R"
std::string eval_mode_name(EvalMode mode);

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// p = tp/(tp+fp), r = tp/(tp+fn), f1 = 2pr/(p+r); zero denominators give 0.
Prf f1_scores(const Counts& counts);

// Per-sentence evaluation inputs. token_types carries the per-token
// predicted entity type ("" outside); spans carry boundary+type entities.
struct EntityAnnotation {
  std::vector<Span> spans;
  std::vector<std::string> token_types;
};

struct ArcTriple {
  std::size_t dependent;
  std::size_t head;
  std::string label;
  auto operator<=>(const ArcTriple&) const = default;
};

// Micro-averaged entity counts over a corpus.
Counts score_entities(const std::vector<EntityAnnotation>& gold,
                      const std::vector<EntityAnnotation>& pred,
                      EvalMode mode);

// A predicted arc is a tp when the same (dependent, head, label) triple is
// gold and both argument entities are correct under the entity mode. The
// auxiliary "N" arcs never count.
Counts score_relations(const std::vector<EntityAnnotation>& gold,
                       const std::vector<std::vector<ArcTriple>>& gold_arcs,
                       const std::vector<EntityAnnotation>& pred,
                       const std::vector<std::vector<ArcTriple>>& pred_arcs,
                       EvalMode entity_mode);

struct EvalReport {
  EvalMode mode = EvalMode::Strict;
  Counts entity_counts;
  Counts relation_counts;
  Prf entity;
  Prf relation;
  double overall_f1 = 0.0;  // mean of the two task F1 scores

  std::string to_text() const;
  static std::string csv_header();
  std::string csv_row(const std::string& label) const;
};

EvalReport make_report(const Counts& entity, const Counts& relation,
                       EvalMode mode);

// End-to-end corpus evaluation of model predictions against gold sentences.
// In type-only (EC) mode, predicted entities inherit the gold boundaries and
// take the type predicted at their final token.
EvalReport evaluate_corpus(const std::vector<AnnotatedSentence>& gold,
                           const std::vector<Prediction>& pred, EvalMode mode,
                           ModelMode model_mode);

}  // namespace jointex
