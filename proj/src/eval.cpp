#include "jointex/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "jointex/errors.hpp"

namespace jointex {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Whether a gold entity is matched under the given mode.
bool entity_correct(const Span& gold, const EntityAnnotation& pred,
                    EvalMode mode) {
  switch (mode) {
    case EvalMode::Strict:
      return std::find(pred.spans.begin(), pred.spans.end(), gold) !=
             pred.spans.end();
    case EvalMode::Boundaries:
      for (const Span& p : pred.spans) {
        if (p.start == gold.start && p.end == gold.end) return true;
      }
      return false;
    case EvalMode::Relaxed:
      for (std::size_t i = gold.start;
           i <= gold.end && i < pred.token_types.size(); ++i) {
        if (pred.token_types[i] == gold.type) return true;
      }
      return false;
  }
  return false;
}

}  // namespace

EvalMode eval_mode_from_string(const std::string& s) {
  if (s == "S") return EvalMode::Strict;
  if (s == "B") return EvalMode::Boundaries;
  if (s == "R") return EvalMode::Relaxed;
  throw ConfigError("unknown evaluation mode: " + s + " (expected S, B or R)");
}

std::string eval_mode_name(EvalMode mode) {
  switch (mode) {
    case EvalMode::Strict: return "S";
    case EvalMode::Boundaries: return "B";
    case EvalMode::Relaxed: return "R";
  }
  return "?";
}

Prf f1_scores(const Counts& c) {
  Prf out;
  if (c.tp + c.fp > 0) {
    out.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  }
  if (c.tp + c.fn > 0) {
    out.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  }
  if (out.precision + out.recall > 0.0) {
    out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  }
  return out;
}

Counts score_entities(const std::vector<EntityAnnotation>& gold,
                      const std::vector<EntityAnnotation>& pred,
                      EvalMode mode) {
  if (gold.size() != pred.size()) {
    throw DimensionError("score_entities: sentence count mismatch");
  }
  Counts counts;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (mode == EvalMode::Relaxed) {
      // Boundaries are known: one decision per gold entity.
      for (const Span& g : gold[s].spans) {
        if (entity_correct(g, pred[s], mode)) {
          ++counts.tp;
        } else {
          ++counts.fn;
          ++counts.fp;
        }
      }
      continue;
    }
    // Set matching on (start, end[, type]).
    auto key = [mode](const Span& sp) {
      return mode == EvalMode::Strict ? sp
                                      : Span{sp.start, sp.end, std::string()};
    };
    std::set<Span> gold_set, pred_set;
    for (const Span& g : gold[s].spans) gold_set.insert(key(g));
    for (const Span& p : pred[s].spans) pred_set.insert(key(p));
    for (const Span& p : pred_set) {
      if (gold_set.count(p)) {
        ++counts.tp;
      } else {
        ++counts.fp;
      }
    }
    for (const Span& g : gold_set) {
      if (!pred_set.count(g)) ++counts.fn;
    }
  }
  return counts;
}

Counts score_relations(const std::vector<EntityAnnotation>& gold,
                       const std::vector<std::vector<ArcTriple>>& gold_arcs,
                       const std::vector<EntityAnnotation>& pred,
                       const std::vector<std::vector<ArcTriple>>& pred_arcs,
                       EvalMode entity_mode) {
  if (gold.size() != pred.size() || gold_arcs.size() != gold.size() ||
      pred_arcs.size() != gold.size()) {
    throw DimensionError("score_relations: sentence count mismatch");
  }
  Counts counts;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    std::set<ArcTriple> gold_set, pred_set;
    for (const ArcTriple& a : gold_arcs[s]) {
      if (a.label != "N") gold_set.insert(a);
    }
    for (const ArcTriple& a : pred_arcs[s]) {
      if (a.label != "N") pred_set.insert(a);
    }

    // The entity whose final token sits at `pos` must be correct.
    auto argument_correct = [&](std::size_t pos) {
      for (const Span& g : gold[s].spans) {
        if (g.end == pos) return entity_correct(g, pred[s], entity_mode);
      }
      return false;
    };

    std::set<ArcTriple> matched;
    for (const ArcTriple& p : pred_set) {
      if (gold_set.count(p) && argument_correct(p.dependent) &&
          argument_correct(p.head)) {
        ++counts.tp;
        matched.insert(p);
      } else {
        ++counts.fp;
      }
    }
    for (const ArcTriple& g : gold_set) {
      if (!matched.count(g)) ++counts.fn;
    }
  }
  return counts;
}

EvalReport make_report(const Counts& entity, const Counts& relation,
                       EvalMode mode) {
  EvalReport report;
  report.mode = mode;
  report.entity_counts = entity;
  report.relation_counts = relation;
  report.entity = f1_scores(entity);
  report.relation = f1_scores(relation);
  report.overall_f1 = (report.entity.f1 + report.relation.f1) / 2.0;
  return report;
}

std::string EvalReport::to_text() const {
  std::ostringstream out;
  char line[160];
  out << "evaluation mode: " << eval_mode_name(mode) << "\n";
  std::snprintf(line, sizeof(line),
                "%-10s %10s %10s %10s %6s %6s %6s\n", "task", "precision",
                "recall", "f1", "tp", "fp", "fn");
  out << line;
  std::snprintf(line, sizeof(line), "%-10s %10.4f %10.4f %10.4f %6zu %6zu %6zu\n",
                "entity", entity.precision, entity.recall, entity.f1,
                entity_counts.tp, entity_counts.fp, entity_counts.fn);
  out << line;
  std::snprintf(line, sizeof(line), "%-10s %10.4f %10.4f %10.4f %6zu %6zu %6zu\n",
                "relation", relation.precision, relation.recall, relation.f1,
                relation_counts.tp, relation_counts.fp, relation_counts.fn);
  out << line;
  std::snprintf(line, sizeof(line), "%-10s %32.4f\n", "overall", overall_f1);
  out << line;
  return out.str();
}

std::string EvalReport::csv_header() {
  return "label,mode,ent_p,ent_r,ent_f1,rel_p,rel_r,rel_f1,overall_f1";
}

std::string EvalReport::csv_row(const std::string& label) const {
  std::ostringstream out;
  out << label << ',' << eval_mode_name(mode) << ',' << fmt(entity.precision)
      << ',' << fmt(entity.recall) << ',' << fmt(entity.f1) << ','
      << fmt(relation.precision) << ',' << fmt(relation.recall) << ','
      << fmt(relation.f1) << ',' << fmt(overall_f1);
  return out.str();
}

namespace {

EntityAnnotation gold_annotation(const AnnotatedSentence& sentence) {
  EntityAnnotation out;
  out.spans = decode_bio(sentence.bio_tags);
  out.token_types.assign(sentence.size(), "");
  for (const Span& sp : out.spans) {
    for (std::size_t i = sp.start; i <= sp.end; ++i) out.token_types[i] = sp.type;
  }
  return out;
}

EntityAnnotation pred_annotation(const AnnotatedSentence& gold,
                                 const Prediction& pred, ModelMode model_mode) {
  EntityAnnotation out;
  if (model_mode == ModelMode::NerCrf) {
    out.spans = decode_bio(pred.tags);
    out.token_types.assign(pred.tags.size(), "");
    for (const Span& sp : out.spans) {
      for (std::size_t i = sp.start; i <= sp.end; ++i) {
        out.token_types[i] = sp.type;
      }
    }
  } else {
    // Type-only predictions over gold boundaries; a span takes the type
    // predicted at its final token.
    out.token_types.assign(pred.tags.size(), "");
    for (std::size_t i = 0; i < pred.tags.size(); ++i) {
      if (pred.tags[i] != "O") out.token_types[i] = pred.tags[i];
    }
    for (const Span& g : decode_bio(gold.bio_tags)) {
      const std::string& type = pred.tags[g.end];
      if (type != "O") out.spans.push_back(Span{g.start, g.end, type});
    }
  }
  return out;
}

std::vector<ArcTriple> arc_triples(const std::vector<std::vector<TokenArc>>& arcs) {
  std::vector<ArcTriple> out;
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    for (const TokenArc& a : arcs[i]) {
      out.push_back(ArcTriple{i, a.head, a.label});
    }
  }
  return out;
}

}  // namespace

EvalReport evaluate_corpus(const std::vector<AnnotatedSentence>& gold,
                           const std::vector<Prediction>& pred, EvalMode mode,
                           ModelMode model_mode) {
  if (gold.size() != pred.size()) {
    throw DimensionError("evaluate_corpus: sentence count mismatch");
  }
  std::vector<EntityAnnotation> gold_entities, pred_entities;
  std::vector<std::vector<ArcTriple>> gold_arcs, pred_arcs;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    gold_entities.push_back(gold_annotation(gold[s]));
    pred_entities.push_back(pred_annotation(gold[s], pred[s], model_mode));
    gold_arcs.push_back(arc_triples(gold[s].arcs));
    pred_arcs.push_back(arc_triples(pred[s].arcs));
  }
  return make_report(score_entities(gold_entities, pred_entities, mode),
                     score_relations(gold_entities, gold_arcs, pred_entities,
                                     pred_arcs, mode),
                     mode);
}

}  // namespace jointex
