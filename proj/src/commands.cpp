#include "jointex/commands.hpp"

#include <fstream>
#include <iostream>

#include "jointex/checkpoint.hpp"
#include "jointex/data.hpp"
#include "jointex/errors.hpp"
#include "jointex/trainer.hpp"

namespace jointex {

namespace {

int guard(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
}

}  // namespace

int cmd_train(const std::string& config_path, const TrainOverrides& overrides) {
  return guard([&]() {
    RunConfig config = RunConfig::from_file(config_path);
    if (overrides.alpha) config.alpha = *overrides.alpha;
    if (overrides.adv_enabled) config.adv_enabled = *overrides.adv_enabled;
    if (overrides.seed) config.seed = *overrides.seed;
    config.validate();
    if (config.train_corpus.empty()) {
      throw ConfigError("missing config key 'train_corpus'");
    }
    if (config.dev_corpus.empty()) {
      throw ConfigError("missing config key 'dev_corpus'");
    }

    std::filesystem::create_directories(config.output_dir);
    config.save(std::filesystem::path(config.output_dir) / "config.json");

    const auto train = parse_corpus(config.train_corpus);
    const auto dev = parse_corpus(config.dev_corpus);

    Vocab vocab = Vocab::build(train);
    const auto types = Vocab::entity_types(train);
    TagScheme tags = (config.mode == "ner-crf") ? TagScheme::bio(types)
                                                : TagScheme::type_only(types);

    Rng rng(config.seed);
    std::optional<EmbeddingTable> pretrained;
    if (!config.embeddings.empty()) {
      pretrained = load_pretrained_embeddings(config.embeddings, vocab,
                                              config.train_word_embeddings, rng);
    }
    JointModel model(config.model_config(), vocab, tags, vocab.relations(), rng,
                     std::move(pretrained));

    FitReport report = fit(model, train, dev, config.fit_config());
    std::cerr << "best epoch " << report.best_epoch << " with dev overall F1 "
              << report.best_overall_f1 << "\n";

    // Final dev report from the best checkpoint.
    if (!report.epochs.empty()) {
      JointModel best = std::filesystem::exists(report.best_checkpoint)
                            ? load_checkpoint(report.best_checkpoint)
                            : std::move(model);
      std::vector<Prediction> preds;
      for (const AnnotatedSentence& s : dev) preds.push_back(best.predict(s.tokens));
      EvalReport eval = evaluate_corpus(
          dev, preds, eval_mode_from_string(config.eval_mode),
          best.config().mode);
      std::cout << eval.to_text();
      std::ofstream out(std::filesystem::path(config.output_dir) / "dev_eval.csv",
                        std::ios::binary);
      out << EvalReport::csv_header() << "\n" << eval.csv_row("dev") << "\n";
    }
    return kExitOk;
  });
}

int cmd_eval(const std::string& config_path, const std::string& checkpoint,
             const std::string& corpus, const std::string& mode) {
  return guard([&]() {
    RunConfig config = RunConfig::from_file(config_path);
    const EvalMode eval_mode = eval_mode_from_string(mode);

    JointModel model = load_checkpoint(checkpoint);
    if (eval_mode == EvalMode::Relaxed &&
        model.config().mode == ModelMode::NerCrf) {
      throw ConfigError(
          "relaxed evaluation assumes known boundaries; this checkpoint "
          "predicts boundaries itself");
    }

    const auto gold = parse_corpus(corpus);
    std::vector<Prediction> preds;
    preds.reserve(gold.size());
    for (const AnnotatedSentence& s : gold) preds.push_back(model.predict(s.tokens));
    EvalReport report = evaluate_corpus(gold, preds, eval_mode,
                                        model.config().mode);
    std::cout << report.to_text();

    std::filesystem::create_directories(config.output_dir);
    std::ofstream out(std::filesystem::path(config.output_dir) / "eval.csv",
                      std::ios::binary);
    if (!out) throw DataError("cannot write eval.csv under " + config.output_dir);
    out << EvalReport::csv_header() << "\n" << report.csv_row(corpus) << "\n";
    return kExitOk;
  });
}

int cmd_predict(const std::string& checkpoint, const std::string& input_path,
                const std::string& output_path) {
  return guard([&]() {
    JointModel model = load_checkpoint(checkpoint);
    const auto input = parse_corpus(input_path);

    std::vector<AnnotatedSentence> output;
    output.reserve(input.size());
    for (const AnnotatedSentence& s : input) {
      Prediction pred = model.predict(s.tokens);
      AnnotatedSentence out;
      out.tokens = s.tokens;
      out.bio_tags = std::move(pred.tags);
      out.arcs = std::move(pred.arcs);
      output.push_back(std::move(out));
    }
    write_corpus(output_path, output);
    return kExitOk;
  });
}

}  // namespace jointex
