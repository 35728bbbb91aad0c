#include "jointex/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "jointex/errors.hpp"

namespace jointex {

namespace {

using nlohmann::json;

template <typename T>
void read_key(const json& j, const char* key, T& out) {
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
  }
}

const char* const kKnownKeys[] = {
    "train_corpus", "dev_corpus", "test_corpus", "embeddings", "checkpoint",
    "output_dir", "word_dim", "char_dim", "char_hidden", "hidden",
    "rel_hidden", "label_dim", "dropout", "mode", "constrain_bio",
    "rel_threshold", "teacher_forcing", "train_word_embeddings", "lr",
    "beta1", "beta2", "adam_eps", "patience", "max_epochs", "seed",
    "eval_mode", "adv_enabled", "alpha", "adv_per_token_norm"};

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text,
                                    const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(source + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError(source + ": config must be a JSON object");

  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : kKnownKeys) {
      if (key == k) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError(source + ": unknown config key '" + key + "'");
  }

  RunConfig c;
  read_key(j, "train_corpus", c.train_corpus);
  read_key(j, "dev_corpus", c.dev_corpus);
  read_key(j, "test_corpus", c.test_corpus);
  read_key(j, "embeddings", c.embeddings);
  read_key(j, "checkpoint", c.checkpoint);
  read_key(j, "output_dir", c.output_dir);
  read_key(j, "word_dim", c.word_dim);
  read_key(j, "char_dim", c.char_dim);
  read_key(j, "char_hidden", c.char_hidden);
  read_key(j, "hidden", c.hidden);
  read_key(j, "rel_hidden", c.rel_hidden);
  read_key(j, "label_dim", c.label_dim);
  read_key(j, "dropout", c.dropout);
  read_key(j, "mode", c.mode);
  read_key(j, "constrain_bio", c.constrain_bio);
  read_key(j, "rel_threshold", c.rel_threshold);
  read_key(j, "teacher_forcing", c.teacher_forcing);
  read_key(j, "train_word_embeddings", c.train_word_embeddings);
  read_key(j, "lr", c.lr);
  read_key(j, "beta1", c.beta1);
  read_key(j, "beta2", c.beta2);
  read_key(j, "adam_eps", c.adam_eps);
  read_key(j, "patience", c.patience);
  read_key(j, "max_epochs", c.max_epochs);
  read_key(j, "eval_mode", c.eval_mode);
  read_key(j, "adv_enabled", c.adv_enabled);
  read_key(j, "alpha", c.alpha);
  read_key(j, "adv_per_token_norm", c.adv_per_token_norm);

  if (j.contains("seed")) {
    read_key(j, "seed", c.seed);
  } else if (const char* env = std::getenv("JOINTEX_SEED")) {
    try {
      c.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError("JOINTEX_SEED is not an integer");
    }
  }
  return c;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str(), path.string());
}

std::string RunConfig::to_json_text() const {
  json j{{"train_corpus", train_corpus},
         {"dev_corpus", dev_corpus},
         {"test_corpus", test_corpus},
         {"embeddings", embeddings},
         {"checkpoint", checkpoint},
         {"output_dir", output_dir},
         {"word_dim", word_dim},
         {"char_dim", char_dim},
         {"char_hidden", char_hidden},
         {"hidden", hidden},
         {"rel_hidden", rel_hidden},
         {"label_dim", label_dim},
         {"dropout", dropout},
         {"mode", mode},
         {"constrain_bio", constrain_bio},
         {"rel_threshold", rel_threshold},
         {"teacher_forcing", teacher_forcing},
         {"train_word_embeddings", train_word_embeddings},
         {"lr", lr},
         {"beta1", beta1},
         {"beta2", beta2},
         {"adam_eps", adam_eps},
         {"patience", patience},
         {"max_epochs", max_epochs},
         {"seed", seed},
         {"eval_mode", eval_mode},
         {"adv_enabled", adv_enabled},
         {"alpha", alpha},
         {"adv_per_token_norm", adv_per_token_norm}};
  return j.dump(2) + "\n";
}

void RunConfig::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write config echo: " + path.string());
  out << to_json_text();
}

void RunConfig::validate() const {
  if (mode != "ner-crf" && mode != "ec-softmax") {
    throw ConfigError("mode must be 'ner-crf' or 'ec-softmax'");
  }
  eval_mode_from_string(eval_mode);  // throws on bad values
  if (eval_mode == "R" && mode == "ner-crf") {
    throw ConfigError("relaxed evaluation assumes known boundaries; use mode "
                      "'ec-softmax'");
  }
  if (dropout < 0.0 || dropout >= 1.0) {
    throw ConfigError("dropout must be in [0, 1)");
  }
  if (rel_threshold <= 0.0 || rel_threshold >= 1.0) {
    throw ConfigError("rel_threshold must be in (0, 1)");
  }
  if (alpha <= 0.0 || alpha > 1.0) throw ConfigError("alpha must be in (0, 1]");
  if (lr <= 0.0) throw ConfigError("lr must be positive");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
    throw ConfigError("beta1 and beta2 must be in [0, 1)");
  }
  if (max_epochs == 0) throw ConfigError("max_epochs must be at least 1");
  const std::size_t dims[] = {word_dim,   char_dim,  char_hidden,
                              hidden,     rel_hidden, label_dim};
  for (std::size_t d : dims) {
    if (d == 0) throw ConfigError("model dimensions must be positive");
  }
}

ModelConfig RunConfig::model_config() const {
  ModelConfig m;
  m.word_dim = word_dim;
  m.char_dim = char_dim;
  m.char_hidden = char_hidden;
  m.hidden = hidden;
  m.rel_hidden = rel_hidden;
  m.label_dim = label_dim;
  m.dropout = dropout;
  m.mode = (mode == "ner-crf") ? ModelMode::NerCrf : ModelMode::EcSoftmax;
  m.constrain_bio = constrain_bio;
  m.rel_threshold = rel_threshold;
  m.teacher_forcing = teacher_forcing;
  m.train_word_embeddings = train_word_embeddings;
  return m;
}

FitConfig RunConfig::fit_config() const {
  FitConfig f;
  f.max_epochs = max_epochs;
  f.patience = patience;
  f.seed = seed;
  f.eval_mode = eval_mode_from_string(eval_mode);
  f.adam.lr = lr;
  f.adam.beta1 = beta1;
  f.adam.beta2 = beta2;
  f.adam.eps = adam_eps;
  f.adv.enabled = adv_enabled;
  f.adv.alpha = alpha;
  f.adv.per_token_norm = adv_per_token_norm;
  f.output_dir = output_dir;
  return f;
}

}  // namespace jointex
