#include "jointex/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "jointex/errors.hpp"

namespace jointex {

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'J', 'R', 'E', 'X', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kFormatVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

std::uint64_t fnv1a(const unsigned char* data, std::size_t len) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < len; ++i) {
    hash ^= data[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

json config_to_json(const ModelConfig& c) {
  return json{{"word_dim", c.word_dim},
              {"char_dim", c.char_dim},
              {"char_hidden", c.char_hidden},
              {"hidden", c.hidden},
              {"rel_hidden", c.rel_hidden},
              {"label_dim", c.label_dim},
              {"dropout", c.dropout},
              {"mode", c.mode == ModelMode::NerCrf ? "ner-crf" : "ec-softmax"},
              {"constrain_bio", c.constrain_bio},
              {"rel_threshold", c.rel_threshold},
              {"teacher_forcing", c.teacher_forcing},
              {"train_word_embeddings", c.train_word_embeddings}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.word_dim = j.at("word_dim").get<std::size_t>();
  c.char_dim = j.at("char_dim").get<std::size_t>();
  c.char_hidden = j.at("char_hidden").get<std::size_t>();
  c.hidden = j.at("hidden").get<std::size_t>();
  c.rel_hidden = j.at("rel_hidden").get<std::size_t>();
  c.label_dim = j.at("label_dim").get<std::size_t>();
  c.dropout = j.at("dropout").get<double>();
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "ner-crf") {
    c.mode = ModelMode::NerCrf;
  } else if (mode == "ec-softmax") {
    c.mode = ModelMode::EcSoftmax;
  } else {
    throw CheckpointError("unknown model mode in checkpoint: " + mode);
  }
  c.constrain_bio = j.at("constrain_bio").get<bool>();
  c.rel_threshold = j.at("rel_threshold").get<double>();
  c.teacher_forcing = j.at("teacher_forcing").get<bool>();
  c.train_word_embeddings = j.at("train_word_embeddings").get<bool>();
  return c;
}

}  // namespace

void save_checkpoint(const JointModel& model,
                     const std::filesystem::path& path) {
  json tensors = json::array();
  std::vector<double> blob;
  for (const auto& [name, tensor] : model.params().entries()) {
    tensors.push_back(json{{"name", name},
                           {"shape", tensor.shape()},
                           {"offset", blob.size()}});
    blob.insert(blob.end(), tensor.values().begin(), tensor.values().end());
  }
  const auto* blob_bytes = reinterpret_cast<const unsigned char*>(blob.data());
  const std::size_t blob_len = blob.size() * sizeof(double);

  json manifest{{"format_version", kFormatVersion},
                {"config", config_to_json(model.config())},
                {"vocab",
                 json{{"words", model.vocab().words()},
                      {"chars", model.vocab().chars()},
                      {"relations", model.vocab().relations()}}},
                {"tags", model.tags().names()},
                {"tensors", tensors},
                {"blob_values", blob.size()},
                {"blob_fnv1a", fnv1a(blob_bytes, blob_len)}};
  const std::string manifest_text = manifest.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path.string());
  out.write(kMagic, sizeof(kMagic));
  const std::uint64_t manifest_len = manifest_text.size();
  out.write(reinterpret_cast<const char*>(&manifest_len), sizeof(manifest_len));
  out.write(manifest_text.data(), static_cast<std::streamsize>(manifest_len));
  out.write(reinterpret_cast<const char*>(blob.data()),
            static_cast<std::streamsize>(blob_len));
  if (!out) throw DataError("failed writing checkpoint: " + path.string());
}

JointModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path.string());

  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError("not a checkpoint file: " + path.string());
  }
  std::uint64_t manifest_len = 0;
  in.read(reinterpret_cast<char*>(&manifest_len), sizeof(manifest_len));
  if (!in) throw CheckpointError("truncated checkpoint header");
  std::string manifest_text(manifest_len, '\0');
  in.read(manifest_text.data(), static_cast<std::streamsize>(manifest_len));
  if (!in) throw CheckpointError("truncated checkpoint manifest");

  json manifest;
  try {
    manifest = json::parse(manifest_text);
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("bad checkpoint manifest: ") + e.what());
  }
  const auto version = manifest.at("format_version").get<std::uint32_t>();
  if (version != kFormatVersion) {
    throw CheckpointError("unsupported checkpoint format version " +
                          std::to_string(version));
  }

  const std::size_t blob_values = manifest.at("blob_values").get<std::size_t>();
  std::vector<double> blob(blob_values);
  in.read(reinterpret_cast<char*>(blob.data()),
          static_cast<std::streamsize>(blob_values * sizeof(double)));
  if (!in || in.gcount() !=
                 static_cast<std::streamsize>(blob_values * sizeof(double))) {
    throw CheckpointError("truncated checkpoint blob");
  }
  const auto stored_hash = manifest.at("blob_fnv1a").get<std::uint64_t>();
  const auto actual_hash =
      fnv1a(reinterpret_cast<const unsigned char*>(blob.data()),
            blob.size() * sizeof(double));
  if (stored_hash != actual_hash) {
    throw CheckpointError("checkpoint checksum mismatch (corrupted blob)");
  }

  const ModelConfig config = config_from_json(manifest.at("config"));
  auto relations =
      manifest.at("vocab").at("relations").get<std::vector<std::string>>();
  Vocab vocab = Vocab::from_lists(
      manifest.at("vocab").at("words").get<std::vector<std::string>>(),
      manifest.at("vocab").at("chars").get<std::vector<std::string>>(),
      relations);
  TagScheme tags = TagScheme::from_tag_names(
      manifest.at("tags").get<std::vector<std::string>>(),
      config.mode == ModelMode::NerCrf);

  Rng rng(0);  // initial values are overwritten below
  JointModel model(config, std::move(vocab), std::move(tags),
                   std::move(relations), rng);

  std::size_t filled = 0;
  for (const auto& rec : manifest.at("tensors")) {
    const std::string name = rec.at("name").get<std::string>();
    const auto shape = rec.at("shape").get<std::vector<std::size_t>>();
    const std::size_t offset = rec.at("offset").get<std::size_t>();
    if (!model.params().contains(name)) {
      throw CheckpointError("checkpoint tensor has no model slot: " + name);
    }
    Tensor t = model.params().get(name);
    if (t.shape() != shape) {
      throw CheckpointError("checkpoint tensor shape mismatch: " + name);
    }
    if (offset + t.size() > blob.size()) {
      throw CheckpointError("checkpoint tensor outside blob: " + name);
    }
    std::copy(blob.begin() + static_cast<std::ptrdiff_t>(offset),
              blob.begin() + static_cast<std::ptrdiff_t>(offset + t.size()),
              t.values().begin());
    ++filled;
  }
  if (filled != model.params().entries().size()) {
    throw CheckpointError("checkpoint does not cover every model tensor");
  }
  return model;
}

}  // namespace jointex
