#include "jointex/data.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "jointex/errors.hpp"

namespace jointex {

namespace {

std::string lowercase(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string::size_type pos = 0;
  while (true) {
    auto next = s.find(sep, pos);
    if (next == std::string::npos) {
      parts.push_back(s.substr(pos));
      return parts;
    }
    parts.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

[[noreturn]] void parse_fail(const std::string& source, std::size_t line_no,
                             const std::string& message) {
  throw DataError(source + ":" + std::to_string(line_no) + ": " + message);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::vector<AnnotatedSentence> parse_corpus_text(std::string_view text,
                                                 const std::string& source) {
  std::vector<AnnotatedSentence> sentences;
  AnnotatedSentence current;
  std::vector<std::size_t> line_starts;  // line number of each token

  auto flush = [&](std::size_t line_no) {
    if (current.tokens.empty()) return;
    for (std::size_t i = 0; i < current.arcs.size(); ++i) {
      for (const TokenArc& a : current.arcs[i]) {
        if (a.head >= current.size()) {
          parse_fail(source, line_starts[i], "head index out of range");
        }
        if (a.label == "N" && a.head != i) {
          parse_fail(source, line_starts[i], "label N must point to the token itself");
        }
      }
    }
    sentences.push_back(std::move(current));
    current = AnnotatedSentence{};
    line_starts.clear();
    (void)line_no;
  };

  std::size_t line_no = 0;
  std::string line;
  std::istringstream in{std::string(text)};
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush(line_no);
      continue;
    }
    const std::vector<std::string> cols = split(line, '\t');
    if (cols.size() != 5) {
      parse_fail(source, line_no, "expected 5 tab-separated columns");
    }
    std::size_t index = 0;
    try {
      index = std::stoul(cols[0]);
    } catch (const std::exception&) {
      parse_fail(source, line_no, "non-integer token index");
    }
    if (index != current.tokens.size()) {
      parse_fail(source, line_no, "token index out of order");
    }
    const std::vector<std::string> heads = split(cols[3], ',');
    const std::vector<std::string> labels = split(cols[4], ',');
    if (heads.size() != labels.size()) {
      parse_fail(source, line_no, "heads and relations have different arity");
    }
    std::vector<TokenArc> arcs;
    for (std::size_t a = 0; a < heads.size(); ++a) {
      std::size_t head = 0;
      try {
        head = std::stoul(heads[a]);
      } catch (const std::exception&) {
        parse_fail(source, line_no, "non-integer head index");
      }
      if (labels[a].empty()) parse_fail(source, line_no, "empty relation label");
      arcs.push_back(TokenArc{head, labels[a]});
    }
    // Drop redundant self-N entries; keep the bare self-N fallback.
    if (arcs.size() > 1) {
      const TokenArc self{index, "N"};
      arcs.erase(std::remove(arcs.begin(), arcs.end(), self), arcs.end());
      if (arcs.empty()) arcs.push_back(self);
    }
    current.tokens.push_back(cols[1]);
    current.bio_tags.push_back(cols[2]);
    current.arcs.push_back(std::move(arcs));
    line_starts.push_back(line_no);
  }
  flush(line_no + 1);
  return sentences;
}

std::vector<AnnotatedSentence> parse_corpus(const std::filesystem::path& path) {
  return parse_corpus_text(read_file(path), path.string());
}

std::string serialize_corpus(const std::vector<AnnotatedSentence>& sentences) {
  std::ostringstream out;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const AnnotatedSentence& sent = sentences[s];
    for (std::size_t i = 0; i < sent.size(); ++i) {
      out << i << '\t' << sent.tokens[i] << '\t' << sent.bio_tags[i] << '\t';
      for (std::size_t a = 0; a < sent.arcs[i].size(); ++a) {
        if (a > 0) out << ',';
        out << sent.arcs[i][a].head;
      }
      out << '\t';
      for (std::size_t a = 0; a < sent.arcs[i].size(); ++a) {
        if (a > 0) out << ',';
        out << sent.arcs[i][a].label;
      }
      out << '\n';
    }
    if (s + 1 < sentences.size()) out << '\n';
  }
  return out.str();
}

void write_corpus(const std::filesystem::path& path,
                  const std::vector<AnnotatedSentence>& sentences) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path.string());
  out << serialize_corpus(sentences);
}

std::vector<std::string> validate_head_convention(
    const std::vector<AnnotatedSentence>& sentences) {
  std::vector<std::string> violations;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const AnnotatedSentence& sent = sentences[s];
    const std::vector<Span> spans = decode_bio(sent.bio_tags);
    std::vector<bool> entity_final(sent.size(), false);
    for (const Span& sp : spans) entity_final[sp.end] = true;
    for (std::size_t i = 0; i < sent.size(); ++i) {
      for (const TokenArc& a : sent.arcs[i]) {
        if (a.label == "N") continue;
        if (!entity_final[a.head]) {
          violations.push_back("sentence " + std::to_string(s) + ", token " +
                               std::to_string(i) + ": head " +
                               std::to_string(a.head) +
                               " is not the final token of an entity");
        }
      }
    }
  }
  return violations;
}

std::vector<std::string> encode_bio(const std::vector<Span>& spans,
                                    std::size_t n) {
  std::vector<std::string> tags(n, "O");
  std::vector<bool> used(n, false);
  for (const Span& sp : spans) {
    if (sp.start > sp.end || sp.end >= n) {
      throw DataError("encode_bio: span out of range");
    }
    for (std::size_t i = sp.start; i <= sp.end; ++i) {
      if (used[i]) throw DataError("encode_bio: overlapping spans");
      used[i] = true;
    }
    tags[sp.start] = "B-" + sp.type;
    for (std::size_t i = sp.start + 1; i <= sp.end; ++i) tags[i] = "I-" + sp.type;
  }
  return tags;
}

std::vector<Span> decode_bio(const std::vector<std::string>& tags) {
  std::vector<Span> spans;
  bool open = false;
  Span current{};
  auto close = [&]() {
    if (open) spans.push_back(current);
    open = false;
  };
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const std::string& tag = tags[i];
    if (tag == "O" || tag.size() < 3 || tag[1] != '-') {
      close();
      continue;
    }
    const char head = tag[0];
    const std::string type = tag.substr(2);
    if (head == 'B' || (head == 'I' && (!open || current.type != type))) {
      // A fresh B, or an orphan I repaired to a span start.
      close();
      open = true;
      current = Span{i, i, type};
    } else if (head == 'I') {
      current.end = i;
    } else {
      close();
    }
  }
  close();
  return spans;
}

Vocab Vocab::build(const std::vector<AnnotatedSentence>& train) {
  Vocab v;
  v.words_.push_back("<unk>");
  v.chars_.push_back("<unk>");
  v.relations_.push_back("N");

  std::set<std::string> relation_set;
  for (const AnnotatedSentence& sent : train) {
    for (const std::string& tok : sent.tokens) {
      if (!v.word_index_.count(tok)) {
        v.word_index_[tok] = v.words_.size();
        v.words_.push_back(tok);
      }
      for (char c : tok) {
        if (!v.char_index_.count(c)) {
          v.char_index_[c] = v.chars_.size();
          v.chars_.push_back(std::string(1, c));
        }
      }
    }
    for (const auto& arcs : sent.arcs) {
      for (const TokenArc& a : arcs) {
        if (a.label != "N") relation_set.insert(a.label);
      }
    }
  }
  for (const std::string& r : relation_set) v.relations_.push_back(r);
  v.rebuild_indices();
  return v;
}

Vocab Vocab::from_lists(std::vector<std::string> words,
                        std::vector<std::string> chars,
                        std::vector<std::string> relations) {
  Vocab v;
  v.words_ = std::move(words);
  v.chars_ = std::move(chars);
  v.relations_ = std::move(relations);
  if (v.words_.empty() || v.chars_.empty() || v.relations_.empty() ||
      v.relations_[0] != "N") {
    throw DataError("Vocab::from_lists: malformed symbol lists");
  }
  v.rebuild_indices();
  return v;
}

void Vocab::rebuild_indices() {
  word_index_.clear();
  char_index_.clear();
  relation_index_.clear();
  for (std::size_t i = 0; i < words_.size(); ++i) word_index_[words_[i]] = i;
  for (std::size_t i = 1; i < chars_.size(); ++i) {
    if (chars_[i].size() != 1) throw DataError("Vocab: bad char symbol");
    char_index_[chars_[i][0]] = i;
  }
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    relation_index_[relations_[i]] = i;
  }
}

std::size_t Vocab::word_id(const std::string& word) const {
  auto it = word_index_.find(word);
  if (it != word_index_.end()) return it->second;
  it = word_index_.find(lowercase(word));
  if (it != word_index_.end()) return it->second;
  return 0;
}

std::vector<std::size_t> Vocab::char_ids(const std::string& word) const {
  if (word.empty()) return {0};
  std::vector<std::size_t> ids;
  ids.reserve(word.size());
  for (char c : word) {
    auto it = char_index_.find(c);
    ids.push_back(it != char_index_.end() ? it->second : 0);
  }
  return ids;
}

std::size_t Vocab::relation_id(const std::string& label) const {
  auto it = relation_index_.find(label);
  if (it == relation_index_.end()) {
    throw DataError("unknown relation label: " + label);
  }
  return it->second;
}

const std::string& Vocab::relation_name(std::size_t id) const {
  if (id >= relations_.size()) throw DataError("relation id out of range");
  return relations_[id];
}

std::vector<std::string> Vocab::entity_types(
    const std::vector<AnnotatedSentence>& train) {
  std::set<std::string> types;
  for (const AnnotatedSentence& sent : train) {
    for (const Span& sp : decode_bio(sent.bio_tags)) types.insert(sp.type);
  }
  return {types.begin(), types.end()};
}

EmbeddingTable load_pretrained_embeddings(const std::filesystem::path& path,
                                          const Vocab& vocab, bool trainable,
                                          Rng& rng, EmbeddingLoadStats* stats) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings file: " + path.string());

  std::unordered_map<std::string, std::vector<double>> file_vectors;
  std::size_t dim = 0;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    std::vector<double> vec;
    double value;
    while (ls >> value) vec.push_back(value);
    if (vec.empty()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": embedding line has no values");
    }
    if (dim == 0) {
      dim = vec.size();
    } else if (vec.size() != dim) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": inconsistent embedding dimension");
    }
    if (file_vectors.count(word)) {
      std::cerr << "warning: duplicate embedding for '" << word
                << "', keeping the first\n";
      continue;
    }
    file_vectors[word] = std::move(vec);
  }
  if (dim == 0) throw DataError("embeddings file is empty: " + path.string());

  EmbeddingLoadStats local;
  local.dim = dim;
  local.file_rows = file_vectors.size();

  Tensor weights = Tensor::zeros({vocab.word_count(), dim});
  for (std::size_t w = 0; w < vocab.word_count(); ++w) {
    const std::string& word = vocab.words()[w];
    const std::vector<double>* vec = nullptr;
    auto it = file_vectors.find(word);
    if (it != file_vectors.end()) {
      vec = &it->second;
      ++local.matched_exact;
    } else {
      it = file_vectors.find(lowercase(word));
      if (it != file_vectors.end()) {
        vec = &it->second;
        ++local.matched_lowercase;
      }
    }
    if (vec) {
      for (std::size_t j = 0; j < dim; ++j) weights.at(w, j) = (*vec)[j];
    } else {
      ++local.missing;
      for (std::size_t j = 0; j < dim; ++j) {
        weights.at(w, j) = uniform_real(rng, -0.25, 0.25);
      }
    }
  }
  weights.set_requires_grad(trainable);

  const double coverage =
      vocab.word_count() == 0
          ? 0.0
          : 100.0 * static_cast<double>(local.matched_exact + local.matched_lowercase) /
                static_cast<double>(vocab.word_count());
  std::cerr << "embeddings: " << local.file_rows << " rows, dim " << dim << ", "
            << local.matched_exact << " exact + " << local.matched_lowercase
            << " lowercase matches, " << local.missing
            << " randomly initialized (" << coverage << "% coverage)\n";
  if (stats) *stats = local;
  return EmbeddingTable(weights);
}

}  // namespace jointex
