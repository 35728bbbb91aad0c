#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "jointex/layers.hpp"
#include "jointex/rng.hpp"

namespace jointex {

// Entity span; end is inclusive.
struct Span {
  std::size_t start;
  std::size_t end;
  std::string type;
  auto operator<=>(const Span&) const = default;
};

struct TokenArc {
  std::size_t head;
  std::string label;  // "N" marks no relation
  bool operator==(const TokenArc&) const = default;
};

struct AnnotatedSentence {
  std::vector<std::string> tokens;
  std::vector<std::string> bio_tags;
  std::vector<std::vector<TokenArc>> arcs;  // one non-empty list per token
  std::size_t size() const { return tokens.size(); }
};

// Corpus file format: sentences separated by blank lines; one token per line
//   index<TAB>token<TAB>bio_tag<TAB>heads<TAB>relations
// where heads is a comma list of 0-based token indices and relations the
// aligned comma list of labels. A token with no relation carries its own
// index and label N.
std::vector<AnnotatedSentence> parse_corpus(const std::filesystem::path& path);
std::vector<AnnotatedSentence> parse_corpus_text(std::string_view text,
                                                 const std::string& source);
std::string serialize_corpus(const std::vector<AnnotatedSentence>& sentences);
void write_corpus(const std::filesystem::path& path,
                  const std::vector<AnnotatedSentence>& sentences);

// Returns one message per arc whose head is not the final token of a gold
// entity (the head convention for multi-token entities).
std::vector<std::string> validate_head_convention(
    const std::vector<AnnotatedSentence>& sentences);

std::vector<std::string> encode_bio(const std::vector<Span>& spans,
                                    std::size_t n);
// Inverse of encode_bio; an orphan I-X (no preceding B-X/I-X) is repaired to
// B-X rather than rejected.
std::vector<Span> decode_bio(const std::vector<std::string>& tags);

// Symbol tables. Word and char id 0 are reserved for unknowns; relation id 0
// is "N". Word lookup tries the exact form, then lowercase, then unknown.
class Vocab {
 public:
  static Vocab build(const std::vector<AnnotatedSentence>& train);
  static Vocab from_lists(std::vector<std::string> words,
                          std::vector<std::string> chars,
                          std::vector<std::string> relations);

  std::size_t word_id(const std::string& word) const;
  std::vector<std::size_t> char_ids(const std::string& word) const;
  std::size_t relation_id(const std::string& label) const;  // throws DataError
  const std::string& relation_name(std::size_t id) const;

  std::size_t word_count() const { return words_.size(); }
  std::size_t char_count() const { return chars_.size(); }
  std::size_t relation_count() const { return relations_.size(); }

  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::string>& chars() const { return chars_; }
  const std::vector<std::string>& relations() const { return relations_; }

  // Entity types seen in the training tags, sorted.
  static std::vector<std::string> entity_types(
      const std::vector<AnnotatedSentence>& train);

 private:
  std::vector<std::string> words_;      // [0] = unknown
  std::vector<std::string> chars_;      // [0] = unknown, single-byte symbols
  std::vector<std::string> relations_;  // [0] = "N"
  std::unordered_map<std::string, std::size_t> word_index_;
  std::unordered_map<char, std::size_t> char_index_;
  std::unordered_map<std::string, std::size_t> relation_index_;
  void rebuild_indices();
};

struct EmbeddingLoadStats {
  std::size_t dim = 0;
  std::size_t file_rows = 0;
  std::size_t matched_exact = 0;
  std::size_t matched_lowercase = 0;
  std::size_t missing = 0;  // in-vocab words initialized randomly
};

// Text format: one `word v1 ... vd` line per word, constant d. Rows for
// in-vocab words are copied (exact match first, then lowercase); the rest
// are initialized uniform(-0.25, 0.25) from rng. Duplicate words keep the
// first occurrence.
EmbeddingTable load_pretrained_embeddings(const std::filesystem::path& path,
                                          const Vocab& vocab, bool trainable,
                                          Rng& rng,
                                          EmbeddingLoadStats* stats = nullptr);

}  // namespace jointex
