#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace jointex {

enum class TagKind { Outside, Begin, Inside, TypeOnly };

// Ordered tag inventory. Two variants:
//   - BIO: O plus B-X/I-X per entity type (2K+1 tags), for sequence tagging.
//   - type-only: O plus one tag per entity type (K+1), for classification
//     with boundaries given.
// Tag 0 is always O. Indices are stable across save/load.
class TagScheme {
 public:
  static TagScheme bio(std::vector<std::string> entity_types);
  static TagScheme type_only(std::vector<std::string> entity_types);
  // Rebuild from a saved ordered tag list.
  static TagScheme from_tag_names(const std::vector<std::string>& tags,
                                  bool bio_mode);

  std::size_t size() const { return names_.size(); }
  bool bio_mode() const { return bio_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<std::string>& entity_types() const { return types_; }

  const std::string& name(std::size_t index) const;
  std::size_t index_of(const std::string& tag) const;  // throws DataError
  bool contains(const std::string& tag) const;

  TagKind kind(std::size_t index) const;
  // Entity type of a B-/I-/type tag; empty for O.
  const std::string& type_of(std::size_t index) const;

  std::size_t outside_index() const { return 0; }

  // BIO well-formedness: I-X may only follow B-X or I-X, never start a
  // sentence. Always true in type-only mode.
  bool allowed_at_start(std::size_t tag) const;
  bool transition_allowed(std::size_t from, std::size_t to) const;

 private:
  std::vector<std::string> names_;
  std::vector<TagKind> kinds_;
  std::vector<std::string> tag_types_;  // per tag; "" for O
  std::vector<std::string> types_;
  bool bio_ = true;
};

}  // namespace jointex
