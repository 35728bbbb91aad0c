#include "jointex/tagset.hpp"

#include <algorithm>

#include "jointex/errors.hpp"

namespace jointex {

TagScheme TagScheme::bio(std::vector<std::string> entity_types) {
  TagScheme s;
  s.bio_ = true;
  s.types_ = std::move(entity_types);
  s.names_.push_back("O");
  s.kinds_.push_back(TagKind::Outside);
  s.tag_types_.push_back("");
  for (const auto& t : s.types_) {
    s.names_.push_back("B-" + t);
    s.kinds_.push_back(TagKind::Begin);
    s.tag_types_.push_back(t);
    s.names_.push_back("I-" + t);
    s.kinds_.push_back(TagKind::Inside);
    s.tag_types_.push_back(t);
  }
  return s;
}

TagScheme TagScheme::type_only(std::vector<std::string> entity_types) {
  TagScheme s;
  s.bio_ = false;
  s.types_ = std::move(entity_types);
  s.names_.push_back("O");
  s.kinds_.push_back(TagKind::Outside);
  s.tag_types_.push_back("");
  for (const auto& t : s.types_) {
    s.names_.push_back(t);
    s.kinds_.push_back(TagKind::TypeOnly);
    s.tag_types_.push_back(t);
  }
  return s;
}

TagScheme TagScheme::from_tag_names(const std::vector<std::string>& tags,
                                    bool bio_mode) {
  std::vector<std::string> types;
  for (const auto& t : tags) {
    if (t == "O") continue;
    std::string type = bio_mode ? t.substr(2) : t;
    if (bio_mode && (t.size() < 3 || (t[0] != 'B' && t[0] != 'I') || t[1] != '-')) {
      throw DataError("invalid BIO tag name: " + t);
    }
    if (std::find(types.begin(), types.end(), type) == types.end()) {
      types.push_back(type);
    }
  }
  TagScheme s = bio_mode ? bio(std::move(types)) : type_only(std::move(types));
  if (s.names_ != tags) {
    throw DataError("tag list is not in canonical scheme order");
  }
  return s;
}

const std::string& TagScheme::name(std::size_t index) const {
  if (index >= names_.size()) throw DataError("tag index out of range");
  return names_[index];
}

std::size_t TagScheme::index_of(const std::string& tag) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == tag) return i;
  }
  throw DataError("unknown tag: " + tag);
}

bool TagScheme::contains(const std::string& tag) const {
  return std::find(names_.begin(), names_.end(), tag) != names_.end();
}

TagKind TagScheme::kind(std::size_t index) const {
  if (index >= kinds_.size()) throw DataError("tag index out of range");
  return kinds_[index];
}

const std::string& TagScheme::type_of(std::size_t index) const {
  if (index >= tag_types_.size()) throw DataError("tag index out of range");
  return tag_types_[index];
}

bool TagScheme::allowed_at_start(std::size_t tag) const {
  if (!bio_) return true;
  return kind(tag) != TagKind::Inside;
}

bool TagScheme::transition_allowed(std::size_t from, std::size_t to) const {
  if (!bio_) return true;
  if (kind(to) != TagKind::Inside) return true;
  // I-X requires the previous tag to be B-X or I-X.
  if (kind(from) == TagKind::Outside) return false;
  return type_of(from) == type_of(to);
}

}  // namespace jointex
