#pragma once

#include <filesystem>

#include "jointex/model.hpp"

namespace jointex {

// Single-file container: magic, manifest length, JSON manifest (format
// version, mode, config, vocab, tags, relation labels, per-tensor
// name/shape/offset, blob checksum), then the raw little-endian float64
// blob. Serialization is canonical: save -> load -> save is byte-identical.
void save_checkpoint(const JointModel& model,
                     const std::filesystem::path& path);

JointModel load_checkpoint(const std::filesystem::path& path);

}  // namespace jointex
