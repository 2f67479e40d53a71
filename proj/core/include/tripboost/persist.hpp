#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "tripboost/model.hpp"

namespace tripboost {

/// Model document layout:
///
///   tripboost-model <version> fnv1a64:<16 hex digits>\n
///   <JSON payload>
///
/// The checksum covers the payload bytes exactly. The payload holds the
/// registry name, the model family and every fitted parameter; trees are
/// node arrays in pre-order, each node either
///   ["split", feature, threshold, left, right, value, count] or
///   ["leaf", value, count].
/// Doubles are written in shortest round-trip form, so a loaded model
/// predicts bit-identically to the saved one.
inline constexpr int kModelFormatVersion = 1;

std::string serialize_model(const Model& model);

/// Throws FormatError on a bad header, unknown version, checksum mismatch
/// (corrupted or truncated document) or malformed payload.
Model deserialize_model(std::string_view document);

/// Atomic write (temporary file + rename).
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace tripboost
