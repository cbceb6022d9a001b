#pragma once

#include <filesystem>
#include <string>

#include "excite/chain.hpp"

namespace excite {

inline constexpr int kModelFormatVersion = 1;

/// Robot model file: one JSON document, see docs/robot-model-format.md.
RobotModel load_model(const std::filesystem::path& path);
void save_model(const RobotModel& model, const std::filesystem::path& path);

RobotModel model_from_json_text(const std::string& text);
std::string model_to_json_text(const RobotModel& model);

/// FNV-1a 64 of the canonical (compact, key-sorted) JSON form, as 16 hex digits.
std::string model_hash(const RobotModel& model);

/// FNV-1a 64 over raw bytes.
std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace excite
