#pragma once

#include "echosite/scatter.hpp"

#include <filesystem>
#include <string>

namespace echosite {

/// JSON document: {"kind", "pose": {...}, "frequency_hz", "face_count",
/// "a0_m", "evaluated_terms", "values": [...]}.
std::string map_to_json(const ReflectionMap& map, bool in_db = false);
ReflectionMap map_from_json(const std::string& text);

/// `face_id,value` lines under a header row.
std::string map_to_csv(const ReflectionMap& map, bool in_db = false);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

} // namespace echosite
