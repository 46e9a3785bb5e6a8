#pragma once

#include <filesystem>
#include <string>

#include "flatspace/serialization.hpp"

namespace flatspace::cli {

/// UTC timestamp, the only line of an output file outside the determinism contract.
std::string utc_timestamp();

/// "# config: <compact json>\n# generated: <timestamp>\n"
std::string csv_header(const json& config);

/// Writes to a sibling temp file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

void write_csv(const std::filesystem::path& path, const json& config, const std::string& body);
/// Wraps `body` as {"config": ..., "generated": ..., "result": body}.
void write_json(const std::filesystem::path& path, const json& config, const json& body);

}  // namespace flatspace::cli
