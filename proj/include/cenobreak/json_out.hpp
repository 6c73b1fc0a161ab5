#pragma once
#include <string>

#include "json.hpp"

namespace cenobreak {

using ojson = nlohmann::ordered_json;

/// Standard metadata block placed under "meta" in every JSON payload:
/// tool name, version, the effective configuration, and a SHA-256 of the
/// input file (empty string when there is no file input).
ojson make_meta(const ojson& config, const std::string& input_sha256);

/// Serializes with 2-space indentation and a trailing newline, atomically.
void write_json_file(const std::string& path, const ojson& payload);

/// One-line error payload written to stderr by the CLI on failure.
std::string error_json(const std::string& code, const std::string& message);

extern const char* const kToolName;
extern const char* const kToolVersion;

}  // namespace cenobreak
