#pragma once

#include <string>

#include <json.hpp>

namespace steprl {

/// Serializes a JSON value with byte-stable formatting: object keys in
/// sorted order (nlohmann's default map) and every floating-point number
/// rendered with exactly six decimal places. Reports and metrics files are
/// written through this so repeated runs compare byte-for-byte.
std::string dump_fixed(const nlohmann::json& j);

/// dump_fixed plus trailing newline, written to `path`.
void write_report(const std::string& path, const nlohmann::json& j);

} // namespace steprl
