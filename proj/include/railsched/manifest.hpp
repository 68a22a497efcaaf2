#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace railsched {

inline const char* kToolVersion = "railsched 0.1.0";

// Provenance block stamped into every output file: JSON documents embed it
// under a "manifest" key, text/CSV formats as "# manifest ..." comment lines.
// The timestamp honors SOURCE_DATE_EPOCH so equal-seed runs are byte-stable.
struct RunManifest {
    std::string tool_version = kToolVersion;
    std::string command_line;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> input_digests;   // path -> fnv1a64 hex
    std::string timestamp;                              // ISO-8601 UTC
};

std::string fnv1a64_hex(const std::string& bytes);

RunManifest make_manifest(const std::vector<std::string>& command,
                          std::uint64_t seed);
void manifest_add_input(RunManifest& manifest, const std::string& path,
                        const std::string& bytes);

// "# manifest key value" lines for text formats.
std::string manifest_comment_block(const RunManifest& manifest);
// Serialized JSON object for embedding into JSON documents.
std::string manifest_json(const RunManifest& manifest);

} // namespace railsched
