#include "railsched/manifest.hpp"

#include <cstdlib>
#include <ctime>

#include "json.hpp"

namespace railsched {

std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

namespace {

std::string current_timestamp() {
    std::time_t now = std::time(nullptr);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        char* end = nullptr;
        long long value = std::strtoll(epoch, &end, 10);
        if (end && *end == '\0') now = static_cast<std::time_t>(value);
    }
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

RunManifest make_manifest(const std::vector<std::string>& command, std::uint64_t seed) {
    RunManifest m;
    m.seed = seed;
    m.timestamp = current_timestamp();
    for (const std::string& part : command) {
        if (!m.command_line.empty()) m.command_line += ' ';
        m.command_line += part;
    }
    return m;
}

void manifest_add_input(RunManifest& manifest, const std::string& path,
                        const std::string& bytes) {
    manifest.input_digests[path] = fnv1a64_hex(bytes);
}

std::string manifest_comment_block(const RunManifest& manifest) {
    std::string out;
    out += "# manifest tool " + manifest.tool_version + "\n";
    out += "# manifest command " + manifest.command_line + "\n";
    out += "# manifest seed " + std::to_string(manifest.seed) + "\n";
    out += "# manifest timestamp " + manifest.timestamp + "\n";
    for (const auto& [path, digest] : manifest.input_digests)
        out += "# manifest input " + path + " " + digest + "\n";
    return out;
}

std::string manifest_json(const RunManifest& manifest) {
    nlohmann::json doc;
    doc["tool_version"] = manifest.tool_version;
    doc["command_line"] = manifest.command_line;
    doc["seed"] = manifest.seed;
    doc["timestamp"] = manifest.timestamp;
    doc["input_digests"] = manifest.input_digests;
    return doc.dump();
}

} // namespace railsched
