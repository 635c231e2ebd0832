#include "manifest.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>

#include <json.hpp>

#include "m3s/digest.hpp"
#include "m3s/errors.hpp"

namespace m3s::cli {

using nlohmann::json;

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::string git_describe_string() {
    FILE* pipe = popen("git describe --always --dirty 2>/dev/null", "r");
    if (!pipe) return "unknown";
    char buf[128] = {0};
    std::string out;
    while (fgets(buf, sizeof(buf), pipe)) out += buf;
    pclose(pipe);
    while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
    return out.empty() ? "unknown" : out;
}

void RunManifest::add_input(const std::filesystem::path& path) {
    inputs.emplace_back(path.string(), file_digest(path));
}

void RunManifest::add_output(const std::filesystem::path& path) {
    outputs.push_back(path.string());
}

void RunManifest::write(const std::filesystem::path& path) const {
    json doc;
    doc["format"] = "m3s-manifest-v1";
    doc["command"] = command;
    doc["argv"] = argv;
    if (!config_hash.empty()) doc["config_hash"] = config_hash;
    doc["seed"] = seed;
    doc["git_describe"] = git_describe;
    json in = json::array();
    for (const auto& [file, digest] : inputs) {
        in.push_back({{"path", file}, {"digest", digest}});
    }
    doc["inputs"] = std::move(in);
    doc["outputs"] = outputs;
    doc["started_at"] = started_at;
    doc["finished_at"] = finished_at;

    std::ofstream out(path);
    if (!out) throw ParseError("cannot write manifest '" + path.string() + "'");
    out << doc.dump(2) << '\n';
}

}  // namespace m3s::cli
