#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace m3s::cli {

/// Reproducibility sidecar written next to every command's outputs: what ran,
/// with which seed and config, over which input bytes, producing which files.
struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    std::string config_hash;  // empty when the command has no config
    std::uint64_t seed = 0;
    std::string git_describe;
    std::vector<std::pair<std::string, std::string>> inputs;  // path, digest
    std::vector<std::string> outputs;
    std::string started_at;
    std::string finished_at;

    void add_input(const std::filesystem::path& path);
    void add_output(const std::filesystem::path& path);
    void write(const std::filesystem::path& path) const;
};

std::string utc_timestamp();
std::string git_describe_string();

}  // namespace m3s::cli
