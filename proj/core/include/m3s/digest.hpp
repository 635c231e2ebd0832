#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace m3s {

/// FNV-1a 64-bit hash; used for config hashes and manifest file digests
/// (integrity bookkeeping, not cryptography).
std::uint64_t fnv1a64(std::string_view bytes);

std::string to_hex(std::uint64_t value);

/// Hex FNV-1a digest of a file's bytes. Throws ParseError if unreadable.
std::string file_digest(const std::filesystem::path& path);

}  // namespace m3s
