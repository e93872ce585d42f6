#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace impsum {

/// Error for malformed or inconsistent input data. The CLI maps this to exit
/// code 2, as opposed to usage errors (exit 1).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// 64-bit FNV-1a. Used for cache keys and run manifests; stable across
/// platforms, unlike std::hash.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string to_hex(std::uint64_t value);

/// Formats a double with 9 significant digits ("%.9g"); the convention for
/// every CSV emitted by the toolkit.
std::string format_g9(double value);

std::string slurp_file(const std::filesystem::path& path);

/// Writes via a temp file in the same directory followed by a rename, so
/// readers never observe a half-written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// fnv1a64 of a file's bytes, rendered as "fnv1a64:<hex>".
std::string file_digest(const std::filesystem::path& path);

} // namespace impsum
