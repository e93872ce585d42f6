#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace impsum {

/// Row-major f32 tensor with a JSON metadata header. On disk: magic
/// "TNSR0001", u32-LE header length, the UTF-8 JSON header, a newline, then
/// the little-endian IEEE-754 payload.
struct TensorDump {
    std::vector<std::size_t> shape;
    std::vector<float> payload; // row-major
    std::map<std::string, std::string> meta;

    std::size_t element_count() const;
    float at2(std::size_t i, std::size_t j) const { return payload[i * shape[1] + j]; }
};

TensorDump read_tensor(const std::filesystem::path& path);
void write_tensor(const std::filesystem::path& path, const TensorDump& dump);

} // namespace impsum
