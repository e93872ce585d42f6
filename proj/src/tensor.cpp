#include "impsum/tensor.hpp"

#include "impsum/util.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace impsum {

namespace {

using json = nlohmann::json;

constexpr char kMagic[8] = {'T', 'N', 'S', 'R', '0', '0', '0', '1'};

static_assert(std::endian::native == std::endian::little,
              "tensor io assumes a little-endian host");

} // namespace

std::size_t TensorDump::element_count() const {
    std::size_t n = 1;
    for (const std::size_t dim : shape) {
        n *= dim;
    }
    return shape.empty() ? 0 : n;
}

TensorDump read_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open tensor file: " + path.string());
    }
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
        throw DataError(path.string() + ": bad magic, not a TNSR0001 file");
    }
    std::uint32_t header_len = 0;
    if (!in.read(reinterpret_cast<char*>(&header_len), 4)) {
        throw DataError(path.string() + ": truncated header length");
    }
    std::string header_bytes(header_len, '\0');
    if (!in.read(header_bytes.data(), header_len)) {
        throw DataError(path.string() + ": truncated header");
    }
    char newline = 0;
    if (!in.read(&newline, 1) || newline != '\n') {
        throw DataError(path.string() + ": missing newline after header");
    }
    json header;
    try {
        header = json::parse(header_bytes);
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": malformed header (" + e.what() + ")");
    }
    if (header.value("dtype", "") != "f32") {
        throw DataError(path.string() + ": unsupported dtype '" + header.value("dtype", "") + "'");
    }
    if (header.value("order", "") != "row-major") {
        throw DataError(path.string() + ": unsupported order '" + header.value("order", "") + "'");
    }
    TensorDump dump;
    for (const auto& dim : header.at("shape")) {
        const auto v = dim.get<long long>();
        if (v < 1) {
            throw DataError(path.string() + ": non-positive shape entry");
        }
        dump.shape.push_back(static_cast<std::size_t>(v));
    }
    if (header.contains("meta")) {
        for (const auto& [key, value] : header.at("meta").items()) {
            dump.meta[key] = value.is_string() ? value.get<std::string>() : value.dump();
        }
    }
    const std::size_t count = dump.element_count();
    dump.payload.resize(count);
    if (!in.read(reinterpret_cast<char*>(dump.payload.data()),
                 static_cast<std::streamsize>(count * sizeof(float)))) {
        throw DataError(path.string() + ": payload shorter than shape requires");
    }
    char extra = 0;
    if (in.read(&extra, 1)) {
        throw DataError(path.string() + ": payload longer than shape requires");
    }
    for (const float x : dump.payload) {
        if (!std::isfinite(x)) {
            throw DataError(path.string() + ": non-finite payload value");
        }
    }
    return dump;
}

void write_tensor(const std::filesystem::path& path, const TensorDump& dump) {
    if (dump.payload.size() != dump.element_count()) {
        throw DataError("tensor payload size does not match shape");
    }
    for (const float x : dump.payload) {
        if (!std::isfinite(x)) {
            throw DataError("tensor payload has a non-finite value");
        }
    }
    json header{{"dtype", "f32"}, {"order", "row-major"}, {"shape", dump.shape}};
    json meta = json::object();
    for (const auto& [key, value] : dump.meta) {
        meta[key] = value;
    }
    header["meta"] = meta;
    const std::string header_bytes = header.dump();

    std::string out;
    out.reserve(13 + header_bytes.size() + dump.payload.size() * sizeof(float));
    out.append(kMagic, 8);
    const std::uint32_t header_len = static_cast<std::uint32_t>(header_bytes.size());
    out.append(reinterpret_cast<const char*>(&header_len), 4);
    out += header_bytes;
    out += '\n';
    out.append(reinterpret_cast<const char*>(dump.payload.data()),
               dump.payload.size() * sizeof(float));
    write_file_atomic(path, out);
}

} // namespace impsum
