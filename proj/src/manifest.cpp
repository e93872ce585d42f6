#include "impsum/manifest.hpp"

#include "impsum/util.hpp"

#include <nlohmann/json.hpp>

namespace impsum {

namespace {
using json = nlohmann::json;
}

void RunManifest::add_input(const std::filesystem::path& path) {
    inputs[path.filename().string()] = file_digest(path);
}

std::string RunManifest::config_hash() const {
    std::uint64_t h = fnv1a64(command);
    for (const auto& [key, value] : config) {
        h = fnv1a64(value, fnv1a64(key, h));
    }
    return to_hex(h);
}

std::string RunManifest::run_id() const {
    std::uint64_t h = fnv1a64(config_hash());
    for (const auto& [name, digest] : inputs) {
        h = fnv1a64(digest, fnv1a64(name, h));
    }
    h = fnv1a64(kToolkitVersion, h);
    h = fnv1a64(std::to_string(seed), h);
    return to_hex(h);
}

void RunManifest::save(const std::filesystem::path& path) const {
    json doc{{"run_id", run_id()},
             {"command", command},
             {"config_hash", config_hash()},
             {"config", config},
             {"inputs", inputs},
             {"outputs", outputs},
             {"seed", seed},
             {"version", kToolkitVersion}};
    write_file_atomic(path, doc.dump(2) + "\n");
}

} // namespace impsum
