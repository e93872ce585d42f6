#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace impsum {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// Reproducibility record written next to every run's outputs. Contains no
/// timestamps, so identical runs produce identical manifests.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> config; // resolved flag values
    std::map<std::string, std::string> inputs; // basename -> digest
    std::vector<std::string> outputs;          // basenames
    std::uint64_t seed = 0;

    void add_input(const std::filesystem::path& path);
    /// run_id = fnv1a64 over command, config, input digests and version.
    std::string run_id() const;
    std::string config_hash() const;
    void save(const std::filesystem::path& path) const;
};

} // namespace impsum
