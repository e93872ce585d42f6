#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace impsum::config {

/// Flat TOML-style key/value file: `key = value` lines, `#` comments, quoted
/// strings, integers, floats, booleans and integer arrays. Section headers
/// are not supported (flags override config; secrets stay in the
/// environment).
class Table {
public:
    static Table parse(const std::string& content);
    static Table parse_file(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::string get_string(const std::string& key, const std::string& fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::vector<int> get_int_list(const std::string& key, std::vector<int> fallback) const;

    const std::map<std::string, std::string>& raw() const { return values_; }

private:
    std::map<std::string, std::string> values_; // raw value text, unquoted for strings
    std::map<std::string, std::vector<int>> lists_;
};

} // namespace impsum::config
