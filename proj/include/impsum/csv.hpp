#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace impsum::csv {

/// Minimal CSV writer: header row first, floats at 9 significant digits,
/// fields quoted when they contain a comma, quote or newline.
class Writer {
public:
    explicit Writer(std::vector<std::string> header);

    Writer& cell(const std::string& value);
    Writer& cell(double value);
    Writer& cell(long long value);
    Writer& cell(std::size_t value);
    Writer& cell(int value);
    void end_row();

    const std::string& str() const { return out_; }
    void save(const std::filesystem::path& path) const;

private:
    void raw(const std::string& field);
    std::string out_;
    std::size_t columns_ = 0;
    std::size_t current_ = 0;
};

/// Parses a CSV produced by Writer (or any simple RFC-4180 subset). Returns
/// rows including the header.
std::vector<std::vector<std::string>> parse(const std::string& content);
std::vector<std::vector<std::string>> parse_file(const std::filesystem::path& path);

} // namespace impsum::csv
