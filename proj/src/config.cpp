#include "impsum/config.hpp"

#include "impsum/util.hpp"

#include <cctype>

namespace impsum::config {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace

Table Table::parse(const std::string& content) {
    Table table;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        const std::size_t eol = content.find('\n', pos);
        std::string line = content.substr(pos, eol == std::string::npos ? eol : eol - pos);
        pos = eol == std::string::npos ? content.size() + 1 : eol + 1;
        ++line_no;

        const std::size_t hash = line.find('#');
        if (hash != std::string::npos && line.find('"') == std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw DataError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw DataError("config line " + std::to_string(line_no) + ": empty key or value");
        }
        if (value.front() == '[') {
            if (value.back() != ']') {
                throw DataError("config line " + std::to_string(line_no) + ": unterminated array");
            }
            std::vector<int> list;
            std::string body = value.substr(1, value.size() - 2);
            std::size_t start = 0;
            while (start <= body.size()) {
                std::size_t comma = body.find(',', start);
                const std::string item =
                    trim(body.substr(start, comma == std::string::npos ? comma : comma - start));
                if (!item.empty()) {
                    try {
                        list.push_back(std::stoi(item));
                    } catch (const std::exception&) {
                        throw DataError("config line " + std::to_string(line_no) +
                                        ": bad array entry '" + item + "'");
                    }
                }
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
            table.lists_[key] = list;
            table.values_[key] = value;
        } else if (value.front() == '"') {
            if (value.size() < 2 || value.back() != '"') {
                throw DataError("config line " + std::to_string(line_no) +
                                ": unterminated string");
            }
            table.values_[key] = value.substr(1, value.size() - 2);
        } else {
            table.values_[key] = value;
        }
    }
    return table;
}

Table Table::parse_file(const std::filesystem::path& path) {
    return parse(slurp_file(path));
}

std::string Table::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

long long Table::get_int(const std::string& key, long long fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stoll(it->second);
    } catch (const std::exception&) {
        throw DataError("config key '" + key + "' is not an integer: " + it->second);
    }
}

double Table::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw DataError("config key '" + key + "' is not a number: " + it->second);
    }
}

std::vector<int> Table::get_int_list(const std::string& key, std::vector<int> fallback) const {
    const auto it = lists_.find(key);
    return it == lists_.end() ? fallback : it->second;
}

} // namespace impsum::config
