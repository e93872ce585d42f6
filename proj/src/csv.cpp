#include "impsum/csv.hpp"

#include "impsum/util.hpp"

namespace impsum::csv {

Writer::Writer(std::vector<std::string> header) : columns_(header.size()) {
    for (const auto& name : header) {
        if (current_ > 0) out_ += ',';
        raw(name);
        ++current_;
    }
    end_row();
}

void Writer::raw(const std::string& field) {
    const bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quotes) {
        out_ += field;
        return;
    }
    out_ += '"';
    for (const char c : field) {
        if (c == '"') out_ += '"';
        out_ += c;
    }
    out_ += '"';
}

Writer& Writer::cell(const std::string& value) {
    if (current_ > 0) out_ += ',';
    raw(value);
    ++current_;
    return *this;
}

Writer& Writer::cell(double value) { return cell(format_g9(value)); }
Writer& Writer::cell(long long value) { return cell(std::to_string(value)); }
Writer& Writer::cell(std::size_t value) { return cell(std::to_string(value)); }
Writer& Writer::cell(int value) { return cell(std::to_string(value)); }

void Writer::end_row() {
    if (current_ != columns_) {
        throw DataError("csv row has " + std::to_string(current_) + " cells, header has " +
                        std::to_string(columns_));
    }
    out_ += '\n';
    current_ = 0;
}

void Writer::save(const std::filesystem::path& path) const {
    write_file_atomic(path, out_);
}

std::vector<std::vector<std::string>> parse(const std::string& content) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < content.size(); ++i) {
        const char c = content[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                quoted = true;
                any = true;
                break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                any = true;
                break;
            case '\r':
                break;
            case '\n':
                if (any || !field.empty()) {
                    row.push_back(std::move(field));
                    field.clear();
                    rows.push_back(std::move(row));
                    row.clear();
                    any = false;
                }
                break;
            default:
                field += c;
                any = true;
                break;
        }
    }
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<std::vector<std::string>> parse_file(const std::filesystem::path& path) {
    return parse(slurp_file(path));
}

} // namespace impsum::csv
