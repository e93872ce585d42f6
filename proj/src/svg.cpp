#include "impsum/svg.hpp"

#include "impsum/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace impsum::svg {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string escape(const std::string& text) {
    std::string out;
    for (const char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c; break;
        }
    }
    return out;
}

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

} // namespace

std::string scatter(const std::vector<ScatterPoint>& points, const std::string& title) {
    const double width = 640.0, height = 480.0, margin = 60.0;
    double min_x = 0.0, max_x = 1.0, min_y = 0.0, max_y = 1.0;
    if (!points.empty()) {
        min_x = max_x = points.front().x;
        min_y = max_y = points.front().y;
        for (const auto& p : points) {
            min_x = std::min(min_x, p.x);
            max_x = std::max(max_x, p.x);
            min_y = std::min(min_y, p.y);
            max_y = std::max(max_y, p.y);
        }
    }
    const double span_x = max_x > min_x ? max_x - min_x : 1.0;
    const double span_y = max_y > min_y ? max_y - min_y : 1.0;
    auto sx = [&](double x) { return margin + (x - min_x) / span_x * (width - 2 * margin); };
    auto sy = [&](double y) { return height - margin - (y - min_y) / span_y * (height - 2 * margin); };

    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
                      "\" height=\"" + num(height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(width / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
           escape(title) + "</text>\n";
    out += "<line x1=\"" + num(margin) + "\" y1=\"" + num(height - margin) + "\" x2=\"" +
           num(width - margin) + "\" y2=\"" + num(height - margin) +
           "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
    out += "<line x1=\"" + num(margin) + "\" y1=\"" + num(margin) + "\" x2=\"" + num(margin) +
           "\" y2=\"" + num(height - margin) + "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
    for (const auto& p : points) {
        const double cx = sx(p.x), cy = sy(p.y);
        if (p.group < 0) {
            out += "<text x=\"" + num(cx) + "\" y=\"" + num(cy + 6) +
                   "\" text-anchor=\"middle\" font-size=\"20\" fill=\"#d62728\">*</text>\n";
        } else {
            const char* color = kPalette[static_cast<std::size_t>(p.group) % 10];
            out += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) +
                   "\" r=\"4\" fill=\"" + color + "\"/>\n";
        }
        if (!p.label.empty()) {
            out += "<text x=\"" + num(cx + 6) + "\" y=\"" + num(cy - 6) + "\" font-size=\"10\">" +
                   escape(p.label) + "</text>\n";
        }
    }
    out += "</svg>\n";
    return out;
}

std::string heatmap(const std::vector<std::vector<double>>& values,
                    const std::vector<std::string>& row_labels,
                    const std::vector<std::string>& col_labels, const std::string& title) {
    const std::size_t rows = values.size();
    const std::size_t cols = rows == 0 ? 0 : values.front().size();
    const double cell = 14.0, left = 110.0, top = 60.0;
    const double width = left + cell * static_cast<double>(cols) + 30.0;
    const double height = top + cell * static_cast<double>(rows) + 80.0;

    double lo = 0.0, hi = 1.0;
    bool first = true;
    for (const auto& row : values) {
        for (const double v : row) {
            if (first) {
                lo = hi = v;
                first = false;
            } else {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    const double span = hi > lo ? hi - lo : 1.0;

    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
                      "\" height=\"" + num(height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(width / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
           escape(title) + "</text>\n";
    for (std::size_t r = 0; r < rows; ++r) {
        if (r < row_labels.size()) {
            out += "<text x=\"" + num(left - 6) + "\" y=\"" +
                   num(top + cell * static_cast<double>(r) + cell - 3) +
                   "\" text-anchor=\"end\" font-size=\"10\">" + escape(row_labels[r]) +
                   "</text>\n";
        }
        for (std::size_t c = 0; c < values[r].size(); ++c) {
            const double t = (values[r][c] - lo) / span;
            const int red = static_cast<int>(std::lround(255.0 - 224.0 * t));
            const int green = static_cast<int>(std::lround(255.0 - 180.0 * t));
            const int blue = 255;
            char color[8];
            std::snprintf(color, sizeof(color), "#%02x%02x%02x", red, green, blue);
            out += "<rect x=\"" + num(left + cell * static_cast<double>(c)) + "\" y=\"" +
                   num(top + cell * static_cast<double>(r)) + "\" width=\"" + num(cell) +
                   "\" height=\"" + num(cell) + "\" fill=\"" + color + "\"/>\n";
        }
    }
    for (std::size_t c = 0; c < col_labels.size() && c < cols; ++c) {
        const double x = left + cell * static_cast<double>(c) + cell / 2;
        const double y = top + cell * static_cast<double>(rows) + 10.0;
        out += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"9\" transform=\"rotate(60 " +
               num(x) + " " + num(y) + ")\">" + escape(col_labels[c]) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

void save(const std::filesystem::path& path, const std::string& markup) {
    write_file_atomic(path, markup);
}

} // namespace impsum::svg
