#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace impsum::svg {

struct ScatterPoint {
    double x = 0.0;
    double y = 0.0;
    std::string label;
    /// Group index drives the fill color (0-based); -1 renders the highlight
    /// star used for reference points.
    int group = 0;
};

/// Labelled 2-D scatter plot with axes autoscaled to the data.
std::string scatter(const std::vector<ScatterPoint>& points, const std::string& title);

/// Row-major heatmap, white-to-blue ramp over the observed value range.
std::string heatmap(const std::vector<std::vector<double>>& values,
                    const std::vector<std::string>& row_labels,
                    const std::vector<std::string>& col_labels, const std::string& title);

void save(const std::filesystem::path& path, const std::string& markup);

} // namespace impsum::svg
