#pragma once

// Minimal SVG line/scatter plots for run diagnostics.

#include <string>
#include <utility>
#include <vector>

namespace conefrac {

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
    bool line = true;
    bool markers = false;
};

struct PlotSpec {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    bool log_x = false;
    bool log_y = false;
    std::vector<PlotSeries> series;
    /// Dashed horizontal reference lines.
    std::vector<std::pair<double, std::string>> reference_y;
};

/// Renders the plot; points that are non-finite or non-positive on a log axis are dropped.
std::string render_svg(const PlotSpec& spec, int width = 640, int height = 420);

void write_svg(const std::string& path, const PlotSpec& spec);

}  // namespace conefrac
