#pragma once

#include <optional>
#include <string>
#include <vector>

namespace screening {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::optional<double> y_max;  ///< clip the y axis (steep curves)
    std::vector<PlotSeries> series;
};

/// Deterministic SVG 1.1 line plot with axes, ticks and a legend.
/// Single-point series are drawn as markers.
[[nodiscard]] std::string render_svg(const PlotSpec& spec);

}  // namespace screening
