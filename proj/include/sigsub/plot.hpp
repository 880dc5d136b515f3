#pragma once

#include <string>
#include <vector>

namespace sigsub {

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};

struct PlotOptions {
    std::string title;
    bool log_x = false;
    bool log_y = false;
    int width = 760;
    int height = 480;
};

// Minimal static SVG line plot (enough for rate curves and error profiles).
void write_svg_plot(const std::string& path, const std::vector<PlotSeries>& series,
                    const PlotOptions& opts = {});

}  // namespace sigsub
