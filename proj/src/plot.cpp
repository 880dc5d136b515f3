#include "sigsub/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace sigsub {

namespace {
const char* kColors[] = {"#c0392b", "#2980b9", "#27ae60", "#8e44ad", "#d35400", "#16a085"};
}

void write_svg_plot(const std::string& path, const std::vector<PlotSeries>& series,
                    const PlotOptions& opts) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open for writing: " + path);

    const double margin = 56.0;
    const double w = opts.width, h = opts.height;
    auto tx = [&](double v) { return opts.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return opts.log_y ? std::log10(v) : v; };

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (opts.log_x && s.x[i] <= 0) continue;
            if (opts.log_y && s.y[i] <= 0) continue;
            xmin = std::min(xmin, tx(s.x[i]));
            xmax = std::max(xmax, tx(s.x[i]));
            ymin = std::min(ymin, ty(s.y[i]));
            ymax = std::max(ymax, ty(s.y[i]));
        }
    if (!(xmin < xmax)) xmax = xmin + 1.0;
    if (!(ymin < ymax)) ymax = ymin + 1.0;

    auto px = [&](double v) { return margin + (tx(v) - xmin) / (xmax - xmin) * (w - 2 * margin); };
    auto py = [&](double v) { return h - margin - (ty(v) - ymin) / (ymax - ymin) * (h - 2 * margin); };

    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<rect x='" << margin << "' y='" << margin << "' width='" << w - 2 * margin
        << "' height='" << h - 2 * margin << "' fill='none' stroke='#444'/>\n";
    if (!opts.title.empty())
        out << "<text x='" << w / 2 << "' y='24' text-anchor='middle' font-size='15'>" << opts.title
            << "</text>\n";

    int ci = 0;
    for (const auto& s : series) {
        out << "<polyline fill='none' stroke='" << kColors[ci % 6] << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (opts.log_x && s.x[i] <= 0) continue;
            if (opts.log_y && s.y[i] <= 0) continue;
            out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        }
        out << "'/>\n";
        if (!s.label.empty())
            out << "<text x='" << w - margin - 8 << "' y='" << margin + 18 + 16 * ci
                << "' text-anchor='end' font-size='12' fill='" << kColors[ci % 6] << "'>" << s.label
                << "</text>\n";
        ++ci;
    }
    // axis extremes
    out << "<text x='" << margin << "' y='" << h - margin + 16 << "' font-size='11'>"
        << (opts.log_x ? "1e" + std::to_string(xmin) : std::to_string(xmin)) << "</text>\n";
    out << "<text x='" << w - margin << "' y='" << h - margin + 16
        << "' text-anchor='end' font-size='11'>"
        << (opts.log_x ? "1e" + std::to_string(xmax) : std::to_string(xmax)) << "</text>\n";
    out << "</svg>\n";
}

}  // namespace sigsub
