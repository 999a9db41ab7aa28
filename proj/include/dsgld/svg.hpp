// svg.hpp — minimal static line-plot writer. CSV files are the real output
// contract; these plots are a convenience for eyeballing metric curves, so the
// implementation stays deliberately small: linear or log10 y-axis, shaded
// mean +/- band, fixed palette, no interactivity.
#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dsgld/errors.hpp"

namespace dsgld {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> band; // optional +/- halfwidth around y (same length)
};

namespace detail {
inline double nice_tick(double span) {
    if (!(span > 0.0)) return 1.0;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    if (r < 1.5) return mag;
    if (r < 3.5) return 2.0 * mag;
    if (r < 7.5) return 5.0 * mag;
    return 10.0 * mag;
}

inline std::string trim_number(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}
} // namespace detail

inline void write_line_plot(const std::string& path, const std::string& title,
                            const std::string& xlabel, const std::string& ylabel,
                            const std::vector<PlotSeries>& series, bool log_y = false) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};
    const double width = 720, height = 480;
    const double ml = 70, mr = 20, mt = 40, mb = 55;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    auto fold = [&](double x, double y) {
        if (!std::isfinite(x) || !std::isfinite(y)) return;
        if (log_y && !(y > 0.0)) return;
        const double yy = log_y ? std::log10(y) : y;
        if (first) {
            xmin = xmax = x;
            ymin = ymax = yy;
            first = false;
        } else {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, yy);
            ymax = std::max(ymax, yy);
        }
    };
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            fold(s.x[i], s.y[i]);
            if (s.band.size() == s.y.size()) {
                fold(s.x[i], s.y[i] + s.band[i]);
                if (!log_y || s.y[i] - s.band[i] > 0) fold(s.x[i], s.y[i] - s.band[i]);
            }
        }
    if (first) {
        xmin = ymin = 0;
        xmax = ymax = 1;
    }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto py = [&](double y) {
        const double yy = log_y ? std::log10(std::max(y, 1e-300)) : y;
        return height - mb - (yy - ymin) / (ymax - ymin) * (height - mt - mb);
    };

    std::ofstream out(path);
    if (!out) throw HarnessError("cannot open plot file " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
        << height << "' viewBox='0 0 " << width << ' ' << height << "'>\n"
        << "<rect width='100%' height='100%' fill='white'/>\n"
        << "<text x='" << width / 2 << "' y='24' text-anchor='middle' font-size='16' "
        << "font-family='sans-serif'>" << title << "</text>\n";

    // Axes and ticks.
    out << "<line x1='" << ml << "' y1='" << height - mb << "' x2='" << width - mr
        << "' y2='" << height - mb << "' stroke='black'/>\n"
        << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
        << height - mb << "' stroke='black'/>\n";
    const double xt = detail::nice_tick(xmax - xmin);
    for (double t = std::ceil(xmin / xt) * xt; t <= xmax + 1e-9 * xt; t += xt) {
        out << "<line x1='" << px(t) << "' y1='" << height - mb << "' x2='" << px(t)
            << "' y2='" << height - mb + 5 << "' stroke='black'/>\n"
            << "<text x='" << px(t) << "' y='" << height - mb + 20
            << "' text-anchor='middle' font-size='11' font-family='sans-serif'>"
            << detail::trim_number(t) << "</text>\n";
    }
    const double yt = detail::nice_tick(ymax - ymin);
    for (double t = std::ceil(ymin / yt) * yt; t <= ymax + 1e-9 * yt; t += yt) {
        const double yy = height - mb - (t - ymin) / (ymax - ymin) * (height - mt - mb);
        out << "<line x1='" << ml - 5 << "' y1='" << yy << "' x2='" << ml << "' y2='" << yy
            << "' stroke='black'/>\n"
            << "<text x='" << ml - 8 << "' y='" << yy + 4
            << "' text-anchor='end' font-size='11' font-family='sans-serif'>"
            << (log_y ? "1e" + detail::trim_number(t) : detail::trim_number(t))
            << "</text>\n";
    }
    out << "<text x='" << (ml + width - mr) / 2 << "' y='" << height - 12
        << "' text-anchor='middle' font-size='13' font-family='sans-serif'>" << xlabel
        << "</text>\n"
        << "<text x='16' y='" << (mt + height - mb) / 2
        << "' text-anchor='middle' font-size='13' font-family='sans-serif' "
        << "transform='rotate(-90 16 " << (mt + height - mb) / 2 << ")'>" << ylabel
        << "</text>\n";

    // Bands first so lines draw on top.
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        if (s.band.size() != s.y.size() || s.y.empty()) continue;
        const char* color = palette[si % 6];
        out << "<path d='M";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << px(s.x[i]) << ' ' << py(s.y[i] + s.band[i]) << (i + 1 < s.x.size() ? " L" : " ");
        for (std::size_t i = s.x.size(); i-- > 0;) {
            const double lo =
                log_y ? std::max(s.y[i] - s.band[i], std::pow(10.0, ymin)) : s.y[i] - s.band[i];
            out << "L" << px(s.x[i]) << ' ' << py(lo) << ' ';
        }
        out << "Z' fill='" << color << "' fill-opacity='0.15' stroke='none'/>\n";
    }
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        if (s.y.empty()) continue;
        const char* color = palette[si % 6];
        out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.8' points='";
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
            out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        out << "'/>\n";
        const double ly = mt + 16 + 18 * static_cast<double>(si);
        out << "<line x1='" << width - mr - 150 << "' y1='" << ly << "' x2='"
            << width - mr - 120 << "' y2='" << ly << "' stroke='" << color
            << "' stroke-width='2'/>\n"
            << "<text x='" << width - mr - 114 << "' y='" << ly + 4
            << "' font-size='12' font-family='sans-serif'>" << s.label << "</text>\n";
    }
    out << "</svg>\n";
    if (!out.good()) throw HarnessError("failed writing plot file " + path);
}

} // namespace dsgld
