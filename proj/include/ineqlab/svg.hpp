#ifndef INEQLAB_SVG_HPP
#define INEQLAB_SVG_HPP

// Minimal self-contained SVG emission: line charts and cell heat maps.
// No external renderer, fonts, or stylesheets.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"

namespace ineqlab {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

namespace svg_detail {

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    return colors[i % 8];
}

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void take(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void pad() {
        if (!(lo <= hi)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (lo == hi) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

} // namespace svg_detail

inline void write_svg_lines(const std::string& path, const std::string& title,
                            const std::string& xlabel, const std::string& ylabel,
                            const std::vector<Series>& series) {
    const int W = 720, H = 480, ml = 80, mr = 20, mt = 48, mb = 56;
    svg_detail::Range rx, ry;
    for (const auto& s : series) {
        for (double v : s.x) rx.take(v);
        for (double v : s.y) ry.take(v);
    }
    rx.pad();
    ry.pad();
    auto px = [&](double v) { return ml + (v - rx.lo) / (rx.hi - rx.lo) * (W - ml - mr); };
    auto py = [&](double v) {
        return H - mb - (v - ry.lo) / (ry.hi - ry.lo) * (H - mt - mb);
    };

    std::ofstream out(path);
    if (!out) throw SolverError("svg: cannot open " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
        << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\""
        << "monospace\" font-size=\"16\">" << title << "</text>\n";
    // axes
    out << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
        << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << H - mb << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double fx = rx.lo + (rx.hi - rx.lo) * t / 5.0;
        const double fy = ry.lo + (ry.hi - ry.lo) * t / 5.0;
        out << "<line x1=\"" << px(fx) << "\" y1=\"" << H - mb << "\" x2=\"" << px(fx)
            << "\" y2=\"" << H - mb + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px(fx) << "\" y=\"" << H - mb + 20
            << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\">"
            << svg_detail::num(fx) << "</text>\n";
        out << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(fy) << "\" x2=\"" << ml
            << "\" y2=\"" << py(fy) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << py(fy) + 4
            << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">"
            << svg_detail::num(fy) << "</text>\n";
    }
    out << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\">"
        << xlabel << "</text>\n";
    out << "<text x=\"18\" y=\"" << (mt + H - mb) / 2
        << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\""
        << " transform=\"rotate(-90 18 " << (mt + H - mb) / 2 << ")\">" << ylabel
        << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        out << "<polyline fill=\"none\" stroke=\"" << svg_detail::palette(s)
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[s].x.size(); ++i)
            out << px(series[s].x[i]) << "," << py(series[s].y[i]) << " ";
        out << "\"/>\n";
        out << "<text x=\"" << W - mr - 8 << "\" y=\"" << mt + 16 * (s + 1)
            << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"12\" fill=\""
            << svg_detail::palette(s) << "\">" << series[s].name << "</text>\n";
    }
    out << "</svg>\n";
}

// Heat map over an nx-by-ny cell grid; values row-major with iy the slow
// index. NaN cells render gray.
inline void write_svg_heatmap(const std::string& path, const std::string& title,
                              const std::string& xlabel, const std::string& ylabel,
                              int nx, int ny, const std::vector<double>& values,
                              double x_lo, double x_hi, double y_lo, double y_hi) {
    const int W = 720, H = 560, ml = 80, mr = 90, mt = 48, mb = 56;
    svg_detail::Range rv;
    for (double v : values) rv.take(v);
    rv.pad();
    const double cw = double(W - ml - mr) / nx;
    const double ch = double(H - mt - mb) / ny;

    std::ofstream out(path);
    if (!out) throw SolverError("svg: cannot open " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
        << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\""
        << "monospace\" font-size=\"16\">" << title << "</text>\n";
    auto color = [&](double v) -> std::string {
        if (!std::isfinite(v)) return "#b0b0b0";
        const double t = (v - rv.lo) / (rv.hi - rv.lo);
        // dark blue to warm yellow
        const int r = static_cast<int>(30 + 225 * t);
        const int g = static_cast<int>(40 + 180 * t);
        const int b = static_cast<int>(120 - 80 * t + 30);
        char buf[16];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
        return buf;
    };
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const double v = values[static_cast<std::size_t>(iy) * nx + ix];
            out << "<rect x=\"" << ml + ix * cw << "\" y=\"" << H - mb - (iy + 1) * ch
                << "\" width=\"" << cw + 0.5 << "\" height=\"" << ch + 0.5 << "\" fill=\""
                << color(v) << "\"/>\n";
        }
    for (int t = 0; t <= 4; ++t) {
        const double fx = x_lo + (x_hi - x_lo) * t / 4.0;
        const double fy = y_lo + (y_hi - y_lo) * t / 4.0;
        out << "<text x=\"" << ml + (W - ml - mr) * t / 4.0 << "\" y=\"" << H - mb + 20
            << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\">"
            << svg_detail::num(fx) << "</text>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << H - mb - (H - mt - mb) * t / 4.0 + 4
            << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">"
            << svg_detail::num(fy) << "</text>\n";
    }
    out << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\">"
        << xlabel << "</text>\n";
    out << "<text x=\"18\" y=\"" << (mt + H - mb) / 2
        << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\""
        << " transform=\"rotate(-90 18 " << (mt + H - mb) / 2 << ")\">" << ylabel
        << "</text>\n";
    // color bar
    for (int t = 0; t <= 40; ++t) {
        const double v = rv.lo + (rv.hi - rv.lo) * t / 40.0;
        out << "<rect x=\"" << W - mr + 20 << "\" y=\""
            << H - mb - (H - mt - mb) * (t + 1) / 41.0 << "\" width=\"16\" height=\""
            << (H - mt - mb) / 41.0 + 0.5 << "\" fill=\"" << color(v) << "\"/>\n";
    }
    out << "<text x=\"" << W - mr + 40 << "\" y=\"" << H - mb
        << "\" font-family=\"monospace\" font-size=\"11\">" << svg_detail::num(rv.lo)
        << "</text>\n";
    out << "<text x=\"" << W - mr + 40 << "\" y=\"" << mt + 10
        << "\" font-family=\"monospace\" font-size=\"11\">" << svg_detail::num(rv.hi)
        << "</text>\n";
    out << "</svg>\n";
}

} // namespace ineqlab

#endif
