#include "neglr/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include "neglr/errors.hpp"

namespace neglr {

namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
constexpr double kMargin = 56.0;

std::string fixed(double v) {
    char buf[48];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
    return {buf, res.ptr};
}

std::string escape_xml(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = INFINITY;
    double hi = -INFINITY;

    void include(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void widen() {
        if (!(lo <= hi)) {
            lo = 0.0;
            hi = 1.0;
        } else if (lo == hi) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

}  // namespace

std::string render_svg(const CsvTable& table, const PlotOptions& options) {
    if (table.header.size() < 2) throw ParseError("plot needs an x column and at least one data column");
    if (table.rows.empty()) throw ParseError("plot needs at least one data row");

    std::vector<std::vector<double>> cols;
    for (std::size_t c = 0; c < table.header.size(); ++c) cols.push_back(table.numeric_column(c));

    Range xr, yr;
    for (double v : cols[0]) xr.include(v);
    for (std::size_t c = 1; c < cols.size(); ++c)
        for (double v : cols[c]) yr.include(v);
    xr.widen();
    yr.widen();

    const double w = options.width, h = options.height;
    const double plot_w = w - 2 * kMargin, plot_h = h - 2 * kMargin;
    auto px = [&](double x) { return kMargin + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    auto py = [&](double y) { return h - kMargin - (y - yr.lo) / (yr.hi - yr.lo) * plot_h; };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           std::to_string(options.width) + "\" height=\"" + std::to_string(options.height) +
           "\" viewBox=\"0 0 " + std::to_string(options.width) + " " +
           std::to_string(options.height) + "\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + fixed(w) + "\" height=\"" + fixed(h) +
           "\" fill=\"white\"/>\n";
    svg += "<g stroke=\"black\" stroke-width=\"1\">\n";
    svg += "<line x1=\"" + fixed(kMargin) + "\" y1=\"" + fixed(h - kMargin) + "\" x2=\"" +
           fixed(w - kMargin) + "\" y2=\"" + fixed(h - kMargin) + "\"/>\n";
    svg += "<line x1=\"" + fixed(kMargin) + "\" y1=\"" + fixed(kMargin) + "\" x2=\"" + fixed(kMargin) +
           "\" y2=\"" + fixed(h - kMargin) + "\"/>\n";
    svg += "</g>\n";

    svg += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
    if (!options.title.empty())
        svg += "<text x=\"" + fixed(w / 2) + "\" y=\"" + fixed(kMargin / 2) +
               "\" text-anchor=\"middle\" font-size=\"14\">" + escape_xml(options.title) + "</text>\n";
    svg += "<text x=\"" + fixed(kMargin) + "\" y=\"" + fixed(h - kMargin + 16) + "\">" +
           escape_xml(format_double(xr.lo)) + "</text>\n";
    svg += "<text x=\"" + fixed(w - kMargin) + "\" y=\"" + fixed(h - kMargin + 16) +
           "\" text-anchor=\"end\">" + escape_xml(format_double(xr.hi)) + "</text>\n";
    svg += "<text x=\"" + fixed(kMargin - 4) + "\" y=\"" + fixed(h - kMargin) +
           "\" text-anchor=\"end\">" + escape_xml(format_double(yr.lo)) + "</text>\n";
    svg += "<text x=\"" + fixed(kMargin - 4) + "\" y=\"" + fixed(kMargin + 4) +
           "\" text-anchor=\"end\">" + escape_xml(format_double(yr.hi)) + "</text>\n";
    svg += "<text x=\"" + fixed(w / 2) + "\" y=\"" + fixed(h - 12) + "\" text-anchor=\"middle\">" +
           escape_xml(table.header[0]) + "</text>\n";
    svg += "</g>\n";

    for (std::size_t c = 1; c < cols.size(); ++c) {
        const char* color = kPalette[(c - 1) % kPalette.size()];
        std::string d;
        bool pen_down = false;
        for (std::size_t r = 0; r < cols[c].size(); ++r) {
            const double x = cols[0][r], y = cols[c][r];
            if (!std::isfinite(x) || !std::isfinite(y)) {
                pen_down = false;
                continue;
            }
            d += pen_down ? " L" : (d.empty() ? "M" : " M");
            d += fixed(px(x)) + " " + fixed(py(y));
            pen_down = true;
        }
        svg += "<path id=\"series-" + std::to_string(c) + "\" fill=\"none\" stroke=\"" + color +
               "\" stroke-width=\"1.5\" d=\"" + d + "\"><title>" + escape_xml(table.header[c]) +
               "</title></path>\n";
        const double ly = kMargin + 14.0 * static_cast<double>(c - 1);
        svg += "<text x=\"" + fixed(w - kMargin + 4) + "\" y=\"" + fixed(ly) +
               "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"" + color + "\">" +
               escape_xml(table.header[c]) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace neglr
