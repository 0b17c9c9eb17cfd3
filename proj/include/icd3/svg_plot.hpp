#pragma once

// Minimal static SVG line/bar charts for rendering sweep and trace tables.
// Output contains no timestamps, so identical inputs give identical bytes.

#include <string>
#include <vector>

#include "icd3/io.hpp"

namespace icd3 {

struct PlotSeries {
    std::string name;
    std::vector<double> y;
};

struct PlotData {
    std::string title;
    std::string x_label;
    std::vector<double> x;
    std::vector<PlotSeries> series;
};

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline const char* series_color(std::size_t i) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
    return palette[i % 6];
}

}  // namespace detail

inline std::string render_svg(const PlotData& data, bool bars = false) {
    const int width = 640, height = 420;
    const double ml = 60, mr = 20, mt = 40, mb = 50;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (!data.x.empty()) {
        xmin = *std::min_element(data.x.begin(), data.x.end());
        xmax = *std::max_element(data.x.begin(), data.x.end());
    }
    bool have_y = false;
    for (const PlotSeries& s : data.series)
        for (double v : s.y) {
            if (!have_y) { ymin = ymax = v; have_y = true; }
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    ymin = std::min(ymin, 0.0);
    const double ypad = 0.05 * (ymax - ymin);
    ymax += ypad;

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
                      "\" height=\"" + std::to_string(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + detail::svg_num(width / 2.0) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\" "
           "font-family=\"sans-serif\">" + data.title + "</text>\n";

    // axes and ticks
    svg += "<line x1=\"" + detail::svg_num(ml) + "\" y1=\"" + detail::svg_num(mt + ph) + "\" x2=\"" +
           detail::svg_num(ml + pw) + "\" y2=\"" + detail::svg_num(mt + ph) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + detail::svg_num(ml) + "\" y1=\"" + detail::svg_num(mt) + "\" x2=\"" +
           detail::svg_num(ml) + "\" y2=\"" + detail::svg_num(mt + ph) + "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double yv = ymin + (ymax - ymin) * t / 5.0;
        svg += "<line x1=\"" + detail::svg_num(ml - 4) + "\" y1=\"" + detail::svg_num(py(yv)) + "\" x2=\"" +
               detail::svg_num(ml) + "\" y2=\"" + detail::svg_num(py(yv)) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + detail::svg_num(ml - 8) + "\" y=\"" + detail::svg_num(py(yv) + 4) +
               "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" + detail::svg_num(yv) +
               "</text>\n";
        const double xv = xmin + (xmax - xmin) * t / 5.0;
        svg += "<text x=\"" + detail::svg_num(px(xv)) + "\" y=\"" + detail::svg_num(mt + ph + 18) +
               "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" + detail::svg_num(xv) +
               "</text>\n";
    }
    svg += "<text x=\"" + detail::svg_num(ml + pw / 2) + "\" y=\"" + detail::svg_num(height - 12.0) +
           "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">" + data.x_label +
           "</text>\n";

    for (std::size_t s = 0; s < data.series.size(); ++s) {
        const PlotSeries& series = data.series[s];
        const char* color = detail::series_color(s);
        if (bars) {
            const double bw = pw / std::max<std::size_t>(data.x.size(), 1) /
                              std::max<std::size_t>(data.series.size(), 1) * 0.8;
            for (std::size_t i = 0; i < series.y.size() && i < data.x.size(); ++i) {
                const double x0 = px(data.x[i]) + (static_cast<double>(s) - data.series.size() / 2.0) * bw;
                svg += "<rect x=\"" + detail::svg_num(x0) + "\" y=\"" + detail::svg_num(py(series.y[i])) +
                       "\" width=\"" + detail::svg_num(bw) + "\" height=\"" +
                       detail::svg_num(py(0.0) - py(series.y[i])) + "\" fill=\"" + color + "\"/>\n";
            }
        } else {
            std::string points;
            for (std::size_t i = 0; i < series.y.size() && i < data.x.size(); ++i)
                points += detail::svg_num(px(data.x[i])) + "," + detail::svg_num(py(series.y[i])) + " ";
            svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"" +
                   points + "\"/>\n";
        }
        svg += "<text x=\"" + detail::svg_num(ml + pw - 6) + "\" y=\"" +
               detail::svg_num(mt + 16.0 * (s + 1)) + "\" text-anchor=\"end\" font-size=\"12\" "
               "font-family=\"sans-serif\" fill=\"" + detail::series_color(s) + "\">" + series.name +
               "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

// Builds plot data from a CSV table: one x column, the rest as series.
inline PlotData plot_from_table(const RawTable& table, const std::string& x_col,
                                const std::vector<std::string>& y_cols, const std::string& title) {
    const int xi = table.column_index(x_col);
    if (xi < 0) throw DataError("plot: no column named '" + x_col + "'");
    PlotData data;
    data.title = title;
    data.x_label = x_col;
    for (const auto& row : table.rows) data.x.push_back(parse_double(row[xi]));
    for (const std::string& name : y_cols) {
        const int yi = table.column_index(name);
        if (yi < 0) throw DataError("plot: no column named '" + name + "'");
        PlotSeries s;
        s.name = name;
        for (const auto& row : table.rows) s.y.push_back(parse_double(row[yi]));
        data.series.push_back(std::move(s));
    }
    return data;
}

}  // namespace icd3
