#ifndef XIM_SVG_HPP
#define XIM_SVG_HPP

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "core.hpp"

/**
 * @file svg.hpp
 *
 * @brief Standalone SVG scatter plots of 2-D embeddings. Output bytes are a
 * pure function of the input, so identical embeddings plot identically.
 */

namespace xim {

namespace internal {

inline const std::vector<std::string>& scatter_palette() {
    static const std::vector<std::string> palette = {
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
        "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return palette;
}

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

} // namespace internal

/**
 * Render a 2-D embedding as an SVG scatter: one circle per point, colors
 * keyed by label through a fixed cycled palette, a legend when labels are
 * present, and axes spanning the data bounding box plus a 5% margin.
 */
inline void write_scatter_svg(std::ostream& os, const Matrix& coords, const std::vector<int>& labels) {
    if (coords.cols() != 2) {
        throw ShapeError("scatter plots require 2-D coordinates, got d=" + std::to_string(coords.cols()));
    }
    if (!labels.empty() && labels.size() != coords.rows()) {
        throw ShapeError("label count does not match coordinate rows");
    }

    const double width = 720, height = 720;
    const double left = 64, right = 24, top = 24, bottom = 56;

    double xmin = coords(0, 0), xmax = xmin, ymin = coords(0, 1), ymax = ymin;
    for (size_t i = 1; i < coords.rows(); ++i) {
        xmin = std::min(xmin, coords(i, 0));
        xmax = std::max(xmax, coords(i, 0));
        ymin = std::min(ymin, coords(i, 1));
        ymax = std::max(ymax, coords(i, 1));
    }
    auto pad = [](double& lo, double& hi) {
        const double span = hi - lo;
        const double margin = (span > 0) ? 0.05 * span : 1.0;
        lo -= margin;
        hi += margin;
    };
    pad(xmin, xmax);
    pad(ymin, ymax);

    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * plot_w; };
    auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * plot_h; };

    std::vector<int> distinct(labels);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    const auto& palette = internal::scatter_palette();
    auto color_of = [&](int label) {
        const size_t pos = static_cast<size_t>(std::lower_bound(distinct.begin(), distinct.end(), label) - distinct.begin());
        return palette[pos % palette.size()];
    };

    using internal::svg_num;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    os << "<rect x=\"" << svg_num(left) << "\" y=\"" << svg_num(top) << "\" width=\"" << svg_num(plot_w)
       << "\" height=\"" << svg_num(plot_h) << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";

    // axis extent labels
    os << "<text x=\"" << svg_num(left) << "\" y=\"" << svg_num(height - bottom + 20)
       << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#444444\">" << format_short(xmin) << "</text>\n";
    os << "<text x=\"" << svg_num(left + plot_w) << "\" y=\"" << svg_num(height - bottom + 20)
       << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#444444\" text-anchor=\"end\">" << format_short(xmax) << "</text>\n";
    os << "<text x=\"" << svg_num(left - 6) << "\" y=\"" << svg_num(top + plot_h)
       << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#444444\" text-anchor=\"end\">" << format_short(ymin) << "</text>\n";
    os << "<text x=\"" << svg_num(left - 6) << "\" y=\"" << svg_num(top + 12)
       << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#444444\" text-anchor=\"end\">" << format_short(ymax) << "</text>\n";

    for (size_t i = 0; i < coords.rows(); ++i) {
        const std::string color = labels.empty() ? palette[0] : color_of(labels[i]);
        os << "<circle cx=\"" << svg_num(px(coords(i, 0))) << "\" cy=\"" << svg_num(py(coords(i, 1)))
           << "\" r=\"3\" fill=\"" << color << "\" fill-opacity=\"0.8\"/>\n";
    }

    // legend (swatches are rects so circles stay one-per-point)
    for (size_t e = 0; e < distinct.size(); ++e) {
        const double ly = top + 10 + 18 * static_cast<double>(e);
        os << "<rect x=\"" << svg_num(left + plot_w - 70) << "\" y=\"" << svg_num(ly) << "\" width=\"12\" height=\"12\" fill=\""
           << palette[e % palette.size()] << "\"/>\n";
        os << "<text x=\"" << svg_num(left + plot_w - 54) << "\" y=\"" << svg_num(ly + 10)
           << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#222222\">" << distinct[e] << "</text>\n";
    }
    os << "</svg>\n";
}

} // namespace xim

#endif
