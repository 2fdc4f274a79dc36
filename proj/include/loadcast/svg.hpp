#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "loadcast/cluster.hpp"
#include "loadcast/errors.hpp"

namespace loadcast {

// Minimal static SVG output: grouped bars for per-country scores and a
// classic dendrogram. No styling knobs; these are quick-look artifacts.

inline void write_bar_chart_svg(const std::vector<std::string>& labels,
                                const std::vector<std::pair<std::string, std::vector<double>>>& series,
                                const std::string& title, const std::string& path) {
    if (labels.empty() || series.empty()) throw ConfigError("bar chart needs labels and series");
    for (const auto& [name, vals] : series)
        if (vals.size() != labels.size()) throw ConfigError("bar chart series length mismatch");

    static const char* kColors[] = {"#4878a8", "#e49444", "#5aa469", "#d1615d", "#857aab", "#b8b0ac"};
    double vmax = 0;
    for (const auto& [name, vals] : series)
        for (double v : vals) vmax = std::max(vmax, v);
    if (vmax <= 0) vmax = 1;

    const int W = 120 + static_cast<int>(labels.size() * (series.size() * 18 + 24));
    const int H = 360;
    const int plot_h = 260, base_y = 300, left = 60;

    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    char buf[256];
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" font-family=\"sans-serif\">"
        << title << "</text>\n";
    for (int g = 0; g <= 4; ++g) {
        double v = vmax * g / 4.0;
        int y = base_y - static_cast<int>(plot_h * g / 4.0);
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"#ddd\"/>"
                      "<text x=\"%d\" y=\"%d\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">%.2f</text>\n",
                      left, y, W - 20, y, left - 6, y + 4, v);
        out << buf;
    }
    for (std::size_t li = 0; li < labels.size(); ++li) {
        int x0 = left + 10 + static_cast<int>(li * (series.size() * 18 + 24));
        for (std::size_t si = 0; si < series.size(); ++si) {
            double v = series[si].second[li];
            int h = static_cast<int>(plot_h * v / vmax);
            std::snprintf(buf, sizeof buf,
                          "<rect x=\"%d\" y=\"%d\" width=\"14\" height=\"%d\" fill=\"%s\"/>\n",
                          x0 + static_cast<int>(si * 18), base_y - h, h, kColors[si % 6]);
            out << buf;
        }
        out << "<text x=\"" << x0 + static_cast<int>(series.size() * 9) << "\" y=\"" << base_y + 16
            << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">" << labels[li]
            << "</text>\n";
    }
    for (std::size_t si = 0; si < series.size(); ++si) {
        int y = 40 + static_cast<int>(si) * 16;
        std::snprintf(buf, sizeof buf,
                      "<rect x=\"%d\" y=\"%d\" width=\"12\" height=\"12\" fill=\"%s\"/>"
                      "<text x=\"%d\" y=\"%d\" font-size=\"11\" font-family=\"sans-serif\">%s</text>\n",
                      W - 110, y, kColors[si % 6], W - 94, y + 10, series[si].first.c_str());
        out << buf;
    }
    out << "</svg>\n";
}

inline void write_dendrogram_svg(const Dendrogram& dg, const std::string& path) {
    const int n = static_cast<int>(dg.leaf_codes.size());
    if (n < 2) throw ConfigError("dendrogram needs >= 2 leaves");

    // Leaf order by recursive traversal of the merge tree.
    std::vector<std::vector<int>> children(n + dg.merges.size());
    for (std::size_t s = 0; s < dg.merges.size(); ++s)
        children[n + s] = {dg.merges[s].left, dg.merges[s].right};
    std::vector<int> order;
    std::vector<int> stack{n + static_cast<int>(dg.merges.size()) - 1};
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        if (id < n) {
            order.push_back(id);
        } else {
            stack.push_back(children[id][1]);
            stack.push_back(children[id][0]);
        }
    }

    std::vector<double> leaf_x(n);
    const int W = 80 + n * 48, H = 420;
    const double base_y = 360, top_y = 40;
    for (int i = 0; i < n; ++i) leaf_x[order[i]] = 60 + 48.0 * i + 20;

    double dmax = 0;
    for (const auto& m : dg.merges) dmax = std::max(dmax, m.distance);
    if (dmax <= 0) dmax = 1;
    auto y_of = [&](double dist) { return base_y - (base_y - top_y) * dist / dmax; };

    // Position and height of every cluster id.
    std::vector<double> cx(n + dg.merges.size()), cy(n + dg.merges.size());
    for (int i = 0; i < n; ++i) {
        cx[i] = leaf_x[i];
        cy[i] = base_y;
    }

    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    char buf[256];
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t s = 0; s < dg.merges.size(); ++s) {
        const MergeStep& m = dg.merges[s];
        double y = y_of(m.distance);
        double xl = cx[m.left], xr = cx[m.right];
        std::snprintf(buf, sizeof buf,
                      "<path d=\"M %.1f %.1f V %.1f H %.1f V %.1f\" fill=\"none\" stroke=\"#333\"/>\n",
                      xl, cy[m.left], y, xr, cy[m.right]);
        out << buf;
        cx[n + s] = (xl + xr) / 2;
        cy[n + s] = y;
    }
    for (int i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" font-size=\"12\" "
                      "font-family=\"sans-serif\">%s</text>\n",
                      leaf_x[i], base_y + 18, dg.leaf_codes[i].c_str());
        out << buf;
    }
    out << "</svg>\n";
}

}  // namespace loadcast
