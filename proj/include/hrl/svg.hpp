#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hrl/stats.hpp"

namespace hrl {

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
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

inline std::string fmt2(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", x);
    return buf;
}

}  // namespace detail

// Standalone success-rate chart: one median polyline per condition with a
// shaded quartile band, plus axes and a legend. No plotting dependencies.
inline void emit_plot(const std::vector<std::pair<std::string, CurveAggregate>>& curves,
                      const std::filesystem::path& path,
                      const std::string& title = "eval success rate") {
    if (curves.empty()) throw std::invalid_argument("emit_plot: need at least one curve");
    std::size_t n_epochs = 0;
    for (const auto& [name, agg] : curves) n_epochs = std::max(n_epochs, agg.epochs());
    if (n_epochs == 0) throw std::invalid_argument("emit_plot: empty curves");

    static const std::array<const char*, 8> palette = {
        "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
        "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

    const double width = 860, height = 520;
    const double x0 = 70, y0 = 40;
    const double plot_w = width - x0 - 230;  // legend space on the right
    const double plot_h = height - y0 - 60;

    auto map_x = [&](double epoch) {
        if (n_epochs == 1) return x0 + plot_w / 2;
        return x0 + epoch / static_cast<double>(n_epochs - 1) * plot_w;
    };
    auto map_y = [&](double rate) { return y0 + (1.0 - rate) * plot_h; };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_plot: cannot write " + path.string());

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << x0 << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
        << detail::xml_escape(title) << "</text>\n";

    // axes and gridlines
    for (int i = 0; i <= 5; ++i) {
        const double r = i / 5.0;
        const double y = map_y(r);
        out << "<line x1=\"" << x0 << "\" y1=\"" << y << "\" x2=\"" << x0 + plot_w << "\" y2=\""
            << y << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << x0 - 10 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
            << detail::fmt2(r) << "</text>\n";
    }
    const int n_x_ticks = n_epochs > 1 ? 6 : 1;
    for (int i = 0; i < n_x_ticks; ++i) {
        const double e = n_x_ticks == 1
                             ? 0.0
                             : (n_epochs - 1) * i / static_cast<double>(n_x_ticks - 1);
        const double x = map_x(e);
        out << "<text x=\"" << x << "\" y=\"" << y0 + plot_h + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
            << static_cast<int>(e + 0.5) << "</text>\n";
    }
    out << "<line x1=\"" << x0 << "\" y1=\"" << y0 + plot_h << "\" x2=\"" << x0 + plot_w
        << "\" y2=\"" << y0 + plot_h << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\""
        << y0 + plot_h << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << x0 + plot_w / 2 << "\" y=\"" << y0 + plot_h + 44
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">epoch</text>\n";

    // quartile bands first so lines draw on top
    for (std::size_t c = 0; c < curves.size(); ++c) {
        const auto& agg = curves[c].second;
        if (agg.epochs() < 2) continue;
        const char* color = palette[c % palette.size()];
        out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
        for (std::size_t e = 0; e < agg.epochs(); ++e)
            out << detail::fmt2(map_x(static_cast<double>(e))) << ","
                << detail::fmt2(map_y(agg.q75[e])) << " ";
        for (std::size_t e = agg.epochs(); e-- > 0;)
            out << detail::fmt2(map_x(static_cast<double>(e))) << ","
                << detail::fmt2(map_y(agg.q25[e])) << " ";
        out << "\"/>\n";
    }
    for (std::size_t c = 0; c < curves.size(); ++c) {
        const auto& agg = curves[c].second;
        const char* color = palette[c % palette.size()];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t e = 0; e < agg.epochs(); ++e)
            out << detail::fmt2(map_x(static_cast<double>(e))) << ","
                << detail::fmt2(map_y(agg.median[e])) << " ";
        out << "\"/>\n";
    }

    // legend
    const double lx = x0 + plot_w + 20;
    for (std::size_t c = 0; c < curves.size(); ++c) {
        const double ly = y0 + 10 + 22 * static_cast<double>(c);
        out << "<rect x=\"" << lx << "\" y=\"" << ly << "\" width=\"14\" height=\"14\" fill=\""
            << palette[c % palette.size()] << "\"/>\n";
        out << "<text x=\"" << lx + 20 << "\" y=\"" << ly + 12
            << "\" font-family=\"sans-serif\" font-size=\"13\">"
            << detail::xml_escape(curves[c].first) << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("emit_plot: write failed for " + path.string());
}

}  // namespace hrl
