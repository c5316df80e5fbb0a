#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "scimap/basemap.hpp"
#include "scimap/ingest.hpp"
#include "scimap/text.hpp"

namespace scimap {

enum class SizeMapping { SqrtArea, Linear };
enum class LabelMode { Off, On, TopK };
enum class ColorBy { Factor, Uniform };

struct RenderOptions {
    double node_scale = 1.0;
    SizeMapping size_mapping = SizeMapping::SqrtArea;
    LabelMode labels = LabelMode::Off;
    int top_k = 0;
    double label_font_size = 10.0;
    std::optional<double> edge_threshold; // default: the basemap threshold
    int canvas_px = 1000;
    ColorBy color_by = ColorBy::Factor;

    void validate() const {
        if (!(node_scale > 0)) throw Error("node scale must be > 0");
        if (top_k < 0) throw Error("top-k must be >= 0");
        if (canvas_px < 16) throw Error("canvas size too small");
    }
};

namespace detail {

inline std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

inline std::string gray_hex(int level) {
    Rgb c{static_cast<std::uint8_t>(level), static_cast<std::uint8_t>(level),
          static_cast<std::uint8_t>(level)};
    return c.to_hex();
}

} // namespace detail

// Static SVG: edges under nodes with stroke width and darkness monotone in
// similarity, node area (or radius) proportional to overlay counts,
// zero-count nodes kept visible as hollow outlines, colors from the
// macro-discipline palette. Without an overlay all nodes get equal size.
inline std::string render_svg(const Basemap& bm, const OverlayVector* overlay,
                              const RenderOptions& opts = {}) {
    opts.validate();
    const std::size_t s = bm.registry.size();
    if (overlay && overlay->counts.size() != s)
        throw Error("overlay has " + std::to_string(overlay->counts.size()) +
                    " categories, basemap has " + std::to_string(s));

    const double canvas = static_cast<double>(opts.canvas_px);
    const double margin = canvas * 0.06;
    const double span = canvas - 2.0 * margin;
    auto px = [&](const Point& p) {
        // layout coordinates live in [-0.5, 0.5]; SVG y grows downward
        return Point{margin + (p.x + 0.5) * span, margin + (0.5 - p.y) * span};
    };

    const double base_radius = 0.025 * canvas * opts.node_scale;
    const double hollow_radius = std::max(0.003 * canvas, 1.5);
    double cmax = 0.0;
    if (overlay)
        for (double c : overlay->counts) cmax = std::max(cmax, c);

    auto radius_for = [&](std::size_t i) -> double {
        if (!overlay) return base_radius * 0.5;
        double c = overlay->counts[i];
        if (!(c > 0) || !(cmax > 0)) return 0.0;
        if (opts.size_mapping == SizeMapping::SqrtArea) return base_radius * std::sqrt(c / cmax);
        return base_radius * (c / cmax);
    };

    double thr = opts.edge_threshold.value_or(bm.network.threshold);

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<!-- scimap basemap " + basemap_hash_string(bm) + " -->\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           std::to_string(opts.canvas_px) + "\" height=\"" + std::to_string(opts.canvas_px) +
           "\" viewBox=\"0 0 " + std::to_string(opts.canvas_px) + " " + std::to_string(opts.canvas_px) +
           "\">\n";
    out += "<rect width=\"" + std::to_string(opts.canvas_px) + "\" height=\"" +
           std::to_string(opts.canvas_px) + "\" fill=\"#ffffff\"/>\n";

    out += "<g class=\"edges\">\n";
    for (const auto& e : bm.network.edges) {
        if (!(e.w > thr)) continue;
        Point a = px(bm.layout.coords[static_cast<std::size_t>(e.a)]);
        Point b = px(bm.layout.coords[static_cast<std::size_t>(e.b)]);
        double t = thr < 1.0 ? std::clamp((e.w - thr) / (1.0 - thr), 0.0, 1.0) : 1.0;
        double width = (0.4 + 2.6 * t) * canvas / 1000.0;
        int gray = static_cast<int>(std::lround(204.0 - 153.0 * t));
        out += "<line class=\"edge\" x1=\"" + format_double(a.x) + "\" y1=\"" + format_double(a.y) +
               "\" x2=\"" + format_double(b.x) + "\" y2=\"" + format_double(b.y) + "\" stroke=\"" +
               detail::gray_hex(gray) + "\" stroke-width=\"" + format_double(width) + "\"/>\n";
    }
    out += "</g>\n";

    out += "<g class=\"nodes\">\n";
    for (std::size_t i = 0; i < s; ++i) {
        const auto& cat = bm.registry.category(static_cast<int>(i));
        Point c = px(bm.layout.coords[i]);
        std::string color = "#4477aa";
        if (opts.color_by == ColorBy::Factor && cat.macro_id)
            color = bm.registry.macros().at(static_cast<std::size_t>(*cat.macro_id)).color.to_hex();
        double r = radius_for(i);
        if (r > 0) {
            out += "<circle class=\"node\" cx=\"" + format_double(c.x) + "\" cy=\"" +
                   format_double(c.y) + "\" r=\"" + format_double(r) + "\" fill=\"" + color +
                   "\" fill-opacity=\"0.85\" stroke=\"#333333\" stroke-width=\"" +
                   format_double(0.8 * canvas / 1000.0) + "\"/>\n";
        } else {
            out += "<circle class=\"node\" cx=\"" + format_double(c.x) + "\" cy=\"" +
                   format_double(c.y) + "\" r=\"" + format_double(hollow_radius) +
                   "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
                   format_double(0.8 * canvas / 1000.0) + "\"/>\n";
        }
    }
    out += "</g>\n";

    std::vector<std::size_t> labeled;
    if (opts.labels == LabelMode::On) {
        labeled.resize(s);
        std::iota(labeled.begin(), labeled.end(), std::size_t{0});
    } else if (opts.labels == LabelMode::TopK && opts.top_k > 0) {
        std::vector<std::size_t> order(s);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            double ca = overlay ? overlay->counts[a] : 0.0;
            double cb = overlay ? overlay->counts[b] : 0.0;
            if (ca != cb) return ca > cb;
            return a < b;
        });
        order.resize(std::min<std::size_t>(static_cast<std::size_t>(opts.top_k), s));
        labeled = std::move(order);
        std::sort(labeled.begin(), labeled.end());
    }
    out += "<g class=\"labels\">\n";
    for (std::size_t i : labeled) {
        const auto& cat = bm.registry.category(static_cast<int>(i));
        Point c = px(bm.layout.coords[i]);
        double lift = std::max(radius_for(i), hollow_radius) + opts.label_font_size * 0.4;
        out += "<text class=\"label\" x=\"" + format_double(c.x) + "\" y=\"" +
               format_double(c.y - lift) + "\" font-size=\"" + format_double(opts.label_font_size) +
               "\" font-family=\"sans-serif\" text-anchor=\"middle\">" +
               detail::xml_escape(cat.name) + "</text>\n";
    }
    out += "</g>\n";
    out += "</svg>\n";
    return out;
}

} // namespace scimap
