#pragma once

#include <algorithm>
#include <string>
#include <string_view>

#include "scimap/basemap.hpp"
#include "scimap/ingest.hpp"
#include "scimap/text.hpp"

namespace scimap {

// Pajek vector: "*Vertices S" then one value per line in registry order.
// Values use shortest round-trip decimals, so write -> read is exact.
inline std::string write_pajek_vec(const OverlayVector& vec) {
    std::string out = "*Vertices " + std::to_string(vec.counts.size()) + "\n";
    for (double c : vec.counts) {
        out += format_double(c);
        out += '\n';
    }
    return out;
}

inline OverlayVector read_pajek_vec(std::string_view text, std::string label = "",
                                    const std::string& source = "<vec>") {
    auto lines = split_lines(text);
    OverlayVector ov;
    ov.label = std::move(label);
    std::size_t declared = 0;
    bool have_header = false;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        std::string_view line = trim(lines[ln]);
        if (line.empty() || line.starts_with("%")) continue;
        if (!have_header) {
            auto sp = line.find(' ');
            std::string head = normalize_category_name(line.substr(0, sp));
            if (head != "*vertices" || sp == std::string_view::npos)
                throw Error(source + ":" + std::to_string(ln + 1) + ": expected '*Vertices N'");
            auto n = parse_int(line.substr(sp + 1));
            if (!n || *n < 0)
                throw Error(source + ":" + std::to_string(ln + 1) + ": bad vertex count");
            declared = static_cast<std::size_t>(*n);
            have_header = true;
            continue;
        }
        auto v = parse_double(line);
        if (!v)
            throw Error(source + ":" + std::to_string(ln + 1) + ": non-numeric value '" +
                        std::string(line) + "'");
        ov.counts.push_back(*v);
    }
    if (!have_header) throw Error(source + ": missing '*Vertices' header");
    if (ov.counts.size() != declared)
        throw Error(source + ": header declares " + std::to_string(declared) + " vertices but " +
                    std::to_string(ov.counts.size()) + " values follow");
    return ov;
}

// Pajek network subset: quoted labels, coordinates shifted into [0,1],
// 1-based edge endpoints with weights. Deterministic ordering throughout.
inline std::string write_pajek_net(const Basemap& bm) {
    std::string out = "*Vertices " + std::to_string(bm.registry.size()) + "\n";
    for (const auto& cat : bm.registry.categories()) {
        const Point& p = bm.layout.coords.at(static_cast<std::size_t>(cat.id));
        double x = std::clamp(p.x + 0.5, 0.0, 1.0);
        double y = std::clamp(p.y + 0.5, 0.0, 1.0);
        out += std::to_string(cat.id + 1);
        out += " \"";
        out += cat.name;
        out += "\" ";
        out += format_double(x);
        out += ' ';
        out += format_double(y);
        out += '\n';
    }
    out += "*Edges\n";
    for (const auto& e : bm.network.edges) {
        out += std::to_string(e.a + 1);
        out += ' ';
        out += std::to_string(e.b + 1);
        out += ' ';
        out += format_double(e.w);
        out += '\n';
    }
    return out;
}

} // namespace scimap
