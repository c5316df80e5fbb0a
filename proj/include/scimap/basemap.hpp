#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scimap/factor.hpp"
#include "scimap/io.hpp"
#include "scimap/layout.hpp"
#include "scimap/matrix.hpp"
#include "scimap/network.hpp"
#include "scimap/registry.hpp"
#include "scimap/text.hpp"

namespace scimap {

struct BasemapProvenance {
    double tau = 0.15;
    int factors = 18;
    DiagonalMode diagonal = DiagonalMode::Include;
    LayoutConfig layout_config;
    std::string input_hash; // "fnv1a64:<hex>" of the citation matrix content
};

// The stable global template every overlay is projected onto: thresholded
// similarity network + 2-D layout + macro-discipline partition, plus the
// provenance needed to rebuild it bit-identically.
struct Basemap {
    CategoryRegistry registry; // carries names, aliases, macro assignment, colors
    SimilarityNetwork network;
    Layout layout;
    BasemapProvenance provenance;

    std::size_t node_count() const { return registry.size(); }
};

struct BuildOptions {
    DiagonalMode diagonal = DiagonalMode::Include;
    std::vector<std::string> factor_labels; // empty -> generated labels
    std::vector<Rgb> palette;               // empty -> generated palette
};

inline Basemap build_basemap(const CitationMatrix& matrix, const CategoryRegistry& registry,
                             double tau, int factors, const LayoutConfig& config,
                             const BuildOptions& opts = {}) {
    if (static_cast<std::size_t>(matrix.size()) != registry.size())
        throw Error("matrix size " + std::to_string(matrix.size()) + " does not match registry size " +
                    std::to_string(registry.size()));

    SimilarityMatrix sim = cosine_citing(matrix, opts.diagonal);
    SimilarityNetwork net = build_network(sim, tau);
    Layout layout = kamada_kawai(net, config);
    FactorModel model = factor_analysis(sim, factors);
    FactorAssignment fa = assign_factors(model);

    std::vector<std::string> labels =
        opts.factor_labels.empty() ? default_factor_labels(factors) : opts.factor_labels;
    std::vector<Rgb> palette = opts.palette.empty() ? default_palette(factors) : opts.palette;
    if (static_cast<int>(labels.size()) != factors)
        throw Error("expected " + std::to_string(factors) + " factor labels, got " +
                    std::to_string(labels.size()));
    if (palette.size() != labels.size())
        throw Error("palette size must match label count");

    Basemap bm;
    bm.registry = apply_factor_labels(registry, fa.assignment, labels, palette);
    bm.network = std::move(net);
    bm.layout = std::move(layout);
    bm.provenance.tau = tau;
    bm.provenance.factors = factors;
    bm.provenance.diagonal = opts.diagonal;
    bm.provenance.layout_config = config;
    bm.provenance.input_hash = "fnv1a64:" + to_hex16(matrix.content_hash());
    return bm;
}

namespace detail {

inline const char* termination_name(LayoutTermination t) {
    switch (t) {
    case LayoutTermination::GradientTolerance: return "tolerance";
    case LayoutTermination::IterationCap: return "cap";
    case LayoutTermination::Stalled: return "stalled";
    }
    return "tolerance";
}

inline LayoutTermination termination_from(std::string_view s) {
    if (s == "tolerance") return LayoutTermination::GradientTolerance;
    if (s == "cap") return LayoutTermination::IterationCap;
    if (s == "stalled") return LayoutTermination::Stalled;
    throw Error("unknown termination reason '" + std::string(s) + "'");
}

} // namespace detail

// Plain-text basemap document. Sections appear in fixed order with fixed
// keys; doubles use shortest round-trip formatting, so serialize -> parse
// -> serialize is byte-identical. Grammar documented in docs/FORMATS.md.
inline std::string serialize_basemap(const Basemap& bm) {
    std::string out;
    out += "scimap-basemap 1\n";
    out += "[provenance]\n";
    out += "tau=" + format_double(bm.provenance.tau) + "\n";
    out += "factors=" + std::to_string(bm.provenance.factors) + "\n";
    out += std::string("diagonal=") +
           (bm.provenance.diagonal == DiagonalMode::Include ? "include" : "exclude-pair") + "\n";
    out += "seed=" + std::to_string(bm.provenance.layout_config.seed) + "\n";
    out += "length_scale=" + format_double(bm.provenance.layout_config.length_scale) + "\n";
    out += "spring_scale=" + format_double(bm.provenance.layout_config.spring_scale) + "\n";
    out += "gradient_tolerance=" + format_double(bm.provenance.layout_config.gradient_tolerance) + "\n";
    out += "max_node_steps=" + std::to_string(bm.provenance.layout_config.max_node_steps) + "\n";
    out += "input_hash=" + bm.provenance.input_hash + "\n";
    out += "initial_stress=" + format_double(bm.layout.initial_stress) + "\n";
    out += "final_stress=" + format_double(bm.layout.final_stress) + "\n";
    out += std::string("termination=") + detail::termination_name(bm.layout.termination) + "\n";
    out += "node_steps=" + std::to_string(bm.layout.node_steps) + "\n";

    out += "[macros]\n";
    for (const auto& mac : bm.registry.macros()) {
        out += std::to_string(mac.id);
        out += '\t';
        out += mac.label;
        out += '\t';
        out += mac.color.to_hex();
        out += '\n';
    }

    out += "[nodes]\n";
    for (const auto& cat : bm.registry.categories()) {
        const Point& pt = bm.layout.coords.at(static_cast<std::size_t>(cat.id));
        out += std::to_string(cat.id);
        out += '\t';
        out += cat.name;
        out += '\t';
        for (std::size_t i = 0; i < cat.aliases.size(); ++i) {
            if (i) out += ';';
            out += cat.aliases[i];
        }
        out += '\t';
        out += format_double(pt.x);
        out += '\t';
        out += format_double(pt.y);
        out += '\t';
        out += std::to_string(cat.macro_id.value_or(0));
        out += '\n';
    }

    out += "[edges]\n";
    for (const auto& e : bm.network.edges) {
        out += std::to_string(e.a);
        out += '\t';
        out += std::to_string(e.b);
        out += '\t';
        out += format_double(e.w);
        out += '\n';
    }
    return out;
}

inline Basemap parse_basemap(std::string_view text, const std::string& source = "<basemap>") {
    auto lines = split_lines(text);
    std::size_t ln = 0;
    auto fail = [&](const std::string& msg) -> Error {
        return Error(source + ":" + std::to_string(ln + 1) + ": " + msg);
    };
    auto need_line = [&]() -> std::string_view {
        if (ln >= lines.size()) throw Error(source + ": unexpected end of file");
        return lines[ln];
    };

    if (need_line() != "scimap-basemap 1") throw fail("not a scimap basemap file (bad magic line)");
    ++ln;
    if (need_line() != "[provenance]") throw fail("expected [provenance]");
    ++ln;

    auto key_value = [&](std::string_view key) -> std::string {
        std::string_view line = need_line();
        std::string prefix = std::string(key) + "=";
        if (!line.starts_with(prefix)) throw fail("expected '" + prefix + "...'");
        ++ln;
        return std::string(line.substr(prefix.size()));
    };
    auto as_double = [&](const std::string& v, std::string_view key) {
        auto d = parse_double(v);
        if (!d) throw Error(source + ": bad numeric value for " + std::string(key) + ": '" + v + "'");
        return *d;
    };

    Basemap bm;
    bm.provenance.tau = as_double(key_value("tau"), "tau");
    bm.provenance.factors = static_cast<int>(as_double(key_value("factors"), "factors"));
    std::string diag = key_value("diagonal");
    if (diag == "include") bm.provenance.diagonal = DiagonalMode::Include;
    else if (diag == "exclude-pair") bm.provenance.diagonal = DiagonalMode::ExcludePair;
    else throw Error(source + ": unknown diagonal mode '" + diag + "'");
    LayoutConfig cfg;
    auto seed = parse_uint(key_value("seed"));
    if (!seed) throw Error(source + ": bad seed");
    cfg.seed = *seed;
    cfg.length_scale = as_double(key_value("length_scale"), "length_scale");
    cfg.spring_scale = as_double(key_value("spring_scale"), "spring_scale");
    cfg.gradient_tolerance = as_double(key_value("gradient_tolerance"), "gradient_tolerance");
    auto max_steps = parse_uint(key_value("max_node_steps"));
    if (!max_steps) throw Error(source + ": bad max_node_steps");
    cfg.max_node_steps = *max_steps;
    bm.provenance.layout_config = cfg;
    bm.provenance.input_hash = key_value("input_hash");
    bm.layout.config = cfg;
    bm.layout.initial_stress = as_double(key_value("initial_stress"), "initial_stress");
    bm.layout.final_stress = as_double(key_value("final_stress"), "final_stress");
    bm.layout.termination = detail::termination_from(key_value("termination"));
    auto steps = parse_uint(key_value("node_steps"));
    if (!steps) throw Error(source + ": bad node_steps");
    bm.layout.node_steps = *steps;

    if (need_line() != "[macros]") throw fail("expected [macros]");
    ++ln;
    std::vector<MacroDiscipline> macros;
    while (ln < lines.size() && lines[ln] != "[nodes]") {
        auto fields = split(lines[ln], '\t');
        if (fields.size() != 3) throw fail("macro line needs id<TAB>label<TAB>color");
        auto id = parse_int(fields[0]);
        if (!id || *id != static_cast<long long>(macros.size())) throw fail("macro ids must be dense ascending");
        macros.push_back(MacroDiscipline{static_cast<int>(*id), std::string(fields[1]), Rgb::from_hex(fields[2])});
        ++ln;
    }
    if (macros.empty()) throw Error(source + ": no macro-disciplines");

    if (need_line() != "[nodes]") throw fail("expected [nodes]");
    ++ln;
    std::vector<SubjectCategory> cats;
    std::vector<Point> coords;
    while (ln < lines.size() && lines[ln] != "[edges]") {
        auto fields = split(lines[ln], '\t');
        if (fields.size() != 6) throw fail("node line needs id, name, aliases, x, y, factor");
        auto id = parse_int(fields[0]);
        if (!id || *id != static_cast<long long>(cats.size())) throw fail("node ids must be dense ascending");
        SubjectCategory cat;
        cat.id = static_cast<int>(*id);
        cat.name = std::string(fields[1]);
        for (auto part : split(fields[2], ';')) {
            auto a = trim(part);
            if (!a.empty()) cat.aliases.emplace_back(a);
        }
        auto x = parse_double(fields[3]);
        auto y = parse_double(fields[4]);
        auto f = parse_int(fields[5]);
        if (!x || !y || !f) throw fail("bad node coordinates or factor");
        if (*f < 0 || *f >= static_cast<long long>(macros.size())) throw fail("node factor out of range");
        cat.macro_id = static_cast<int>(*f);
        cats.push_back(std::move(cat));
        coords.push_back(Point{*x, *y});
        ++ln;
    }
    if (cats.empty()) throw Error(source + ": no nodes");

    if (need_line() != "[edges]") throw fail("expected [edges]");
    ++ln;
    std::vector<WeightedEdge> edges;
    for (; ln < lines.size(); ++ln) {
        if (lines[ln].empty() && ln + 1 == lines.size()) break;
        auto fields = split(lines[ln], '\t');
        if (fields.size() != 3) throw fail("edge line needs a<TAB>b<TAB>w");
        auto a = parse_int(fields[0]);
        auto b = parse_int(fields[1]);
        auto w = parse_double(fields[2]);
        if (!a || !b || !w) throw fail("bad edge");
        if (*a < 0 || *b <= *a || *b >= static_cast<long long>(cats.size())) throw fail("bad edge endpoints");
        edges.push_back(WeightedEdge{static_cast<int>(*a), static_cast<int>(*b), *w});
    }

    bm.registry = CategoryRegistry::from_categories(std::move(cats), std::move(macros));
    bm.network.node_count = static_cast<int>(bm.registry.size());
    bm.network.threshold = bm.provenance.tau;
    bm.network.edges = std::move(edges);
    bm.layout.coords = std::move(coords);
    return bm;
}

inline Basemap load_basemap(const std::string& path) {
    return parse_basemap(read_text_file(path), path);
}

/// Content hash of the serialized document; overlays reference basemaps by it.
inline std::uint64_t basemap_content_hash(const Basemap& bm) {
    return fnv1a64(serialize_basemap(bm));
}

inline std::string basemap_hash_string(const Basemap& bm) {
    return "fnv1a64:" + to_hex16(basemap_content_hash(bm));
}

} // namespace scimap
