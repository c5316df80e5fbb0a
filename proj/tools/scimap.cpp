// scimap: build science basemaps, project document sets onto them as
// overlays, and run reliability/growth/diversity analytics.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scimap/scimap.hpp"

namespace {

using namespace scimap;

// Flag-level problems detected after parsing; exit code 2 like CLI11's own.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

struct RenderFlags {
    double node_scale = 1.0;
    std::string size_mapping = "sqrt-area";
    std::string labels = "off";
    double label_font_size = 10.0;
    double edge_threshold = -1.0; // <0: use the basemap threshold
    int canvas = 1000;
    std::string color_by = "factor";

    void attach(CLI::App* cmd) {
        cmd->add_option("--node-scale", node_scale, "Node size scale factor")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--size-mapping", size_mapping, "Node size mapping: sqrt-area|linear")
            ->check(CLI::IsMember({"sqrt-area", "linear"}));
        cmd->add_option("--labels", labels, "Labels: on, off, or an integer k for the top k");
        cmd->add_option("--label-font-size", label_font_size, "Label font size in px")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--edge-threshold", edge_threshold,
                        "Hide edges at or below this weight (render only)");
        cmd->add_option("--canvas", canvas, "Canvas size in pixels")->check(CLI::Range(16, 100000));
        cmd->add_option("--color-by", color_by, "Node coloring: factor|uniform")
            ->check(CLI::IsMember({"factor", "uniform"}));
    }

    RenderOptions to_options() const {
        RenderOptions opts;
        opts.node_scale = node_scale;
        opts.size_mapping = size_mapping == "linear" ? SizeMapping::Linear : SizeMapping::SqrtArea;
        if (labels == "on") {
            opts.labels = LabelMode::On;
        } else if (labels == "off") {
            opts.labels = LabelMode::Off;
        } else if (auto k = parse_int(labels); k && *k >= 0) {
            opts.labels = LabelMode::TopK;
            opts.top_k = static_cast<int>(*k);
        } else {
            throw UsageError("--labels expects on, off, or a nonnegative integer");
        }
        opts.label_font_size = label_font_size;
        if (edge_threshold >= 0) opts.edge_threshold = edge_threshold;
        opts.canvas_px = canvas;
        opts.color_by = color_by == "uniform" ? ColorBy::Uniform : ColorBy::Factor;
        return opts;
    }
};

std::string detect_format(const std::string& text, const std::string& requested) {
    if (requested != "auto") return requested;
    for (auto line : split_lines(text)) {
        if (trim(line).empty() || line.starts_with("#")) continue;
        bool tagged = line.size() >= 3 && line[2] == ' ' && line[0] >= 'A' && line[0] <= 'Z' &&
                      ((line[1] >= 'A' && line[1] <= 'Z') || (line[1] >= '0' && line[1] <= '9'));
        return tagged ? "tagged" : "analyze";
    }
    throw Error("input file is empty; cannot detect its format (use --format)");
}

OverlayVector build_overlay(const std::string& path, const std::string& format,
                            CountingMode counting, const Basemap& bm, const std::string& label) {
    std::string text = read_text_file(path);
    std::string kind = detect_format(text, format);
    if (kind == "analyze") {
        auto rows = parse_analyze(text, path);
        return overlay_from_rows(rows, bm.registry, label);
    }
    auto parsed = parse_tagged(text, path);
    for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << "\n";
    auto ov = overlay_from_records(parsed.records, bm.registry, counting, label);
    if (!parsed.records.empty() && ov.total_documents == 0)
        throw Error(path + ": no record category matched the basemap registry");
    return ov;
}

std::string unmatched_report(const Basemap& bm, const OverlayVector& ov) {
    std::string out = "# unmatched category names\n";
    out += "# basemap " + basemap_hash_string(bm) + "\n";
    out += "# raw name<TAB>documents\n";
    for (const auto& [name, count] : ov.unmatched) out += name + "\t" + format_double(count) + "\n";
    return out;
}

void print_top_categories(const Basemap& bm, const OverlayVector& ov, std::size_t k) {
    std::vector<std::size_t> order(ov.counts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (ov.counts[a] != ov.counts[b]) return ov.counts[a] > ov.counts[b];
        return a < b;
    });
    std::cout << "top categories:\n";
    for (std::size_t i = 0; i < order.size() && i < k; ++i) {
        if (!(ov.counts[order[i]] > 0)) break;
        std::cout << "  " << bm.registry.category(static_cast<int>(order[i])).name << "\t"
                  << format_double(ov.counts[order[i]]) << "\n";
    }
}

struct FactorLabelFile {
    std::vector<std::string> labels;
    std::vector<Rgb> palette;
};

FactorLabelFile load_factor_labels(const std::string& path) {
    FactorLabelFile out;
    const std::string text = read_text_file(path);
    for (auto line : split_lines(text)) {
        if (trim(line).empty()) continue;
        auto fields = split(line, '\t');
        if (fields.size() != 2)
            throw Error(path + ": each line needs label<TAB>#RRGGBB");
        out.labels.emplace_back(trim(fields[0]));
        out.palette.push_back(Rgb::from_hex(trim(fields[1])));
    }
    if (out.labels.empty()) throw Error(path + ": no factor labels found");
    return out;
}

// Similarities recoverable from a basemap file: stored edge weights, zero
// elsewhere (sub-threshold values are not serialized), one on the diagonal.
SimilarityMatrix similarity_from_edges(const Basemap& bm) {
    SimilarityMatrix sim(static_cast<int>(bm.registry.size()), bm.provenance.diagonal);
    for (int i = 0; i < sim.size(); ++i) sim.set_symmetric(i, i, 1.0);
    for (const auto& e : bm.network.edges) sim.set_symmetric(e.a, e.b, e.w);
    return sim;
}

int run_basemap(const std::string& matrix_path, const std::string& registry_path, double tau,
                int factors, std::uint64_t seed, double length_scale, double spring_scale,
                double tolerance, std::uint64_t max_steps, bool exclude_diagonal,
                const std::string& factor_labels_path, const std::string& out_path) {
    auto registry = load_registry(registry_path);
    auto matrix = load_citation_matrix(matrix_path, registry);

    LayoutConfig cfg;
    cfg.seed = seed;
    cfg.length_scale = length_scale;
    cfg.spring_scale = spring_scale;
    cfg.gradient_tolerance = tolerance;
    cfg.max_node_steps = max_steps;

    BuildOptions opts;
    opts.diagonal = exclude_diagonal ? DiagonalMode::ExcludePair : DiagonalMode::Include;
    if (!factor_labels_path.empty()) {
        auto fl = load_factor_labels(factor_labels_path);
        opts.factor_labels = std::move(fl.labels);
        opts.palette = std::move(fl.palette);
    }

    auto bm = build_basemap(matrix, registry, tau, factors, cfg, opts);
    write_file_atomic(out_path, serialize_basemap(bm));

    std::cout << "basemap: " << bm.node_count() << " nodes, " << bm.network.edges.size()
              << " edges, " << bm.registry.macros().size() << " factors\n";
    std::cout << "total citation instances: " << matrix.total() << "\n";
    std::map<int, int> sizes;
    for (const auto& cat : bm.registry.categories()) sizes[cat.macro_id.value_or(0)]++;
    std::cout << "factor sizes:";
    for (const auto& mac : bm.registry.macros())
        std::cout << " " << mac.label << "=" << sizes[mac.id];
    std::cout << "\n";
    std::cout << "stress: " << format_double(bm.layout.final_stress) << " (initial "
              << format_double(bm.layout.initial_stress) << "), termination: "
              << detail::termination_name(bm.layout.termination) << " after "
              << bm.layout.node_steps << " node steps\n";
    if (!bm.network.has_edges())
        std::cerr << "warning: the thresholded network has no edges (tau = " << tau << ")\n";
    for (int i = 0; i < matrix.size(); ++i) {
        bool zero = true;
        for (int j = 0; j < matrix.size() && zero; ++j) zero = matrix.at(i, j) == 0;
        if (zero)
            std::cerr << "warning: category " << bm.registry.category(i).name
                      << " cites nothing; its similarities are 0\n";
    }
    std::cout << "content hash: " << basemap_hash_string(bm) << "\n";
    std::cout << "written: " << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"science overlay map toolkit"};
    app.require_subcommand(1);
    app.set_config("--config")->description("key=value config file mirroring the flags");

    std::string matrix_path, registry_path, basemap_path, input_path, out_path, world_path;
    std::string format = "auto", counting = "whole", normalize = "raw", label, factor_labels_path;
    std::string net_path, svg_path;
    double tau = 0.15, p = 0.5, m_tol = 0.4, sigma = 0.05;
    int factors = 18;
    std::uint64_t seed = 42, max_steps = 100000;
    double length_scale = 1.0, spring_scale = 1.0, tolerance = 1e-4;
    bool exclude_diagonal = false, conservative = false;
    std::optional<int> year;
    std::vector<std::string> growth_inputs;
    RenderFlags overlay_render, growth_render, export_render;

    auto tau_check = CLI::Validator(
        [](std::string& s) -> std::string {
            auto v = scimap::parse_double(s);
            if (!v || !(*v >= 0.0 && *v < 1.0)) return "threshold must satisfy 0 <= tau < 1";
            return {};
        },
        "TAU");

    auto* cmd_basemap = app.add_subcommand("basemap", "Build a basemap from a citation matrix");
    cmd_basemap->add_option("--matrix", matrix_path, "Citation matrix file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_basemap->add_option("--registry", registry_path, "Category registry file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_basemap->add_option("--tau", tau, "Similarity threshold (strict >)")->check(tau_check);
    cmd_basemap->add_option("--factors", factors, "Number of macro-disciplines")
        ->check(CLI::PositiveNumber);
    cmd_basemap->add_option("--seed", seed, "Layout RNG seed");
    cmd_basemap->add_option("--length-scale", length_scale, "Desired-length scale L")
        ->check(CLI::PositiveNumber);
    cmd_basemap->add_option("--spring-scale", spring_scale, "Spring constant scale K")
        ->check(CLI::PositiveNumber);
    cmd_basemap->add_option("--layout-tolerance", tolerance, "Gradient-norm stop tolerance")
        ->check(CLI::PositiveNumber);
    cmd_basemap->add_option("--max-steps", max_steps, "Node-step cap for the optimizer");
    cmd_basemap->add_flag("--exclude-diagonal", exclude_diagonal,
                          "Drop the two self-citation coordinates from each cosine pair");
    cmd_basemap->add_option("--factor-labels", factor_labels_path,
                            "File of macro-discipline labels: label<TAB>#RRGGBB per line")
        ->check(CLI::ExistingFile);
    cmd_basemap->add_option("--out", out_path, "Output basemap file")->required();

    auto* cmd_overlay = app.add_subcommand("overlay", "Project a document set onto a basemap");
    cmd_overlay->add_option("--basemap", basemap_path, "Basemap file")
        ->envname("SCIMAP_BASEMAP")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_overlay->add_option("--input", input_path, "Analyze or tagged-field export")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_overlay->add_option("--format", format, "Input format: auto|analyze|tagged")
        ->check(CLI::IsMember({"auto", "analyze", "tagged"}));
    cmd_overlay->add_option("--counting", counting, "Multi-category counting: whole|fractional")
        ->check(CLI::IsMember({"whole", "fractional"}));
    cmd_overlay->add_option("--normalize", normalize, "Normalization: raw|by-total|by-category")
        ->check(CLI::IsMember({"raw", "by-total", "by-category"}));
    cmd_overlay->add_option("--world", world_path, "World .vec file for by-category normalization")
        ->check(CLI::ExistingFile);
    cmd_overlay->add_option("--label", label, "Overlay label (default: input file stem)");
    cmd_overlay->add_option("--year", year, "Publication year tag");
    cmd_overlay->add_option("--out", out_path, "Output prefix (writes .vec, .svg, .unmatched.tsv)")
        ->required();
    overlay_render.attach(cmd_overlay);

    auto* cmd_reliability =
        app.add_subcommand("reliability", "Minimum sample size for reliable category attribution");
    cmd_reliability->add_option("--p", p, "Probability of correct assignment, in (0,1)")->required();
    cmd_reliability->add_option("--m", m_tol, "Lower tolerance proportion, in (0,p)")->required();
    cmd_reliability->add_option("--sigma", sigma, "One-sided significance level, in (0,0.5)")
        ->required();
    cmd_reliability->add_flag("--conservative", conservative, "Round the sample size up");

    auto* cmd_growth = app.add_subcommand("growth", "Average annual growth across yearly overlays");
    cmd_growth->add_option("--basemap", basemap_path, "Basemap file")
        ->envname("SCIMAP_BASEMAP")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_growth
        ->add_option("--input", growth_inputs, "Year-tagged input as YEAR=PATH (repeat, >= 2)")
        ->required()
        ->expected(-1);
    cmd_growth->add_option("--format", format, "Input format: auto|analyze|tagged")
        ->check(CLI::IsMember({"auto", "analyze", "tagged"}));
    cmd_growth->add_option("--counting", counting, "Multi-category counting: whole|fractional")
        ->check(CLI::IsMember({"whole", "fractional"}));
    cmd_growth->add_option("--out", out_path, "Output prefix (writes .svg and .tsv)")->required();
    growth_render.attach(cmd_growth);

    auto* cmd_diversity =
        app.add_subcommand("diversity", "Variety, balance, disparity and Rao-Stirling of a document set");
    cmd_diversity->add_option("--basemap", basemap_path, "Basemap file")
        ->envname("SCIMAP_BASEMAP")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_diversity->add_option("--input", input_path, "Analyze or tagged-field export")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_diversity->add_option("--format", format, "Input format: auto|analyze|tagged")
        ->check(CLI::IsMember({"auto", "analyze", "tagged"}));
    cmd_diversity->add_option("--counting", counting, "Multi-category counting: whole|fractional")
        ->check(CLI::IsMember({"whole", "fractional"}));
    cmd_diversity->add_option("--out", out_path, "Optional TSV export of per-category proportions");

    auto* cmd_export = app.add_subcommand("export", "Export a basemap as Pajek .net and/or SVG");
    cmd_export->add_option("--basemap", basemap_path, "Basemap file")
        ->envname("SCIMAP_BASEMAP")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_export->add_option("--net", net_path, "Write the Pajek network here");
    cmd_export->add_option("--svg", svg_path, "Write the template SVG here");
    export_render.attach(cmd_export);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
            e.get_name() == "CallForVersion")
            return code;
        return 2;
    }

    try {
        if (cmd_basemap->parsed()) {
            return run_basemap(matrix_path, registry_path, tau, factors, seed, length_scale,
                               spring_scale, tolerance, max_steps, exclude_diagonal,
                               factor_labels_path, out_path);
        }

        if (cmd_overlay->parsed()) {
            auto bm = load_basemap(basemap_path);
            if (label.empty()) label = std::filesystem::path(input_path).stem().string();
            CountingMode mode =
                counting == "fractional" ? CountingMode::Fractional : CountingMode::Whole;
            auto ov = build_overlay(input_path, format, mode, bm, label);
            ov.year = year;

            if (normalize != "raw") {
                if (normalize == "by-category") {
                    if (world_path.empty())
                        throw UsageError("--normalize by-category requires --world");
                    auto world = read_pajek_vec(read_text_file(world_path), "world", world_path);
                    if (world.counts.size() != bm.registry.size())
                        throw Error(world_path + ": world vector size does not match the basemap");
                    ov = normalize_overlay(ov, NormalizeMode::ByCategory, &world);
                } else {
                    ov = normalize_overlay(ov, NormalizeMode::ByTotal);
                }
            }

            auto opts = overlay_render.to_options();
            std::string vec = write_pajek_vec(ov);
            std::string svg = render_svg(bm, &ov, opts);
            std::string report = unmatched_report(bm, ov);
            write_file_atomic(out_path + ".vec", vec);
            write_file_atomic(out_path + ".svg", svg);
            write_file_atomic(out_path + ".unmatched.tsv", report);

            std::cout << "overlay: " << ov.label << "\n";
            std::cout << "total documents: " << ov.total_documents << "\n";
            print_top_categories(bm, ov, 5);
            double missed = 0;
            for (const auto& [n, c] : ov.unmatched) missed += c;
            std::cout << "unmatched names: " << ov.unmatched.size() << " (" << format_double(missed)
                      << " documents)\n";
            std::cout << "written: " << out_path << ".vec, " << out_path << ".svg, " << out_path
                      << ".unmatched.tsv\n";
            return 0;
        }

        if (cmd_reliability->parsed()) {
            if (!(p > 0 && p < 1)) throw UsageError("--p must be in (0,1)");
            if (!(m_tol > 0 && m_tol < p)) throw UsageError("--m must satisfy 0 < m < p");
            if (!(sigma > 0 && sigma < 0.5)) throw UsageError("--sigma must be in (0,0.5)");
            auto r = min_sample_size(p, m_tol, sigma, conservative);
            std::cout << "minimum sample size: " << r.n << "\n";
            std::cout << "unrounded: " << format_double(r.unrounded) << "\n";
            std::cout << "z quantile: " << format_double(r.z) << "\n";
            double npq = static_cast<double>(r.n) * p * (1 - p);
            std::cout << "normal approximation: " << (r.normal_approx_ok ? "valid" : "not valid")
                      << " (N " << (r.n >= 50 ? ">=" : "<") << " 50, Np(1-p) = " << format_double(npq)
                      << (npq >= 9 ? " >= 9" : " < 9") << ")\n";
            return 0;
        }

        if (cmd_growth->parsed()) {
            auto bm = load_basemap(basemap_path);
            if (growth_inputs.size() < 2) throw UsageError("growth needs at least two --input files");
            std::vector<std::pair<int, std::string>> inputs;
            for (const auto& spec : growth_inputs) {
                auto eq = spec.find('=');
                if (eq == std::string::npos)
                    throw UsageError("--input expects YEAR=PATH, got '" + spec + "'");
                auto y = parse_int(spec.substr(0, eq));
                if (!y) throw UsageError("bad year in '" + spec + "'");
                inputs.emplace_back(static_cast<int>(*y), spec.substr(eq + 1));
            }
            std::sort(inputs.begin(), inputs.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            for (std::size_t i = 1; i < inputs.size(); ++i)
                if (inputs[i].first == inputs[i - 1].first)
                    throw UsageError("duplicate year " + std::to_string(inputs[i].first));

            CountingMode mode =
                counting == "fractional" ? CountingMode::Fractional : CountingMode::Whole;
            std::vector<OverlayVector> series;
            for (const auto& [y, path] : inputs) {
                auto ov = build_overlay(path, format, mode, bm, std::to_string(y));
                ov.year = y;
                series.push_back(std::move(ov));
            }
            auto gv = growth_rates(series);

            OverlayVector magnitude;
            magnitude.counts.assign(bm.registry.size(), 0.0);
            magnitude.label = "growth";
            int defined = 0;
            for (std::size_t i = 0; i < gv.growth.size(); ++i) {
                if (gv.growth[i]) {
                    magnitude.counts[i] = std::fabs(*gv.growth[i]);
                    ++defined;
                }
            }

            std::string table = "# average annual growth " + std::to_string(gv.year_min) + "-" +
                                std::to_string(gv.year_max) + "\n";
            table += "# basemap " + basemap_hash_string(bm) + "\n";
            table += "id\tname\tgrowth\n";
            for (std::size_t i = 0; i < gv.growth.size(); ++i) {
                table += std::to_string(i) + "\t" + bm.registry.category(static_cast<int>(i)).name +
                         "\t" + (gv.growth[i] ? format_double(*gv.growth[i]) : "NA") + "\n";
            }
            std::string svg = render_svg(bm, &magnitude, growth_render.to_options());
            write_file_atomic(out_path + ".tsv", table);
            write_file_atomic(out_path + ".svg", svg);

            std::cout << "growth " << gv.year_min << "-" << gv.year_max << ": " << defined << " of "
                      << gv.growth.size() << " categories defined\n";
            print_top_categories(bm, magnitude, 5);
            std::cout << "written: " << out_path << ".svg, " << out_path << ".tsv\n";
            return 0;
        }

        if (cmd_diversity->parsed()) {
            auto bm = load_basemap(basemap_path);
            CountingMode mode =
                counting == "fractional" ? CountingMode::Fractional : CountingMode::Whole;
            auto ov = build_overlay(input_path, format, mode, bm,
                                    std::filesystem::path(input_path).stem().string());
            auto sim = similarity_from_edges(bm);
            auto rep = diversity(ov, sim);
            std::cout << "variety: " << rep.variety << "\n";
            std::cout << "balance: " << format_double(rep.balance) << "\n";
            std::cout << "disparity: " << format_double(rep.disparity) << "\n";
            std::cout << "rao-stirling: " << format_double(rep.rao_stirling)
                      << " (sum over unordered pairs i<j)\n";
            std::cerr << "note: distances use basemap edges; similarities below the threshold "
                         "count as 0\n";
            if (!out_path.empty()) {
                double total = ov.sum();
                std::string table = "# diversity: variety=" + std::to_string(rep.variety) +
                                    " balance=" + format_double(rep.balance) +
                                    " disparity=" + format_double(rep.disparity) +
                                    " rao_stirling=" + format_double(rep.rao_stirling) + "\n";
                table += "id\tname\tproportion\n";
                for (std::size_t i = 0; i < ov.counts.size(); ++i)
                    table += std::to_string(i) + "\t" +
                             bm.registry.category(static_cast<int>(i)).name + "\t" +
                             format_double(ov.counts[i] / total) + "\n";
                write_file_atomic(out_path, table);
                std::cout << "written: " << out_path << "\n";
            }
            return 0;
        }

        if (cmd_export->parsed()) {
            if (net_path.empty() && svg_path.empty())
                throw UsageError("export needs --net and/or --svg");
            auto bm = load_basemap(basemap_path);
            if (!net_path.empty()) {
                write_file_atomic(net_path, write_pajek_net(bm));
                std::cout << "written: " << net_path << "\n";
            }
            if (!svg_path.empty()) {
                write_file_atomic(svg_path, render_svg(bm, nullptr, export_render.to_options()));
                std::cout << "written: " << svg_path << "\n";
            }
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
