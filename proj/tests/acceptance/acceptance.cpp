// Acceptance suite: runs each release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit code is the failure count.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "scimap/scimap.hpp"

#include "../helpers.hpp"

using namespace scimap;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "PASS" : "FAIL") << "  " << name;
    if (!ok && !detail.empty()) std::cout << "  [" << detail << "]";
    std::cout << "\n";
    if (!ok) ++failures;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// ---- criterion 1: published sample-size table -------------------------------

void table_reproduction() {
    auto t0 = std::chrono::steady_clock::now();
    struct Row {
        double p, m, sigma;
        long long expect;
    };
    const Row rows[] = {
        {0.5, 0.4, 0.10, 41}, {0.5, 0.4, 0.05, 68}, {0.5, 0.4, 0.01, 135},
        {0.6, 0.5, 0.05, 65}, {0.4, 0.3, 0.05, 65},
    };
    bool ok = true;
    std::string detail;
    for (const auto& row : rows) {
        auto r = min_sample_size(row.p, row.m, row.sigma);
        if (r.n != row.expect) {
            ok = false;
            detail += "got " + std::to_string(r.n) + " want " + std::to_string(row.expect) + "; ";
        }
    }
    double elapsed = ms_since(t0);
    if (elapsed >= 1000.0) {
        ok = false;
        detail += "took " + std::to_string(elapsed) + " ms";
    }
    report("sample-size table exact (41/68/135/65/65) under 1 s", ok, detail);
}

// ---- criterion 2: cosine vs brute-force oracle ------------------------------

void cosine_oracle_equivalence() {
    testutil::Rng rng(101);
    bool ok = true;
    std::string detail;
    for (int trial = 0; trial < 200 && ok; ++trial) {
        int s = rng.uniform_int(1, 12);
        auto m = testutil::random_citation_matrix(rng, s);
        auto sim = cosine_citing(m);
        for (int i = 0; i < s && ok; ++i) {
            for (int j = 0; j < s && ok; ++j) {
                double expect = testutil::cosine_oracle(m, i, j, DiagonalMode::Include);
                if (std::fabs(sim.at(i, j) - expect) >= 1e-12) {
                    ok = false;
                    detail = "trial " + std::to_string(trial) + " mismatch at (" +
                             std::to_string(i) + "," + std::to_string(j) + ")";
                }
                if (sim.at(i, j) != sim.at(j, i) || sim.at(i, j) < 0.0 || sim.at(i, j) > 1.0) {
                    ok = false;
                    detail = "symmetry/bounds violated";
                }
            }
        }
    }
    report("cosine equals brute-force oracle on 200 random matrices (<1e-12)", ok, detail);
}

// ---- criterion 3: layout stress and gradient --------------------------------

void layout_correctness() {
    testutil::Rng rng(103);
    LayoutConfig cfg;
    bool grad_ok = true, mono_ok = true;
    std::string detail;
    const double h = 1e-6;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 6;
        SquareMatrix d(n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                double v = rng.uniform(0.1, 2.0);
                d.at(i, j) = v;
                d.at(j, i) = v;
            }
        std::vector<Point> p(n);
        for (auto& q : p) q = Point{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};

        auto grad = stress_gradient(p, cfg, d);
        for (int m = 0; m < n; ++m) {
            for (int axis = 0; axis < 2; ++axis) {
                auto plus = p, minus = p;
                (axis == 0 ? plus[static_cast<std::size_t>(m)].x : plus[static_cast<std::size_t>(m)].y) += h;
                (axis == 0 ? minus[static_cast<std::size_t>(m)].x : minus[static_cast<std::size_t>(m)].y) -= h;
                double fd = (layout_stress(plus, cfg, d) - layout_stress(minus, cfg, d)) / (2 * h);
                double an = axis == 0 ? grad[static_cast<std::size_t>(m)].x : grad[static_cast<std::size_t>(m)].y;
                if (std::fabs(an - fd) / std::max(std::fabs(fd), 1.0) >= 1e-4) {
                    grad_ok = false;
                    detail = "gradient mismatch trial " + std::to_string(trial);
                }
            }
        }

        auto layout = kamada_kawai_distances(d, cfg);
        if (!(layout.final_stress <= layout.initial_stress)) {
            mono_ok = false;
            detail = "final stress above initial, trial " + std::to_string(trial);
        }
    }
    report("analytic stress gradient matches finite differences (rel < 1e-4, 50 instances)",
           grad_ok, detail);

    SimilarityNetwork tri;
    tri.node_count = 3;
    tri.threshold = 0.15;
    tri.edges = {WeightedEdge{0, 1, 0.5}, WeightedEdge{0, 2, 0.5}, WeightedEdge{1, 2, 0.5}};
    auto layout = kamada_kawai(tri, cfg);
    report("equilateral 3-node instance reaches stress < 1e-6",
           layout.final_stress < 1e-6,
           "stress = " + format_double(layout.final_stress));
    report("final stress <= initial stress on every instance", mono_ok, detail);
}

// ---- criterion 4: factor recovery on noisy blocks ---------------------------

void factor_recovery() {
    testutil::Rng rng(107);
    int exact = 0;
    const int trials = 100;
    for (int trial = 0; trial < trials; ++trial) {
        int k = rng.uniform_int(2, 5);
        int s = rng.uniform_int(k * 3, 40);
        std::vector<int> truth(static_cast<std::size_t>(s));
        for (int i = 0; i < s; ++i)
            truth[static_cast<std::size_t>(i)] = i < 2 * k ? i / 2 : rng.uniform_int(0, k - 1);

        SimilarityMatrix sim(s, DiagonalMode::Include);
        for (int i = 0; i < s; ++i) {
            for (int j = i; j < s; ++j) {
                double v;
                if (i == j) v = 1.0;
                else if (truth[static_cast<std::size_t>(i)] == truth[static_cast<std::size_t>(j)])
                    v = 0.9 + rng.uniform(-0.05, 0.05);
                else
                    v = rng.uniform(0.0, 0.05);
                sim.set_symmetric(i, j, v);
            }
        }
        auto fa = assign_factors(factor_analysis(sim, k));
        if (testutil::adjusted_rand_index(fa.assignment, truth) >= 1.0 - 1e-12) ++exact;
    }
    report("factor recovery ARI = 1 in >= 95% of 100 noisy block trials (" +
               std::to_string(exact) + "/100)",
           exact >= 95);
}

// ---- criterion 5: threshold semantics ---------------------------------------

void threshold_semantics() {
    SimilarityMatrix sim(2, DiagonalMode::Include);
    sim.set_symmetric(0, 0, 1.0);
    sim.set_symmetric(1, 1, 1.0);
    sim.set_symmetric(0, 1, 0.15);
    bool strict = build_network(sim, 0.15).edges.empty();
    report("similarity exactly 0.15 produces no edge at tau = 0.15", strict);

    testutil::Rng rng(109);
    auto m = testutil::random_citation_matrix(rng, 15);
    auto sim2 = cosine_citing(m);
    bool monotone = true;
    std::size_t prev = SIZE_MAX;
    for (double tau = 0.0; tau <= 0.95; tau += 0.01) {
        std::size_t count = build_network(sim2, tau).edges.size();
        if (count > prev) monotone = false;
        prev = count;
    }
    report("edge count is monotone non-increasing over a tau sweep", monotone);
}

// ---- criterion 6: ingest conservation ---------------------------------------

void ingest_conservation() {
    const std::string data = SCIMAP_TEST_DATA_DIR;
    auto reg = load_registry(data + "/registry_golden.tsv");

    bool rows_ok = true;
    std::string detail;
    for (const char* file : {"analyze_golden1.txt", "analyze_golden2.txt",
                             "analyze_golden3_latin1.txt"}) {
        auto rows = parse_analyze(read_text_file(data + "/" + file), file);
        long long parsed = 0;
        for (const auto& r : rows) parsed += r.count;
        auto ov = overlay_from_rows(rows, reg, file);
        double unmatched = 0;
        for (const auto& [n, c] : ov.unmatched) unmatched += c;
        if (ov.sum() + unmatched != static_cast<double>(parsed)) {
            rows_ok = false;
            detail += std::string(file) + " off; ";
        }
    }
    report("golden Analyze files: matched + unmatched = parsed total, exactly", rows_ok, detail);

    bool frac_ok = true;
    detail.clear();
    for (const char* file : {"tagged_golden1.txt", "tagged_golden3.txt"}) {
        auto parsed = parse_tagged(read_text_file(data + "/" + file), file);
        auto ov = overlay_from_records(parsed.records, reg, CountingMode::Fractional, file);
        if (ov.sum() != static_cast<double>(ov.total_documents)) {
            frac_ok = false;
            detail += std::string(file) + ": sum " + format_double(ov.sum()) + " vs " +
                      std::to_string(ov.total_documents) + "; ";
        }
    }
    report("golden tagged files: fractional counting sums to matched-record count, exactly",
           frac_ok, detail);
}

// ---- criterion 7: growth definitions ----------------------------------------

void growth_rates_criterion() {
    auto overlay_of = [](std::vector<double> counts, int year) {
        OverlayVector ov;
        ov.counts = std::move(counts);
        ov.year = year;
        return ov;
    };
    std::vector<OverlayVector> doubling, constant, zero_base;
    double v = 10;
    for (int year = 2004; year <= 2008; ++year) {
        doubling.push_back(overlay_of({v}, year));
        v *= 2;
    }
    for (int year = 2004; year <= 2006; ++year) constant.push_back(overlay_of({7}, year));
    zero_base = {overlay_of({0}, 2004), overlay_of({0}, 2005), overlay_of({5}, 2006)};

    auto gd = growth_rates(doubling);
    auto gc = growth_rates(constant);
    auto gz = growth_rates(zero_base);
    report("doubling series: average growth exactly 1.0",
           gd.growth[0].has_value() && *gd.growth[0] == 1.0);
    report("constant series: growth exactly 0", gc.growth[0].has_value() && *gc.growth[0] == 0.0);
    report("zero-baseline category: growth undefined (not 0, not inf)",
           !gz.growth[0].has_value());
}

// ---- criterion 8: diversity -------------------------------------------------

void diversity_criterion() {
    testutil::Rng rng(113);
    auto m = testutil::random_citation_matrix(rng, 50);
    auto sim = cosine_citing(m);
    std::vector<double> counts(50, 0.0);
    for (auto& c : counts) c = static_cast<double>(rng.uniform_int(0, 40));
    counts[7] = 13;

    OverlayVector ov;
    ov.counts = counts;
    auto base = diversity(ov, sim);

    OverlayVector scaled;
    scaled.counts = counts;
    for (auto& c : scaled.counts) c *= 1e4;
    auto rep = diversity(scaled, sim);
    bool scale_ok = rep.variety == base.variety && std::fabs(rep.balance - base.balance) < 1e-12 &&
                    std::fabs(rep.disparity - base.disparity) < 1e-12 &&
                    std::fabs(rep.rao_stirling - base.rao_stirling) < 1e-12;
    report("diversity fields invariant under count scaling x 1e4 (< 1e-12)", scale_ok);

    bool brute_ok = true;
    for (int trial = 0; trial < 10 && brute_ok; ++trial) {
        int s = rng.uniform_int(2, 50);
        auto mm = testutil::random_citation_matrix(rng, s);
        auto ss = cosine_citing(mm);
        OverlayVector vv;
        vv.counts.assign(static_cast<std::size_t>(s), 0.0);
        for (auto& c : vv.counts) c = rng.uniform(0.0, 9.0);
        vv.counts[0] = 2;
        double total = vv.sum();
        double rs = 0;
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < s; ++j) {
                if (i == j) continue;
                rs += 0.5 * (vv.counts[static_cast<std::size_t>(i)] / total) *
                      (vv.counts[static_cast<std::size_t>(j)] / total) * (1.0 - ss.at(i, j));
            }
        if (std::fabs(diversity(vv, ss).rao_stirling - rs) >= 1e-12) brute_ok = false;
    }
    report("rao-stirling closed form equals brute-force pair loop up to S = 50 (< 1e-12)",
           brute_ok);

    SimilarityMatrix flat(4, DiagonalMode::Include);
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) flat.set_symmetric(i, j, i == j ? 1.0 : 0.3);
    OverlayVector uniform;
    uniform.counts = {3, 3, 3, 3};
    report("uniform distribution gives balance exactly 1",
           diversity(uniform, flat).balance == 1.0);
}

// ---- criterion 9: file round-trips ------------------------------------------

void file_round_trips() {
    testutil::Rng rng(127);
    bool vec_ok = true;
    for (int trial = 0; trial < 100 && vec_ok; ++trial) {
        int s = rng.uniform_int(1, 80);
        OverlayVector ov;
        ov.counts.resize(static_cast<std::size_t>(s));
        for (auto& c : ov.counts) {
            switch (rng.uniform_int(0, 2)) {
            case 0: c = static_cast<double>(rng.uniform_int(0, 100000)); break;
            case 1: c = rng.uniform(0.0, 1.0); break;
            default: c = rng.uniform(0.0, 1e9); break;
            }
        }
        if (read_pajek_vec(write_pajek_vec(ov)).counts != ov.counts) vec_ok = false;
    }
    report(".vec write -> read identity on 100 random vectors", vec_ok);

    auto reg = testutil::make_registry(12);
    CitationMatrix m(12);
    testutil::Rng mrng(131);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j)
            m.set(i, j, (i / 4 == j / 4) ? 30 + mrng.uniform_int(0, 20) : mrng.uniform_int(0, 4));
    auto bm = build_basemap(m, reg, 0.15, 3, LayoutConfig{});
    std::string once = serialize_basemap(bm);
    std::string twice = serialize_basemap(parse_basemap(once));
    report("basemap serialize -> load -> serialize is byte-identical", once == twice);

    std::string net1 = write_pajek_net(bm);
    std::string net2 = write_pajek_net(parse_basemap(once));
    auto bm_again = build_basemap(m, reg, 0.15, 3, LayoutConfig{});
    std::string net3 = write_pajek_net(bm_again);
    report(".net output byte-identical across reruns", net1 == net2 && net1 == net3);
}

// ---- criterion 10: end-to-end desk-scale run --------------------------------

void end_to_end() {
    auto t0 = std::chrono::steady_clock::now();
    const std::string demo = SCIMAP_DEMO_DATA_DIR;

    auto reg = load_registry(demo + "/demo_registry.tsv");
    auto matrix = load_citation_matrix(demo + "/demo_matrix.tsv", reg);
    LayoutConfig cfg;
    cfg.seed = 7;
    auto bm = build_basemap(matrix, reg, 0.15, 3, cfg);

    auto rows = parse_analyze(read_text_file(demo + "/demo_analyze.txt"), "demo_analyze.txt");
    auto ov = overlay_from_rows(rows, bm.registry, "demo");
    RenderOptions opts;
    std::string svg = render_svg(bm, &ov, opts);

    bool built = bm.node_count() == 30 && bm.registry.macros().size() == 3 && !svg.empty();

    // node areas proportional to counts: extract radii and compare squared
    // ratios against count ratios
    bool radii_ok = true;
    {
        std::vector<double> radii;
        std::size_t pos = 0;
        while ((pos = svg.find("class=\"node\"", pos)) != std::string::npos) {
            auto rpos = svg.find(" r=\"", pos);
            auto rend = svg.find('"', rpos + 4);
            radii.push_back(*parse_double(svg.substr(rpos + 4, rend - rpos - 4)));
            pos = rend;
        }
        if (radii.size() != 30) radii_ok = false;
        int ref = -1;
        for (int i = 0; i < 30 && radii_ok; ++i) {
            if (ov.counts[static_cast<std::size_t>(i)] > 0) {
                if (ref < 0) { ref = i; continue; }
                double want = ov.counts[static_cast<std::size_t>(i)] / ov.counts[static_cast<std::size_t>(ref)];
                double got = (radii[static_cast<std::size_t>(i)] * radii[static_cast<std::size_t>(i)]) /
                             (radii[static_cast<std::size_t>(ref)] * radii[static_cast<std::size_t>(ref)]);
                if (std::fabs(got - want) >= 1e-9 * std::max(1.0, want)) radii_ok = false;
            }
        }
    }

    double elapsed = ms_since(t0);
    report("end-to-end 30-category run: basemap (tau 0.15, F 3) -> overlay -> SVG",
           built && radii_ok);
    report("end-to-end run completes in under 5 s (" + std::to_string(static_cast<int>(elapsed)) +
               " ms)",
           elapsed < 5000.0);
}

} // namespace

int main() {
    table_reproduction();
    cosine_oracle_equivalence();
    layout_correctness();
    factor_recovery();
    threshold_semantics();
    ingest_conservation();
    growth_rates_criterion();
    diversity_criterion();
    file_round_trips();
    end_to_end();

    std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAILED")
              << "\n";
    return failures;
}
