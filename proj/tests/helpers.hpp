#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "scimap/registry.hpp"
#include "scimap/ingest.hpp"
#include "scimap/matrix.hpp"

namespace testutil {

// Deterministic generator for test data; raw-bit uniforms so values are
// identical on every platform.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi) { // inclusive bounds
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

inline scimap::CategoryRegistry make_registry(int s) {
    std::vector<scimap::SubjectCategory> cats;
    for (int i = 0; i < s; ++i) {
        scimap::SubjectCategory c;
        c.id = i;
        c.name = "CATEGORY " + std::to_string(i);
        cats.push_back(std::move(c));
    }
    return scimap::CategoryRegistry::from_categories(std::move(cats));
}

inline scimap::CitationMatrix random_citation_matrix(Rng& rng, int s, int max_entry = 9) {
    scimap::CitationMatrix m(s);
    while (true) {
        bool any = false;
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < s; ++j) {
                auto v = static_cast<std::int64_t>(rng.uniform_int(0, max_entry));
                m.set(i, j, v);
                if (v > 0) any = true;
            }
        if (any) return m;
    }
}

// Independent per-pair cosine oracle: plain dot product over norms, with
// the same pairwise-exclusion rule when the diagonal mode asks for it.
inline double cosine_oracle(const scimap::CitationMatrix& m, int i, int j,
                            scimap::DiagonalMode mode) {
    double dot = 0, ni = 0, nj = 0;
    for (int k = 0; k < m.size(); ++k) {
        if (mode == scimap::DiagonalMode::ExcludePair && (k == i || k == j)) continue;
        double a = static_cast<double>(m.at(i, k));
        double b = static_cast<double>(m.at(j, k));
        dot += a * b;
        ni += a * a;
        nj += b * b;
    }
    if (!(ni > 0) || !(nj > 0)) return 0.0;
    if (i == j) return 1.0;
    double v = dot / (std::sqrt(ni) * std::sqrt(nj));
    if (v < 0) v = 0;
    if (v > 1) v = 1;
    return v;
}

// Adjusted Rand index between two labelings.
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    auto comb2 = [](double n) { return n * (n - 1.0) / 2.0; };
    int ka = 0, kb = 0;
    for (int x : a) ka = std::max(ka, x + 1);
    for (int x : b) kb = std::max(kb, x + 1);
    std::vector<std::vector<double>> table(static_cast<std::size_t>(ka),
                                           std::vector<double>(static_cast<std::size_t>(kb), 0.0));
    for (std::size_t i = 0; i < a.size(); ++i) table[static_cast<std::size_t>(a[i])][static_cast<std::size_t>(b[i])] += 1.0;
    std::vector<double> rows(static_cast<std::size_t>(ka), 0.0), cols(static_cast<std::size_t>(kb), 0.0);
    double sum_cells = 0.0;
    for (int i = 0; i < ka; ++i)
        for (int j = 0; j < kb; ++j) {
            double n = table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            rows[static_cast<std::size_t>(i)] += n;
            cols[static_cast<std::size_t>(j)] += n;
            sum_cells += comb2(n);
        }
    double sum_rows = 0.0, sum_cols = 0.0;
    for (double r : rows) sum_rows += comb2(r);
    for (double c : cols) sum_cols += comb2(c);
    double total = comb2(static_cast<double>(a.size()));
    double expected = sum_rows * sum_cols / total;
    double max_index = (sum_rows + sum_cols) / 2.0;
    if (max_index == expected) return 1.0; // degenerate: single cluster both sides
    return (sum_cells - expected) / (max_index - expected);
}

// Writes synthetic records back into the tagged-field grammar; test-only
// counterpart of parse_tagged for round-trip checks.
inline std::string write_tagged(const std::vector<scimap::DocumentRecord>& records) {
    std::string out = "FN Synthetic export\nVR 1.0\n";
    for (const auto& rec : records) {
        for (const auto& [tag, values] : rec.fields) {
            for (std::size_t i = 0; i < values.size(); ++i) {
                if (i == 0) out += tag + " " + values[i] + "\n";
                else out += "   " + values[i] + "\n";
            }
        }
        out += "ER\n\n";
    }
    out += "EF\n";
    return out;
}

// Minimal XML well-formedness check: tag balance, quote closure, and
// attribute shape. Enough to validate our own SVG output.
inline bool xml_well_formed(std::string_view doc) {
    std::vector<std::string> stack;
    std::size_t i = 0;
    auto skip_until = [&](std::string_view end) {
        auto pos = doc.find(end, i);
        if (pos == std::string_view::npos) return false;
        i = pos + end.size();
        return true;
    };
    while (i < doc.size()) {
        if (doc[i] != '<') {
            ++i;
            continue;
        }
        if (doc.compare(i, 4, "<!--") == 0) {
            if (!skip_until("-->")) return false;
            continue;
        }
        if (doc.compare(i, 2, "<?") == 0) {
            if (!skip_until("?>")) return false;
            continue;
        }
        auto close = doc.find('>', i);
        if (close == std::string_view::npos) return false;
        std::string_view tag = doc.substr(i + 1, close - i - 1);
        i = close + 1;
        if (tag.empty()) return false;
        if (tag.front() == '/') {
            std::string name(tag.substr(1));
            if (stack.empty() || stack.back() != name) return false;
            stack.pop_back();
            continue;
        }
        bool self_closing = tag.back() == '/';
        if (self_closing) tag.remove_suffix(1);
        auto sp = tag.find_first_of(" \t\n");
        std::string name(sp == std::string_view::npos ? tag : tag.substr(0, sp));
        if (name.empty()) return false;
        // quotes must balance inside the tag
        int quotes = 0;
        for (char c : tag)
            if (c == '"') ++quotes;
        if (quotes % 2 != 0) return false;
        if (!self_closing) stack.push_back(name);
    }
    return stack.empty();
}

inline int count_occurrences(std::string_view doc, std::string_view needle) {
    int n = 0;
    std::size_t pos = 0;
    while ((pos = doc.find(needle, pos)) != std::string_view::npos) {
        ++n;
        pos += needle.size();
    }
    return n;
}

// Scoped temp directory under the system temp path.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("scimap_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return s;
}

} // namespace testutil
