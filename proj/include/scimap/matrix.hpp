#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "scimap/io.hpp"
#include "scimap/registry.hpp"
#include "scimap/text.hpp"

namespace scimap {

// Square citing->cited count matrix, rows and columns aligned to registry
// ids: counts(i, j) = citations from category i to category j.
class CitationMatrix {
public:
    CitationMatrix() = default;
    explicit CitationMatrix(int size)
        : size_(size), counts_(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 0) {}

    int size() const { return size_; }

    std::int64_t at(int i, int j) const {
        return counts_[static_cast<std::size_t>(i) * static_cast<std::size_t>(size_) + static_cast<std::size_t>(j)];
    }
    void set(int i, int j, std::int64_t v) {
        counts_[static_cast<std::size_t>(i) * static_cast<std::size_t>(size_) + static_cast<std::size_t>(j)] = v;
    }

    std::int64_t total() const {
        std::int64_t t = 0;
        for (auto v : counts_) t += v;
        return t;
    }

    // Hash over the logical content (dimension + counts), independent of
    // source-file formatting; basemaps record it as provenance.
    std::uint64_t content_hash() const {
        std::string repr = std::to_string(size_);
        for (auto v : counts_) {
            repr += ',';
            repr += std::to_string(v);
        }
        return fnv1a64(repr);
    }

private:
    int size_ = 0;
    std::vector<std::int64_t> counts_;
};

enum class DiagonalMode {
    Include,     // cosine over full citing rows
    ExcludePair, // drop the two self-citation coordinates i and j per pair
};

// Symmetric cosine similarity values in [0,1]. Rows of the source matrix
// that are entirely zero are listed in zero_rows(); they have similarity 0
// against everything, including themselves.
class SimilarityMatrix {
public:
    SimilarityMatrix() = default;
    SimilarityMatrix(int size, DiagonalMode mode)
        : size_(size), mode_(mode),
          values_(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 0.0) {}

    int size() const { return size_; }
    DiagonalMode diagonal_mode() const { return mode_; }

    double at(int i, int j) const {
        return values_[static_cast<std::size_t>(i) * static_cast<std::size_t>(size_) + static_cast<std::size_t>(j)];
    }
    void set_symmetric(int i, int j, double v) {
        values_[static_cast<std::size_t>(i) * static_cast<std::size_t>(size_) + static_cast<std::size_t>(j)] = v;
        values_[static_cast<std::size_t>(j) * static_cast<std::size_t>(size_) + static_cast<std::size_t>(i)] = v;
    }

    const std::vector<int>& zero_rows() const { return zero_rows_; }
    void set_zero_rows(std::vector<int> rows) { zero_rows_ = std::move(rows); }

private:
    int size_ = 0;
    DiagonalMode mode_ = DiagonalMode::Include;
    std::vector<double> values_;
    std::vector<int> zero_rows_;
};

// Matrix file: optional '#' comment lines, then a TAB-separated header of
// canonical category names (row order identical to column order), then one
// row of TAB-separated nonnegative integers per header entry.
inline CitationMatrix parse_citation_matrix(std::string_view text, const CategoryRegistry& registry,
                                            const std::string& source = "<matrix>") {
    auto lines = split_lines(text);
    const std::size_t s = registry.size();

    std::size_t ln = 0;
    while (ln < lines.size() && (trim(lines[ln]).empty() || lines[ln].starts_with("#"))) ++ln;
    if (ln >= lines.size()) throw Error(source + ": empty matrix file");

    auto header = split(lines[ln], '\t');
    if (header.size() != s)
        throw Error(source + ": header names " + std::to_string(header.size()) +
                    " categories, registry has " + std::to_string(s));

    std::vector<int> col_id(header.size());
    std::vector<std::string> unresolved;
    std::vector<char> used(s, 0);
    for (std::size_t c = 0; c < header.size(); ++c) {
        auto id = registry.resolve(header[c]);
        if (!id) {
            unresolved.emplace_back(trim(header[c]));
            continue;
        }
        if (used[static_cast<std::size_t>(*id)])
            throw Error(source + ": header repeats category '" + std::string(trim(header[c])) + "'");
        used[static_cast<std::size_t>(*id)] = 1;
        col_id[c] = *id;
    }
    if (!unresolved.empty()) {
        std::string msg = source + ": unresolved header categories:";
        for (const auto& n : unresolved) msg += " '" + n + "'";
        throw Error(msg);
    }

    CitationMatrix m(static_cast<int>(s));
    std::size_t row = 0;
    for (++ln; ln < lines.size(); ++ln) {
        if (trim(lines[ln]).empty()) continue;
        if (row >= s)
            throw Error(source + ":" + std::to_string(ln + 1) + ": non-square: more than " +
                        std::to_string(s) + " data rows");
        auto fields = split(lines[ln], '\t');
        if (fields.size() != s)
            throw Error(source + ":" + std::to_string(ln + 1) + ": non-square: row has " +
                        std::to_string(fields.size()) + " columns, expected " + std::to_string(s));
        for (std::size_t c = 0; c < s; ++c) {
            auto v = parse_int(fields[c]);
            if (!v)
                throw Error(source + ":" + std::to_string(ln + 1) + ": non-integer entry '" +
                            std::string(trim(fields[c])) + "' in column " + std::to_string(c + 1));
            if (*v < 0)
                throw Error(source + ":" + std::to_string(ln + 1) + ": negative entry " +
                            std::to_string(*v) + " in column " + std::to_string(c + 1));
            m.set(col_id[row], col_id[c], *v);
        }
        ++row;
    }
    if (row != s)
        throw Error(source + ": non-square: " + std::to_string(row) + " data rows, expected " +
                    std::to_string(s));
    return m;
}

inline CitationMatrix load_citation_matrix(const std::string& path, const CategoryRegistry& registry) {
    return parse_citation_matrix(read_text_file(path), registry, path);
}

// Salton's cosine between citing rows. With DiagonalMode::ExcludePair the
// coordinates i and j are dropped from both vectors before the pair (i, j)
// is compared. Output is symmetric, clamped to [0,1], with an exact 1 on
// the diagonal of any row that is nonzero after exclusion.
inline SimilarityMatrix cosine_citing(const CitationMatrix& m,
                                      DiagonalMode mode = DiagonalMode::Include) {
    const int s = m.size();
    if (s <= 0) throw Error("cosine: empty matrix");

    std::vector<double> norm2(static_cast<std::size_t>(s), 0.0);
    bool any_nonzero = false;
    std::vector<int> zero_rows;
    for (int i = 0; i < s; ++i) {
        double n2 = 0;
        for (int k = 0; k < s; ++k) {
            double v = static_cast<double>(m.at(i, k));
            n2 += v * v;
        }
        norm2[static_cast<std::size_t>(i)] = n2;
        if (n2 > 0) any_nonzero = true;
        else zero_rows.push_back(i);
    }
    if (!any_nonzero) throw Error("cosine: citation matrix has no nonzero citing row");

    SimilarityMatrix sim(s, mode);
    sim.set_zero_rows(std::move(zero_rows));
    for (int i = 0; i < s; ++i) {
        for (int j = i; j < s; ++j) {
            double dot = 0, ni2 = 0, nj2 = 0;
            if (mode == DiagonalMode::Include) {
                for (int k = 0; k < s; ++k)
                    dot += static_cast<double>(m.at(i, k)) * static_cast<double>(m.at(j, k));
                ni2 = norm2[static_cast<std::size_t>(i)];
                nj2 = norm2[static_cast<std::size_t>(j)];
            } else {
                for (int k = 0; k < s; ++k) {
                    if (k == i || k == j) continue;
                    double a = static_cast<double>(m.at(i, k));
                    double b = static_cast<double>(m.at(j, k));
                    dot += a * b;
                    ni2 += a * a;
                    nj2 += b * b;
                }
            }
            double value = 0.0;
            if (ni2 > 0 && nj2 > 0) {
                if (i == j) {
                    value = 1.0;
                } else {
                    value = dot / (std::sqrt(ni2) * std::sqrt(nj2));
                    value = std::clamp(value, 0.0, 1.0);
                }
            }
            sim.set_symmetric(i, j, value);
        }
    }
    return sim;
}

} // namespace scimap
