#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scimap/registry.hpp"
#include "scimap/text.hpp"

namespace scimap {

/// One data line of an Analyze export: category label, record count, optional percent.
struct AnalyzeRow {
    std::string category;
    long long count = 0;
    std::optional<double> percent;
};

/// One record of a tagged-field export.
struct DocumentRecord {
    std::map<std::string, std::vector<std::string>> fields; // tag -> value lines
    std::vector<std::string> subject_categories;            // SC values, split and deduplicated
};

struct TaggedParseResult {
    std::vector<DocumentRecord> records;
    std::vector<std::string> warnings;
};

// Per-category document counts for one document set, aligned to a registry.
// Counts are real-valued so fractional counting and normalization fit the
// same type. Unmatched raw names are carried along, never dropped.
struct OverlayVector {
    std::vector<double> counts;
    long long total_documents = 0;
    std::string label;
    std::optional<int> year;
    std::vector<std::pair<std::string, double>> unmatched; // raw name -> document count

    double sum() const {
        double s = 0;
        for (double c : counts) s += c;
        return s;
    }
};

namespace detail {

inline bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

// Percent column tolerates a trailing '%' and surrounding spaces.
inline std::optional<double> parse_percent(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.back() == '%') {
        s.remove_suffix(1);
        s = trim(s);
    }
    return parse_double(s);
}

} // namespace detail

// Tolerant Analyze parser. Primary dialect is TAB-separated
// (name<TAB>count[<TAB>percent[<TAB>...]]); lines without tabs fall back to
// splitting on runs of two or more spaces. Lines that do not carry an
// integer count in the second field are treated as header/footer noise and
// skipped, except that a negative count is a hard error.
inline std::vector<AnalyzeRow> parse_analyze(std::string_view text,
                                             const std::string& source = "<analyze>") {
    std::vector<AnalyzeRow> rows;
    auto lines = split_lines(text);
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        std::string_view line = lines[ln];
        if (trim(line).empty()) continue;

        std::vector<std::string> fields;
        if (line.find('\t') != std::string_view::npos) {
            for (auto f : split(line, '\t')) fields.emplace_back(trim(f));
        } else {
            for (auto f : split_multispace(line)) fields.emplace_back(f);
        }
        if (fields.size() < 2 || fields[0].empty()) continue;

        std::string_view count_field = fields[1];
        if (count_field.size() > 1 && count_field.front() == '-' &&
            detail::all_digits(count_field.substr(1)))
            throw Error(source + ":" + std::to_string(ln + 1) + ": negative record count '" +
                        std::string(count_field) + "'");
        if (!detail::all_digits(count_field)) continue;

        AnalyzeRow row;
        row.category = fields[0];
        row.count = *parse_int(count_field);
        if (fields.size() >= 3) row.percent = detail::parse_percent(fields[2]);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(source + ": no data rows");
    return rows;
}

// Tagged-field parser. A field line is a 2-character tag, a space, and a
// value; continuation lines start with exactly three spaces and extend the
// previous tag. Records end at an ER line; an optional EF line terminates
// the file. SC values are split on ';', trimmed, and deduplicated within
// the record.
inline TaggedParseResult parse_tagged(std::string_view text,
                                      const std::string& source = "<tagged>") {
    TaggedParseResult out;
    auto lines = split_lines(text);

    DocumentRecord current;
    bool has_fields = false;
    std::string last_tag;

    auto add_value = [&](const std::string& tag, std::string_view value) {
        current.fields[tag].emplace_back(trim(value));
        has_fields = true;
    };
    auto finish_record = [&] {
        if (!has_fields) return;
        auto it = current.fields.find("SC");
        if (it != current.fields.end()) {
            for (const auto& value : it->second) {
                for (auto part : split(value, ';')) {
                    auto sc = trim(part);
                    if (sc.empty()) continue;
                    std::string name(sc);
                    bool dup = false;
                    for (const auto& existing : current.subject_categories)
                        if (existing == name) { dup = true; break; }
                    if (!dup) current.subject_categories.push_back(std::move(name));
                }
            }
        }
        out.records.push_back(std::move(current));
        current = DocumentRecord{};
        has_fields = false;
        last_tag.clear();
    };

    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        std::string_view line = lines[ln];
        if (trim(line).empty()) continue;

        if (line.starts_with("   ")) {
            if (last_tag.empty())
                throw Error(source + ":" + std::to_string(ln + 1) + ": continuation line without a field");
            add_value(last_tag, line.substr(3));
            continue;
        }
        if (trim(line).size() < 2)
            throw Error(source + ":" + std::to_string(ln + 1) + ": tag line shorter than 2 characters");
        if (line.size() >= 3 && line[2] != ' ')
            throw Error(source + ":" + std::to_string(ln + 1) + ": malformed field line, expected 2-char tag + space");

        std::string tag(line.substr(0, 2));
        if (tag == "ER") {
            finish_record();
            continue;
        }
        if (tag == "EF") break;
        last_tag = tag;
        add_value(tag, line.size() > 3 ? line.substr(3) : std::string_view{});
    }
    if (has_fields) {
        out.warnings.push_back(source + ": record at end of file is missing its ER terminator; kept");
        finish_record();
    }
    return out;
}

// Accumulates Analyze rows into an overlay. total_documents sums the
// matched counts, which over-counts multi-category records the same way
// the Analyze export itself does.
inline OverlayVector overlay_from_rows(const std::vector<AnalyzeRow>& rows,
                                       const CategoryRegistry& registry, std::string label) {
    OverlayVector ov;
    ov.counts.assign(registry.size(), 0.0);
    ov.label = std::move(label);
    bool any_match = false;
    std::map<std::string, double> misses;
    std::vector<std::string> miss_order;
    for (const auto& row : rows) {
        if (auto id = registry.resolve(row.category)) {
            ov.counts[static_cast<std::size_t>(*id)] += static_cast<double>(row.count);
            ov.total_documents += row.count;
            any_match = true;
        } else {
            auto [it, inserted] = misses.emplace(row.category, 0.0);
            if (inserted) miss_order.push_back(row.category);
            it->second += static_cast<double>(row.count);
        }
    }
    if (!any_match) throw Error("no category name matched the registry");
    for (const auto& name : miss_order) ov.unmatched.emplace_back(name, misses.at(name));
    return ov;
}

enum class CountingMode { Whole, Fractional };

// Whole counting credits every matched category of a record with 1;
// fractional splits the single credit across them. total_documents counts
// records with at least one matched category.
inline OverlayVector overlay_from_records(const std::vector<DocumentRecord>& records,
                                          const CategoryRegistry& registry, CountingMode counting,
                                          std::string label) {
    OverlayVector ov;
    ov.counts.assign(registry.size(), 0.0);
    ov.label = std::move(label);
    std::map<std::string, double> misses;
    std::vector<std::string> miss_order;
    for (const auto& rec : records) {
        std::vector<int> matched;
        for (const auto& raw : rec.subject_categories) {
            if (auto id = registry.resolve(raw)) {
                bool dup = false;
                for (int m : matched)
                    if (m == *id) { dup = true; break; }
                if (!dup) matched.push_back(*id);
            } else {
                auto [it, inserted] = misses.emplace(raw, 0.0);
                if (inserted) miss_order.push_back(raw);
                it->second += 1.0;
            }
        }
        if (matched.empty()) continue;
        ov.total_documents += 1;
        double credit = counting == CountingMode::Whole ? 1.0 : 1.0 / static_cast<double>(matched.size());
        for (int id : matched) ov.counts[static_cast<std::size_t>(id)] += credit;
    }
    for (const auto& name : miss_order) ov.unmatched.emplace_back(name, misses.at(name));
    return ov;
}

} // namespace scimap
