#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scimap/io.hpp"
#include "scimap/text.hpp"

namespace scimap {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;

    bool operator==(const Rgb&) const = default;

    std::string to_hex() const {
        static const char digits[] = "0123456789abcdef";
        std::string s = "#......";
        s[1] = digits[r >> 4];
        s[2] = digits[r & 0xF];
        s[3] = digits[g >> 4];
        s[4] = digits[g & 0xF];
        s[5] = digits[b >> 4];
        s[6] = digits[b & 0xF];
        return s;
    }

    static Rgb from_hex(std::string_view s) {
        auto nibble = [](char c) -> int {
            if (c >= '0' && c <= '9') return c - '0';
            if (c >= 'a' && c <= 'f') return c - 'a' + 10;
            if (c >= 'A' && c <= 'F') return c - 'A' + 10;
            return -1;
        };
        if (s.size() != 7 || s[0] != '#') throw Error("bad color, expected #RRGGBB: " + std::string(s));
        int v[6];
        for (int i = 0; i < 6; ++i) {
            v[i] = nibble(s[static_cast<std::size_t>(i) + 1]);
            if (v[i] < 0) throw Error("bad color, expected #RRGGBB: " + std::string(s));
        }
        return Rgb{static_cast<std::uint8_t>(v[0] * 16 + v[1]),
                   static_cast<std::uint8_t>(v[2] * 16 + v[3]),
                   static_cast<std::uint8_t>(v[4] * 16 + v[5])};
    }
};

/// One macro-discipline: a factor-derived grouping used for coloring and labels.
struct MacroDiscipline {
    int id = 0;
    std::string label;
    Rgb color;

    bool operator==(const MacroDiscipline&) const = default;
};

/// One subject category: the node unit of every map.
struct SubjectCategory {
    int id = 0;
    std::string name;
    std::vector<std::string> aliases;
    std::optional<int> macro_id;

    bool operator==(const SubjectCategory&) const = default;
};

// Canonical category registry. Immutable after construction; every lookup
// goes through the normalized-name index, so WoS spelling variants resolve
// the same way everywhere.
class CategoryRegistry {
public:
    CategoryRegistry() = default;

    static CategoryRegistry from_categories(std::vector<SubjectCategory> cats,
                                            std::vector<MacroDiscipline> macros = {}) {
        CategoryRegistry reg;
        reg.cats_ = std::move(cats);
        reg.macros_ = std::move(macros);
        std::sort(reg.cats_.begin(), reg.cats_.end(),
                  [](const SubjectCategory& a, const SubjectCategory& b) { return a.id < b.id; });
        for (std::size_t i = 0; i < reg.cats_.size(); ++i) {
            if (reg.cats_[i].id != static_cast<int>(i))
                throw Error("category ids must be dense 0..S-1; got id " +
                            std::to_string(reg.cats_[i].id) + " at position " + std::to_string(i));
        }
        reg.build_index();
        return reg;
    }

    std::size_t size() const { return cats_.size(); }
    const std::vector<SubjectCategory>& categories() const { return cats_; }
    const SubjectCategory& category(int id) const { return cats_.at(static_cast<std::size_t>(id)); }
    const std::vector<MacroDiscipline>& macros() const { return macros_; }

    // Returns the id whose canonical name or alias matches after
    // normalization; absence is a legitimate result, not an error.
    std::optional<int> resolve(std::string_view raw) const {
        std::string key = normalize_category_name(raw);
        if (key.empty()) return std::nullopt;
        auto it = index_.find(key);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    bool operator==(const CategoryRegistry& other) const {
        return cats_ == other.cats_ && macros_ == other.macros_;
    }

private:
    void build_index() {
        index_.clear();
        for (const auto& cat : cats_) {
            std::string key = normalize_category_name(cat.name);
            if (key.empty()) throw Error("category " + std::to_string(cat.id) + " has an empty name");
            auto [it, inserted] = index_.emplace(key, cat.id);
            if (!inserted)
                throw Error("duplicate canonical name '" + cat.name + "' (normalizes to '" + key + "')");
        }
        for (const auto& cat : cats_) {
            for (const auto& alias : cat.aliases) {
                std::string key = normalize_category_name(alias);
                if (key.empty()) continue;
                auto it = index_.find(key);
                if (it != index_.end()) {
                    if (it->second != cat.id)
                        throw Error("alias '" + alias + "' of category " + std::to_string(cat.id) +
                                    " collides with category " + std::to_string(it->second));
                    continue;
                }
                index_.emplace(key, cat.id);
            }
        }
    }

    std::vector<SubjectCategory> cats_;
    std::vector<MacroDiscipline> macros_;
    std::unordered_map<std::string, int> index_;
};

// Registry file: UTF-8, one category per line,
//   id<TAB>canonical name<TAB>alias1;alias2;...
// The alias field may be empty or absent. '#' lines are comments.
inline CategoryRegistry parse_registry(std::string_view text,
                                       const std::string& source = "<registry>") {
    std::vector<SubjectCategory> cats;
    std::vector<std::size_t> line_of;
    auto lines = split_lines(text);
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        std::string_view line = lines[ln];
        if (trim(line).empty() || line.starts_with("#")) continue;
        auto fields = split(line, '\t');
        if (fields.size() != 2 && fields.size() != 3)
            throw Error(source + ":" + std::to_string(ln + 1) +
                        ": expected id<TAB>name[<TAB>aliases], got " +
                        std::to_string(fields.size()) + " fields");
        auto id = parse_int(fields[0]);
        if (!id || *id < 0)
            throw Error(source + ":" + std::to_string(ln + 1) + ": bad category id '" +
                        std::string(fields[0]) + "'");
        std::string name(trim(fields[1]));
        if (name.empty())
            throw Error(source + ":" + std::to_string(ln + 1) + ": empty category name");
        SubjectCategory cat;
        cat.id = static_cast<int>(*id);
        cat.name = name;
        if (fields.size() == 3) {
            for (auto part : split(fields[2], ';')) {
                auto a = trim(part);
                if (!a.empty()) cat.aliases.emplace_back(a);
            }
        }
        cats.push_back(std::move(cat));
        line_of.push_back(ln + 1);
    }
    if (cats.empty()) throw Error(source + ": no categories found");

    // Duplicate detection with the offending line number, before handing
    // off to from_categories (which would lose line context).
    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < cats.size(); ++i) {
        std::string key = normalize_category_name(cats[i].name);
        auto [it, inserted] = seen.emplace(key, i);
        if (!inserted)
            throw Error(source + ":" + std::to_string(line_of[i]) + ": duplicate canonical name '" +
                        cats[i].name + "' (first defined at line " +
                        std::to_string(line_of[it->second]) + ")");
    }
    return CategoryRegistry::from_categories(std::move(cats));
}

inline CategoryRegistry load_registry(const std::string& path) {
    return parse_registry(read_text_file(path), path);
}

inline std::string serialize_registry(const CategoryRegistry& reg) {
    std::string out;
    for (const auto& cat : reg.categories()) {
        out += std::to_string(cat.id);
        out += '\t';
        out += cat.name;
        out += '\t';
        for (std::size_t i = 0; i < cat.aliases.size(); ++i) {
            if (i) out += ';';
            out += cat.aliases[i];
        }
        out += '\n';
    }
    return out;
}

// Deterministic wheel of visually distinct colors for F macro-disciplines.
inline std::vector<Rgb> default_palette(int factors) {
    std::vector<Rgb> out;
    out.reserve(static_cast<std::size_t>(factors));
    for (int i = 0; i < factors; ++i) {
        double h = 360.0 * i / factors;
        double s = 0.62, v = 0.86;
        double c = v * s;
        double x = c * (1.0 - std::fabs(std::fmod(h / 60.0, 2.0) - 1.0));
        double m = v - c;
        double r = 0, g = 0, b = 0;
        if (h < 60) { r = c; g = x; }
        else if (h < 120) { r = x; g = c; }
        else if (h < 180) { g = c; b = x; }
        else if (h < 240) { g = x; b = c; }
        else if (h < 300) { r = x; b = c; }
        else { r = c; b = x; }
        out.push_back(Rgb{static_cast<std::uint8_t>(std::lround((r + m) * 255.0)),
                          static_cast<std::uint8_t>(std::lround((g + m) * 255.0)),
                          static_cast<std::uint8_t>(std::lround((b + m) * 255.0))});
    }
    return out;
}

inline std::vector<std::string> default_factor_labels(int factors) {
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(factors));
    for (int i = 0; i < factors; ++i) out.push_back("Factor " + std::to_string(i + 1));
    return out;
}

// Produces a new registry with every category's macro_id set from the
// assignment and the macro-discipline table attached.
inline CategoryRegistry apply_factor_labels(const CategoryRegistry& reg,
                                            const std::vector<int>& assignment,
                                            const std::vector<std::string>& labels,
                                            const std::vector<Rgb>& palette) {
    const std::size_t s = reg.size();
    if (assignment.size() != s)
        throw Error("factor assignment covers " + std::to_string(assignment.size()) +
                    " categories, registry has " + std::to_string(s));
    if (labels.size() != palette.size())
        throw Error("labels/palette length mismatch: " + std::to_string(labels.size()) + " vs " +
                    std::to_string(palette.size()));
    const int f = static_cast<int>(labels.size());
    if (f == 0) throw Error("at least one factor label required");
    for (std::size_t i = 0; i < s; ++i) {
        if (assignment[i] < 0 || assignment[i] >= f)
            throw Error("assignment for category " + std::to_string(i) + " is " +
                        std::to_string(assignment[i]) + ", outside 0.." + std::to_string(f - 1));
    }
    std::unordered_map<std::string, int> label_seen;
    std::vector<MacroDiscipline> macros;
    macros.reserve(static_cast<std::size_t>(f));
    for (int i = 0; i < f; ++i) {
        auto [it, inserted] = label_seen.emplace(labels[static_cast<std::size_t>(i)], i);
        if (!inserted) throw Error("duplicate macro-discipline label '" + labels[static_cast<std::size_t>(i)] + "'");
        macros.push_back(MacroDiscipline{i, labels[static_cast<std::size_t>(i)], palette[static_cast<std::size_t>(i)]});
    }
    std::vector<SubjectCategory> cats = reg.categories();
    for (std::size_t i = 0; i < s; ++i) cats[i].macro_id = assignment[i];
    return CategoryRegistry::from_categories(std::move(cats), std::move(macros));
}

} // namespace scimap
