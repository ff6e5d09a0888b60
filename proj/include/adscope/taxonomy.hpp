// Copyright 2026 the adscope authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "adscope/errors.hpp"
#include "adscope/pmf.hpp"

namespace adscope {

enum class Level { top, bottom };

/// Identity of an interest category. The integer index is the identity;
/// names are display metadata kept in the Taxonomy.
struct CategoryId {
    std::size_t index = 0;
    Level level = Level::bottom;

    friend bool operator==(const CategoryId&, const CategoryId&) = default;
};

/// Two-level interest-category hierarchy. Every bottom-level category has
/// exactly one top-level parent. Immutable after load; safe for concurrent
/// reads.
class Taxonomy {
public:
    Taxonomy(std::vector<std::string> top_names,
             std::vector<std::string> bottom_names,
             std::vector<std::size_t> parent)
        : top_names_(std::move(top_names)),
          bottom_names_(std::move(bottom_names)),
          parent_(std::move(parent)) {
        for (std::size_t i = 0; i < top_names_.size(); ++i) top_index_[top_names_[i]] = i;
        for (std::size_t i = 0; i < bottom_names_.size(); ++i) bottom_index_[bottom_names_[i]] = i;
    }

    std::size_t top_count() const { return top_names_.size(); }
    std::size_t bottom_count() const { return bottom_names_.size(); }

    const std::string& top_name(std::size_t i) const { return top_names_.at(i); }
    const std::string& bottom_name(std::size_t i) const { return bottom_names_.at(i); }

    /// Top-level parent index of a bottom-level category.
    std::size_t parent(std::size_t bottom_index) const { return parent_.at(bottom_index); }

    std::optional<std::size_t> find_top(const std::string& name) const {
        auto it = top_index_.find(name);
        if (it == top_index_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<std::size_t> find_bottom(const std::string& name) const {
        auto it = bottom_index_.find(name);
        if (it == bottom_index_.end()) return std::nullopt;
        return it->second;
    }

    /// Resolves a name at either level, preferring bottom on a collision.
    std::optional<CategoryId> find(const std::string& name) const {
        if (auto b = find_bottom(name)) return CategoryId{*b, Level::bottom};
        if (auto t = find_top(name)) return CategoryId{*t, Level::top};
        return std::nullopt;
    }

private:
    std::vector<std::string> top_names_;
    std::vector<std::string> bottom_names_;
    std::vector<std::size_t> parent_;
    std::unordered_map<std::string, std::size_t> top_index_;
    std::unordered_map<std::string, std::size_t> bottom_index_;
};

namespace detail {

inline std::string strip_taxonomy_line(const std::string& raw) {
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
        line.pop_back();
    }
    std::size_t start = line.find_first_not_of(" \t");
    return start == std::string::npos ? std::string() : line.substr(start);
}

} // namespace detail

/// Loads a taxonomy from its text format: `top:<name>` lines declare
/// top-level categories, `bottom:<name><TAB><top-name>` lines attach
/// bottom-level categories to an already declared parent. `#` starts a
/// comment. Indices follow file order within each level.
inline Taxonomy load_taxonomy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("taxonomy: cannot open " + path);

    std::vector<std::string> top_names;
    std::vector<std::string> bottom_names;
    std::vector<std::size_t> parent;
    std::unordered_map<std::string, std::size_t> top_index;
    std::unordered_map<std::string, bool> bottom_seen;

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = detail::strip_taxonomy_line(raw);
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(line_no);

        if (line.rfind("top:", 0) == 0) {
            std::string name = line.substr(4);
            if (name.empty()) throw data_error("taxonomy: empty top name at " + where);
            if (!top_index.emplace(name, top_names.size()).second) {
                throw data_error("taxonomy: duplicate top category '" + name + "' at " + where);
            }
            top_names.push_back(std::move(name));
        } else if (line.rfind("bottom:", 0) == 0) {
            const std::string rest = line.substr(7);
            const std::size_t tab = rest.find('\t');
            if (tab == std::string::npos) {
                throw data_error("taxonomy: bottom category without parent at " + where);
            }
            std::string name = rest.substr(0, tab);
            const std::string top = rest.substr(tab + 1);
            if (name.empty() || top.empty()) {
                throw data_error("taxonomy: malformed bottom line at " + where);
            }
            auto it = top_index.find(top);
            if (it == top_index.end()) {
                throw data_error("taxonomy: bottom category '" + name +
                                 "' references unknown parent '" + top + "' at " + where);
            }
            if (!bottom_seen.emplace(name, true).second) {
                throw data_error("taxonomy: duplicate bottom category '" + name + "' at " + where);
            }
            bottom_names.push_back(std::move(name));
            parent.push_back(it->second);
        } else {
            throw data_error("taxonomy: unrecognized line at " + where);
        }
    }
    if (top_names.empty()) throw data_error("taxonomy: no top-level categories in " + path);
    return Taxonomy(std::move(top_names), std::move(bottom_names), std::move(parent));
}

/// Aggregates a bottom-level Pmf into its top-level marginal:
/// output_i = sum of d_j over bottom categories j with parent i.
/// Linear and mass-preserving by construction.
inline Pmf project_to_top(const Pmf& d, const Taxonomy& t) {
    if (d.size() != t.bottom_count()) {
        throw data_error("project_to_top: dimension mismatch");
    }
    validate_pmf(d, "project_to_top");
    Pmf out(t.top_count(), 0.0);
    for (std::size_t j = 0; j < d.size(); ++j) out[t.parent(j)] += d[j];
    return out;
}

} // namespace adscope
