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

#include <cctype>
#include <cstddef>
#include <fstream>
#include <list>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "adscope/domains.hpp"
#include "adscope/errors.hpp"
#include "adscope/taxonomy.hpp"

namespace adscope {

/// A page to classify. Only the url is required; empty text fields simply
/// contribute no evidence.
struct PageText {
    std::string url;
    std::string title;
    std::vector<std::string> keywords;
    std::string content;
};

/// Per-field multipliers for text evidence. Keywords, title and url are
/// weighted above body content because they are curated descriptions of
/// the page.
struct FieldWeights {
    double url = 2.0;
    double title = 3.0;
    double keywords = 4.0;
    double content = 1.0;
};

/// Term-based classification data: exact domain lookups plus an n-gram
/// table whose weights carry each term's precomputed IDF contribution.
/// Immutable after load.
class Lexicon {
public:
    using TermEntry = std::vector<std::pair<std::size_t, double>>; // (bottom category, weight)

    void add_url(const std::string& domain, std::size_t category) {
        url_map_[hostname_of(domain)] = category;
    }

    void add_ngram(const std::string& term, std::size_t category, double weight) {
        if (weight < 0.0) throw data_error("lexicon: negative term weight for '" + term + "'");
        ngram_table_[term].emplace_back(category, weight);
    }

    const std::unordered_map<std::string, std::size_t>& url_map() const { return url_map_; }

    const TermEntry* lookup_term(const std::string& term) const {
        auto it = ngram_table_.find(term);
        return it == ngram_table_.end() ? nullptr : &it->second;
    }

    std::optional<std::size_t> lookup_domain(const std::string& domain) const {
        auto it = url_map_.find(domain);
        if (it == url_map_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::unordered_map<std::string, std::size_t> url_map_;
    std::unordered_map<std::string, TermEntry> ngram_table_;
};

/// Loads a lexicon file. Lines are either
///   url<TAB>domain<TAB>category
///   ngram<TAB>term<TAB>category<TAB>weight
/// where category is a bottom-level taxonomy name. `#` at line start is a
/// comment.
inline Lexicon load_lexicon(const std::string& path, const Taxonomy& taxonomy) {
    std::ifstream in(path);
    if (!in) throw data_error("lexicon: cannot open " + path);
    Lexicon lex;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos || line[start] == '#') continue;
        const std::string where = path + ":" + std::to_string(line_no);

        std::vector<std::string> cols;
        std::size_t pos = 0;
        while (true) {
            const std::size_t tab = line.find('\t', pos);
            cols.push_back(line.substr(pos, tab - pos));
            if (tab == std::string::npos) break;
            pos = tab + 1;
        }

        auto category_of = [&](const std::string& name) {
            auto idx = taxonomy.find_bottom(name);
            if (!idx) throw data_error("lexicon: unknown category '" + name + "' at " + where);
            return *idx;
        };

        if (cols[0] == "url" && cols.size() == 3) {
            lex.add_url(cols[1], category_of(cols[2]));
        } else if (cols[0] == "ngram" && cols.size() == 4) {
            double weight = 0.0;
            try {
                weight = std::stod(cols[3]);
            } catch (const std::exception&) {
                throw data_error("lexicon: bad weight at " + where);
            }
            lex.add_ngram(cols[1], category_of(cols[2]), weight);
        } else {
            throw data_error("lexicon: malformed line at " + where);
        }
    }
    return lex;
}

/// Least-recently-used cache of url -> category, bounded at 500 entries to
/// track only the recent browsing history.
class CategoryCache {
public:
    static constexpr std::size_t kCapacity = 500;

    explicit CategoryCache(std::size_t capacity = kCapacity) : capacity_(capacity) {}

    std::optional<CategoryId> get(const std::string& url) {
        auto it = index_.find(url);
        if (it == index_.end()) return std::nullopt;
        order_.splice(order_.begin(), order_, it->second);
        return it->second->second;
    }

    void put(const std::string& url, CategoryId category) {
        auto it = index_.find(url);
        if (it != index_.end()) {
            it->second->second = category;
            order_.splice(order_.begin(), order_, it->second);
            return;
        }
        order_.emplace_front(url, category);
        index_[url] = order_.begin();
        if (order_.size() > capacity_) {
            index_.erase(order_.back().first);
            order_.pop_back();
        }
    }

    std::size_t size() const { return order_.size(); }

private:
    std::size_t capacity_;
    std::list<std::pair<std::string, CategoryId>> order_;
    std::unordered_map<std::string, std::list<std::pair<std::string, CategoryId>>::iterator> index_;
};

namespace detail {

/// Lowercases and splits on non-alphanumeric characters.
inline std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

/// Accumulates field evidence into per-category scores: weight * tf * idf
/// for every unigram and adjacent-pair bigram found in the lexicon.
inline void score_field(const std::string& text, double field_weight, const Lexicon& lex,
                        std::unordered_map<std::size_t, double>& scores) {
    if (field_weight <= 0.0 || text.empty()) return;
    const std::vector<std::string> tokens = tokenize(text);
    auto add = [&](const std::string& term) {
        if (const Lexicon::TermEntry* entry = lex.lookup_term(term)) {
            for (const auto& [category, weight] : *entry) {
                scores[category] += field_weight * weight;
            }
        }
    };
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        add(tokens[i]);
        if (i + 1 < tokens.size()) add(tokens[i] + " " + tokens[i + 1]);
    }
}

} // namespace detail

/// Exact-domain classification: returns the category mapped to the longest
/// hostname suffix present in the lexicon's url map, or absent.
inline std::optional<CategoryId> classify_url(const std::string& url, const Lexicon& lex) {
    const std::string host = hostname_of(url);
    for (const std::string& suffix : hostname_suffixes(host)) {
        if (auto cat = lex.lookup_domain(suffix)) return CategoryId{*cat, Level::bottom};
    }
    return std::nullopt;
}

/// Term-frequency scoring over the page's text fields. Returns the
/// highest-scoring category and its score; absent when no lexicon term
/// matches. Ties break toward the smallest category index so the result
/// is deterministic.
inline std::optional<std::pair<CategoryId, double>> classify_text(
    const PageText& page, const Lexicon& lex, const FieldWeights& weights = {}) {
    std::unordered_map<std::size_t, double> scores;
    detail::score_field(page.url, weights.url, lex, scores);
    detail::score_field(page.title, weights.title, lex, scores);
    for (const std::string& keyword : page.keywords) {
        detail::score_field(keyword, weights.keywords, lex, scores);
    }
    detail::score_field(page.content, weights.content, lex, scores);

    std::optional<std::pair<CategoryId, double>> best;
    for (const auto& [category, score] : scores) {
        if (score <= 0.0) continue;
        if (!best || score > best->second ||
            (score == best->second && category < best->first.index)) {
            best = {CategoryId{category, Level::bottom}, score};
        }
    }
    return best;
}

/// Full page classification: cache, then url lookup, then text fallback.
/// Classifiable results are cached; an unclassifiable page yields absent
/// and is never cached.
inline std::optional<CategoryId> classify_page(const PageText& page, const Lexicon& lex,
                                               CategoryCache& cache,
                                               const FieldWeights& weights = {}) {
    if (auto hit = cache.get(page.url)) return hit;
    std::optional<CategoryId> result = classify_url(page.url, lex);
    if (!result) {
        if (auto scored = classify_text(page, lex, weights)) result = scored->first;
    }
    if (result) cache.put(page.url, *result);
    return result;
}

} // namespace adscope
