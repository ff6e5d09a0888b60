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

#include <algorithm>
#include <cctype>
#include <fstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "adscope/errors.hpp"

namespace adscope {

/// Extracts the lowercased hostname from a URL or bare domain string:
/// strips scheme, userinfo, port, path, query and fragment.
inline std::string hostname_of(const std::string& url) {
    std::string s = url;
    if (auto scheme = s.find("://"); scheme != std::string::npos) s.erase(0, scheme + 3);
    if (auto at = s.find('@'); at != std::string::npos) s.erase(0, at + 1);
    if (auto slash = s.find_first_of("/?#"); slash != std::string::npos) s.erase(slash);
    if (auto colon = s.find(':'); colon != std::string::npos) s.erase(colon);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    while (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

/// Splits a hostname into its chain of dot-separated suffixes, longest
/// first: "a.b.co" -> ["a.b.co", "b.co", "co"].
inline std::vector<std::string> hostname_suffixes(const std::string& hostname) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < hostname.size()) {
        out.push_back(hostname.substr(pos));
        const std::size_t dot = hostname.find('.', pos);
        if (dot == std::string::npos) break;
        pos = dot + 1;
    }
    return out;
}

/// Public-suffix-style list used to decide where the registrable part of a
/// domain starts. Holds plain suffixes such as "com" or "co.uk".
class SuffixList {
public:
    SuffixList() = default;
    explicit SuffixList(std::vector<std::string> suffixes) {
        for (std::string& s : suffixes) suffixes_.insert(std::move(s));
    }

    static SuffixList load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw data_error("suffix list: cannot open " + path);
        std::vector<std::string> entries;
        std::string line;
        while (std::getline(in, line)) {
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
            std::size_t start = line.find_first_not_of(" \t");
            if (start == std::string::npos) continue;
            entries.push_back(line.substr(start));
        }
        return SuffixList(std::move(entries));
    }

    bool contains(const std::string& suffix) const { return suffixes_.count(suffix) > 0; }
    bool empty() const { return suffixes_.empty(); }

    /// Registrable domain: one label more than the longest known public
    /// suffix of the hostname ("store.apple.com" -> "apple.com"). A
    /// hostname that is itself a public suffix, or matches no suffix at
    /// all, falls back to its last two labels.
    std::string registrable(const std::string& host_or_url) const {
        const std::string host = hostname_of(host_or_url);
        const std::vector<std::string> chain = hostname_suffixes(host);
        // chain is longest-first; find the longest entry that is a known
        // public suffix and prepend one label.
        for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
            if (contains(chain[i + 1])) return chain[i];
        }
        if (chain.size() >= 2) return chain[chain.size() - 2];
        return host;
    }

private:
    std::unordered_set<std::string> suffixes_;
};

} // namespace adscope
