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

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "adscope/detector.hpp"
#include "adscope/domains.hpp"
#include "adscope/errors.hpp"
#include "adscope/taxonomy.hpp"

namespace adscope {

/// What an ad must look like to meet a policy: an interest flag (1 =
/// interest-based), a category at either taxonomy level, and a minimum
/// uniqueness percentile. Absent fields are wildcards; at least one field
/// must be present.
struct AdConstraint {
    std::optional<int> interest_flag;
    std::optional<CategoryId> category;
    std::optional<double> min_uniqueness_percentile;

    bool has_any_field() const {
        return interest_flag || category || min_uniqueness_percentile;
    }
};

enum class PolicySign { allow, block };

struct Policy {
    AdConstraint constraint;
    PolicySign sign = PolicySign::block;
};

/// Everything the detector learned about one ad. Absent fields mean the
/// pipeline could not decide (no category, no detection rule, no
/// population data); they propagate as unknown matches.
struct AdAnnotation {
    std::string selector_id;
    std::optional<CategoryId> category;
    std::optional<AdClass> decision;
    bool retargeted = false;
    std::optional<double> worst_case_error;
    std::optional<double> uniqueness_percentile;
};

struct PolicySet {
    std::vector<Policy> policies;
    bool block_retargeted = false;
    bool block_very_unique = false; // uniqueness percentile >= 90
};

/// Percentile threshold for the block_very_unique shortcut.
inline constexpr double kVeryUniquePercentile = 90.0;

enum class Match { yes, no, unknown };

enum class Verdict { Show, Hide, Undecidable };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Show: return "show";
        case Verdict::Hide: return "hide";
        default: return "undecidable";
    }
}

struct PolicyVerdict {
    Verdict decision = Verdict::Show;
    std::string explanation; // names the policy or shortcut behind a Hide
};

namespace detail {

/// Level-aware category comparison. A top-level constraint matches every
/// bottom-level annotation under that parent, which requires the
/// taxonomy; without one, cross-level comparisons are unknowable.
inline Match category_match(const CategoryId& want, const CategoryId& have, const Taxonomy* tax) {
    if (want.level == have.level) return want.index == have.index ? Match::yes : Match::no;
    if (want.level == Level::top && have.level == Level::bottom) {
        if (tax == nullptr) return Match::unknown;
        return tax->parent(have.index) == want.index ? Match::yes : Match::no;
    }
    // A bottom-level constraint can never be satisfied by a top-level
    // annotation: the annotation is coarser than the requirement.
    return Match::unknown;
}

} // namespace detail

/// Three-valued test of whether an ad meets a constraint: the conjunction
/// over present constraint fields, where a field whose annotation
/// counterpart is absent evaluates to unknown.
inline Match matches(const AdConstraint& c, const AdAnnotation& a, const Taxonomy* tax = nullptr) {
    bool any_unknown = false;

    if (c.interest_flag) {
        if (!a.decision) {
            any_unknown = true;
        } else {
            const int flag = *a.decision == AdClass::InterestBased ? 1 : 0;
            if (flag != *c.interest_flag) return Match::no;
        }
    }
    if (c.category) {
        if (!a.category) {
            any_unknown = true;
        } else {
            switch (detail::category_match(*c.category, *a.category, tax)) {
                case Match::no: return Match::no;
                case Match::unknown: any_unknown = true; break;
                case Match::yes: break;
            }
        }
    }
    if (c.min_uniqueness_percentile) {
        if (!a.uniqueness_percentile) {
            any_unknown = true;
        } else if (*a.uniqueness_percentile < *c.min_uniqueness_percentile) {
            return Match::no;
        }
    }
    return any_unknown ? Match::unknown : Match::yes;
}

/// Renders a policy in the policy-file syntax, for verdict explanations.
inline std::string render_policy(const Policy& p, const Taxonomy* tax = nullptr) {
    std::ostringstream out;
    out << (p.sign == PolicySign::block ? "block" : "allow");
    if (p.constraint.interest_flag) {
        out << (*p.constraint.interest_flag == 1 ? " interest" : " noninterest");
    }
    if (p.constraint.category) {
        out << " cat:";
        const CategoryId& c = *p.constraint.category;
        if (tax != nullptr) {
            out << '"' << (c.level == Level::top ? tax->top_name(c.index) : tax->bottom_name(c.index))
                << '"';
        } else {
            out << '#' << c.index;
        }
    }
    if (p.constraint.min_uniqueness_percentile) {
        out << " unique>=" << *p.constraint.min_uniqueness_percentile;
    }
    return out.str();
}

/// Applies a policy set to one ad. Blocking prevails: any negative policy
/// that matches hides the ad regardless of allow policies. When no
/// blocking rule matches outright but some could (an unknown match), the
/// outcome genuinely depends on missing data and is Undecidable rather
/// than silently shown. With nothing blocking (or no policies at all) the
/// ad shows. Every Hide names its cause.
inline PolicyVerdict decide(const PolicySet& ps, const AdAnnotation& a,
                            const Taxonomy* tax = nullptr) {
    if (ps.block_retargeted && a.retargeted) {
        return {Verdict::Hide, "block-retargeted"};
    }
    if (ps.block_very_unique && a.uniqueness_percentile &&
        *a.uniqueness_percentile >= kVeryUniquePercentile) {
        return {Verdict::Hide, "block-very-unique"};
    }

    bool any_unknown = ps.block_very_unique && !a.uniqueness_percentile;
    std::string unknown_why = any_unknown ? "block-very-unique needs a uniqueness percentile" : "";
    for (const Policy& p : ps.policies) {
        if (p.sign != PolicySign::block) continue;
        switch (matches(p.constraint, a, tax)) {
            case Match::yes:
                return {Verdict::Hide, render_policy(p, tax)};
            case Match::unknown:
                if (!any_unknown) {
                    any_unknown = true;
                    unknown_why = render_policy(p, tax) + " has an unknown match";
                }
                break;
            case Match::no:
                break;
        }
    }
    if (any_unknown) return {Verdict::Undecidable, unknown_why};
    return {Verdict::Show, ""};
}

/// True iff the ad's landing page belongs to an advertiser the user
/// visited before, compared at registrable-domain granularity.
inline bool is_retargeted(const std::string& landing_domain,
                          const std::set<std::string>& visited_advertisers,
                          const SuffixList& suffixes) {
    const std::string landing = suffixes.registrable(landing_domain);
    if (landing.empty()) return false;
    if (visited_advertisers.count(landing) > 0) return true;
    for (const std::string& v : visited_advertisers) {
        if (suffixes.registrable(v) == landing) return true;
    }
    return false;
}

/// Parses the policy-file format: one directive per line, `#` comments.
///   block [interest|noninterest] [cat:<name>] [unique>=<percentile>]
///   block-retargeted
///   block-very-unique
/// Category names may be double-quoted to include spaces and are resolved
/// against the taxonomy (bottom level preferred).
inline PolicySet parse_policy_file(const std::string& path, const Taxonomy& taxonomy) {
    std::ifstream in(path);
    if (!in) throw data_error("policy file: cannot open " + path);
    PolicySet ps;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = path + ":" + std::to_string(line_no);
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);

        // Tokenize on whitespace, honoring double quotes after `cat:`.
        std::vector<std::string> tokens;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
            if (i >= line.size()) break;
            std::string token;
            bool quoted = false;
            while (i < line.size()) {
                const char ch = line[i];
                if (ch == '"') {
                    quoted = !quoted;
                    ++i;
                    continue;
                }
                if (!quoted && (ch == ' ' || ch == '\t' || ch == '\r')) break;
                token.push_back(ch);
                ++i;
            }
            if (quoted) throw data_error("policy file: unterminated quote at " + where);
            tokens.push_back(std::move(token));
        }
        if (tokens.empty()) continue;

        if (tokens[0] == "block-retargeted" && tokens.size() == 1) {
            ps.block_retargeted = true;
            continue;
        }
        if (tokens[0] == "block-very-unique" && tokens.size() == 1) {
            ps.block_very_unique = true;
            continue;
        }
        if (tokens[0] != "block") {
            throw data_error("policy file: unknown directive '" + tokens[0] + "' at " + where);
        }

        Policy policy;
        policy.sign = PolicySign::block;
        for (std::size_t t = 1; t < tokens.size(); ++t) {
            const std::string& tok = tokens[t];
            if (tok == "interest") {
                policy.constraint.interest_flag = 1;
            } else if (tok == "noninterest") {
                policy.constraint.interest_flag = 0;
            } else if (tok.rfind("cat:", 0) == 0) {
                const std::string name = tok.substr(4);
                auto id = taxonomy.find(name);
                if (!id) {
                    throw data_error("policy file: unknown category '" + name + "' at " + where);
                }
                policy.constraint.category = *id;
            } else if (tok.rfind("unique>=", 0) == 0) {
                try {
                    policy.constraint.min_uniqueness_percentile = std::stod(tok.substr(8));
                } catch (const std::exception&) {
                    throw data_error("policy file: bad percentile at " + where);
                }
            } else {
                throw data_error("policy file: unknown token '" + tok + "' at " + where);
            }
        }
        if (!policy.constraint.has_any_field()) {
            throw data_error("policy file: policy without any constraint at " + where);
        }
        ps.policies.push_back(std::move(policy));
    }
    return ps;
}

} // namespace adscope
