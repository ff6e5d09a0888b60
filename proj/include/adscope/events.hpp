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

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "adscope/errors.hpp"
#include "adscope/profiles.hpp"
#include "adscope/simulator.hpp"

namespace adscope {

/// One line of the event log: either a page visit or an ad observation.
/// The category may be carried as an integer index, a category name (to
/// be resolved against the taxonomy), or omitted entirely (to be derived
/// by the categorizer, or tallied undecidable).
struct EventRecord {
    enum class Kind { visit, ad };

    Kind kind = Kind::visit;
    long long ts = 0;
    VisitMode mode = VisitMode::normal;
    std::optional<std::size_t> category;
    std::optional<std::string> category_name;
    // visit fields
    std::string url;
    std::vector<std::string> tracked_by;
    // ad fields
    std::string selector;
    std::string landing;
};

inline EventRecord parse_event_line(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("event: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw data_error("event: not a JSON object");

    EventRecord rec;
    const std::string kind = j.value("kind", "");
    if (kind == "visit") {
        rec.kind = EventRecord::Kind::visit;
    } else if (kind == "ad") {
        rec.kind = EventRecord::Kind::ad;
    } else {
        throw data_error("event: unknown kind '" + kind + "'");
    }
    if (!j.contains("ts") || !j["ts"].is_number()) throw data_error("event: missing ts");
    rec.ts = j["ts"].get<long long>();

    const std::string mode = j.value("mode", "normal");
    if (mode == "normal") {
        rec.mode = VisitMode::normal;
    } else if (mode == "incognito") {
        rec.mode = VisitMode::incognito;
    } else {
        throw data_error("event: unknown mode '" + mode + "'");
    }

    if (j.contains("category") && !j["category"].is_null()) {
        const auto& c = j["category"];
        if (c.is_number_unsigned() || c.is_number_integer()) {
            const long long idx = c.get<long long>();
            if (idx < 0) throw data_error("event: negative category index");
            rec.category = static_cast<std::size_t>(idx);
        } else if (c.is_string()) {
            rec.category_name = c.get<std::string>();
        } else {
            throw data_error("event: category must be an index or a name");
        }
    }

    if (rec.kind == EventRecord::Kind::visit) {
        rec.url = j.value("url", "");
        if (j.contains("tracked_by")) {
            if (!j["tracked_by"].is_array()) throw data_error("event: tracked_by must be a list");
            for (const auto& s : j["tracked_by"]) {
                if (!s.is_string()) throw data_error("event: tracked_by entries must be strings");
                rec.tracked_by.push_back(s.get<std::string>());
            }
        }
    } else {
        if (!j.contains("selector") || !j["selector"].is_string()) {
            throw data_error("event: ad without selector");
        }
        rec.selector = j["selector"].get<std::string>();
        rec.landing = j.value("landing", "");
    }
    return rec;
}

/// Canonical single-line serialization with a stable field order.
inline std::string to_jsonl(const EventRecord& rec) {
    nlohmann::ordered_json j;
    j["ts"] = rec.ts;
    j["kind"] = rec.kind == EventRecord::Kind::visit ? "visit" : "ad";
    if (rec.kind == EventRecord::Kind::visit) {
        if (!rec.url.empty()) j["url"] = rec.url;
        if (rec.category) {
            j["category"] = *rec.category;
        } else if (rec.category_name) {
            j["category"] = *rec.category_name;
        }
        j["tracked_by"] = rec.tracked_by;
    } else {
        j["selector"] = rec.selector;
        if (rec.category) {
            j["category"] = *rec.category;
        } else if (rec.category_name) {
            j["category"] = *rec.category_name;
        }
        if (!rec.landing.empty()) j["landing"] = rec.landing;
    }
    j["mode"] = rec.mode == VisitMode::normal ? "normal" : "incognito";
    return j.dump();
}

inline EventRecord event_from(const PageVisit& v) {
    EventRecord rec;
    rec.kind = EventRecord::Kind::visit;
    rec.ts = v.timestamp;
    rec.mode = v.mode;
    rec.category = v.category;
    rec.tracked_by.assign(v.tracked_by.begin(), v.tracked_by.end());
    return rec;
}

inline EventRecord event_from(const AdObservation& ad) {
    EventRecord rec;
    rec.kind = EventRecord::Kind::ad;
    rec.ts = ad.timestamp;
    rec.mode = ad.mode;
    rec.category = ad.category;
    rec.selector = ad.selector_id;
    rec.landing = ad.landing_domain;
    return rec;
}

/// Serializes a full simulation (visits and ads) into chronological JSONL.
inline std::string events_to_jsonl(const std::vector<PageVisit>& visits,
                                   const std::vector<GroundTruthAd>& ads) {
    std::string out;
    std::size_t next_ad = 0;
    for (std::size_t i = 0; i < visits.size(); ++i) {
        out += to_jsonl(event_from(visits[i]));
        out += '\n';
        for (; next_ad < ads.size() && ads[next_ad].visit_index == i; ++next_ad) {
            out += to_jsonl(event_from(ads[next_ad].ad));
            out += '\n';
        }
    }
    return out;
}

} // namespace adscope
