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
#include <cstddef>
#include <deque>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "adscope/errors.hpp"
#include "adscope/pmf.hpp"

namespace adscope {

enum class Scenario { baseline, paranoid };

enum class VisitMode { normal, incognito };

inline const char* to_string(Scenario s) {
    return s == Scenario::baseline ? "baseline" : "paranoid";
}

inline Scenario scenario_from_string(const std::string& s) {
    if (s == "baseline") return Scenario::baseline;
    if (s == "paranoid") return Scenario::paranoid;
    throw data_error("unknown scenario '" + s + "' (expected baseline or paranoid)");
}

/// One page load. tracked_by lists the ad selectors present on the page.
/// Incognito visits never extend any selector's observed clickstream.
struct PageVisit {
    long long timestamp = 0;
    std::size_t category = 0;
    std::set<std::string> tracked_by;
    VisitMode mode = VisitMode::normal;
};

/// One ad impression attributed to a selector. A missing category removes
/// the observation from all estimation (it is tallied as undecidable
/// downstream).
struct AdObservation {
    long long timestamp = 0;
    std::string selector_id;
    std::optional<std::size_t> category;
    std::string landing_domain;
    VisitMode mode = VisitMode::normal;
};

/// Estimation window parameters: an interest profile needs at least w_min
/// pages, windows never exceed the most recent w_max pages, and a
/// rho-fraction of visits produce incognito ad observations.
struct WindowConfig {
    std::size_t w_min = 87;
    std::size_t w_max = 3915;
    double rho = 0.25;
};

/// Componentwise profile bounds: the polytope of every distribution lying
/// between p_min and p_max and summing to one. Tracks how many window
/// estimates have been folded in.
struct UncertaintyClass {
    Pmf p_min;
    Pmf p_max;
    std::size_t samples_seen = 0;

    std::size_t size() const { return p_min.size(); }
    bool initialized() const { return samples_seen > 0; }
};

/// A class containing exactly one distribution; useful for tests and for
/// collapsing the robust problem to the classic two-hypothesis one.
inline UncertaintyClass singleton_class(const Pmf& p) {
    return UncertaintyClass{p, p, 1};
}

/// True iff the class can contain at least one distribution: bounds are
/// ordered and the sum constraints bracket one.
inline bool check_feasible(const UncertaintyClass& u) {
    if (u.p_min.size() != u.p_max.size() || u.p_min.empty()) return false;
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < u.p_min.size(); ++i) {
        if (u.p_min[i] > u.p_max[i]) return false;
        lo += u.p_min[i];
        hi += u.p_max[i];
    }
    return lo <= 1.0 + 1e-9 && hi >= 1.0 - 1e-9;
}

/// Everything the detector tracks about one ad selector: the clickstream
/// it could observe, the uncertainty class built from window estimates of
/// that stream, and the estimate of its non-interest ad distribution from
/// incognito observations. Single writer per instance.
class SelectorState {
public:
    SelectorState() = default;
    SelectorState(std::string selector_id, std::size_t n)
        : selector_id_(std::move(selector_id)),
          n_(n),
          click_counts_(n, 0),
          q_counts_(n, 0) {}

    const std::string& selector_id() const { return selector_id_; }
    std::size_t dimension() const { return n_; }
    const std::deque<std::size_t>& clickstream() const { return clickstream_; }
    const std::deque<std::size_t>& q_window() const { return q_window_; }
    const UncertaintyClass& uclass() const { return uclass_; }
    const std::optional<Pmf>& q_hat() const { return q_hat_; }

    /// Window estimate over the currently retained clickstream.
    Pmf window_mle() const { return ml_estimate(click_counts_); }

    void append_click(std::size_t category, const WindowConfig& cfg) {
        if (category >= n_) throw data_error("observe_visit: category out of range");
        clickstream_.push_back(category);
        ++click_counts_[category];
        if (clickstream_.size() > cfg.w_max) {
            --click_counts_[clickstream_.front()];
            clickstream_.pop_front();
        }
        if (clickstream_.size() >= cfg.w_min) fold_window_estimate();
    }

    void append_incognito(std::size_t category, const WindowConfig& cfg) {
        if (category >= n_) throw data_error("observe_incognito_ad: category out of range");
        q_window_.push_back(category);
        ++q_counts_[category];
        if (q_window_.size() > cfg.w_max) {
            --q_counts_[q_window_.front()];
            q_window_.pop_front();
        }
        if (q_window_.size() >= cfg.w_min) q_hat_ = ml_estimate(q_counts_);
    }

    /// Restores persisted state; replays counts from the stored windows.
    void restore(std::deque<std::size_t> clickstream, std::deque<std::size_t> q_window,
                 UncertaintyClass uclass, std::optional<Pmf> q_hat) {
        clickstream_ = std::move(clickstream);
        q_window_ = std::move(q_window);
        uclass_ = std::move(uclass);
        q_hat_ = std::move(q_hat);
        std::fill(click_counts_.begin(), click_counts_.end(), 0);
        std::fill(q_counts_.begin(), q_counts_.end(), 0);
        for (std::size_t c : clickstream_) ++click_counts_.at(c);
        for (std::size_t c : q_window_) ++q_counts_.at(c);
    }

private:
    /// Folds the current window MLE into the running componentwise bounds.
    /// Every retained window estimate lies inside [p_min, p_max], so the
    /// class always contains at least one distribution.
    void fold_window_estimate() {
        const Pmf mle = window_mle();
        if (uclass_.samples_seen == 0) {
            uclass_.p_min = mle;
            uclass_.p_max = mle;
        } else {
            for (std::size_t i = 0; i < n_; ++i) {
                uclass_.p_min[i] = std::min(uclass_.p_min[i], mle[i]);
                uclass_.p_max[i] = std::max(uclass_.p_max[i], mle[i]);
            }
        }
        ++uclass_.samples_seen;
    }

    std::string selector_id_;
    std::size_t n_ = 0;
    std::deque<std::size_t> clickstream_;
    std::deque<std::size_t> q_window_;
    std::vector<long long> click_counts_;
    std::vector<long long> q_counts_;
    UncertaintyClass uclass_;
    std::optional<Pmf> q_hat_;
};

/// Feeds one normal-mode page visit into a selector's state. In the
/// baseline scenario the visit counts only if the selector tracks the
/// page; in the paranoid scenario every visit counts (ubiquitous
/// tracking). Once the stream reaches w_min pages, each arrival folds the
/// window estimate into the uncertainty class.
inline void observe_visit(SelectorState& state, const PageVisit& visit, const WindowConfig& cfg,
                          Scenario scenario) {
    if (visit.mode != VisitMode::normal) {
        throw std::invalid_argument("observe_visit: incognito visits never extend clickstreams");
    }
    if (scenario == Scenario::baseline && visit.tracked_by.count(state.selector_id()) == 0) {
        return;
    }
    state.append_click(visit.category, cfg);
}

/// Feeds one incognito ad observation into the selector's non-interest
/// distribution estimate. The estimate exists once w_min categorized
/// observations have arrived and always covers the most recent w_max.
inline void observe_incognito_ad(SelectorState& state, const AdObservation& ad,
                                 const WindowConfig& cfg) {
    if (ad.mode != VisitMode::incognito) {
        throw std::invalid_argument("observe_incognito_ad: ad is not an incognito observation");
    }
    if (ad.selector_id != state.selector_id()) {
        throw std::invalid_argument("observe_incognito_ad: selector mismatch");
    }
    if (!ad.category) {
        throw std::invalid_argument("observe_incognito_ad: category required");
    }
    state.append_incognito(*ad.category, cfg);
}

} // namespace adscope
