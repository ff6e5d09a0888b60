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
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adscope/detector.hpp"
#include "adscope/errors.hpp"
#include "adscope/pmf.hpp"
#include "adscope/profiles.hpp"
#include "adscope/rng.hpp"

namespace adscope {

/// Minimum mass any category keeps in a generated ground-truth q;
/// strictly positive q avoids support pathologies in divergence-based
/// diagnostics.
inline constexpr double kGroundTruthQFloor = 1e-4;

struct SelectorSpec {
    std::string id;
    double coverage = 1.0; // probability a visit is tracked by this selector
    double alpha = 0.5;    // probability an ad is interest-based
    double ad_rate = 1.0;  // ads per visit (fractional part served probabilistically)
};

struct ScenarioConfig {
    std::size_t n = 0;
    Pmf t; // the user's actual interest profile
    std::vector<SelectorSpec> selectors;
    Scenario scenario = Scenario::baseline;
    double rho = 0.25; // fraction of visits revisited incognito
    std::size_t stream_length = 0;
    std::uint64_t seed = 0;
    WindowConfig window;
    /// Optional fixed non-interest distribution for every selector,
    /// replacing the random draw. Degenerate setups (q equal to t,
    /// disjoint supports) need this control.
    std::optional<Pmf> q_override;

    void validate() const {
        validate_pmf(t, "scenario t");
        if (t.size() != n) throw data_error("scenario: t dimension != n");
        if (rho < 0.0 || rho > 1.0) throw data_error("scenario: rho outside [0,1]");
        if (stream_length < window.w_min) {
            throw data_error("scenario: stream_length below w_min");
        }
        if (selectors.empty()) throw data_error("scenario: no selectors");
        for (const SelectorSpec& s : selectors) {
            if (s.id.empty()) throw data_error("scenario: selector with empty id");
            if (s.coverage < 0.0 || s.coverage > 1.0) {
                throw data_error("scenario: coverage outside [0,1] for " + s.id);
            }
            if (s.alpha < 0.0 || s.alpha > 1.0) {
                throw data_error("scenario: alpha outside [0,1] for " + s.id);
            }
            if (s.ad_rate < 0.0) throw data_error("scenario: negative ad_rate for " + s.id);
        }
        if (q_override) {
            validate_pmf(*q_override, "scenario q_override");
            if (q_override->size() != n) throw data_error("scenario: q_override dimension != n");
        }
    }
};

/// An ad impression together with the label the detector is later judged
/// against. The label is fixed at generation time.
struct GroundTruthAd {
    AdObservation ad;
    AdClass true_class = AdClass::NonInterestBased;
    std::size_t visit_index = 0;
};

struct SelectorOutcome {
    std::string id;
    Pmf q_truth;
    bool rule_available = false;
    DetectorRule rule;
    double p1_w = 0.0;
    double p2 = 0.0;
    double predicted_minimax_error = 0.0;
    // Confusion over classified normal-mode ads.
    std::size_t truth_interest_total = 0;
    std::size_t truth_noninterest_total = 0;
    std::size_t false_negatives = 0;
    std::size_t false_positives = 0;
    std::size_t declared_interest = 0;
    std::size_t declared_noninterest = 0;
    std::size_t undecidable = 0; // ads that could not be classified
    double fn_rate = 0.0;
    double fp_rate = 0.0;
};

struct ExperimentReport {
    std::vector<SelectorOutcome> selectors;
    // confusion[decision][truth], indices: 0 = interest, 1 = non-interest.
    std::size_t confusion[2][2] = {{0, 0}, {0, 0}};
    std::size_t total_ads = 0;
    std::size_t total_undecidable = 0;
};

/// Synthesizes the visit stream: categories i.i.d. from the actual
/// profile t, and each selector independently present on (tracking) each
/// page with its coverage probability. Timestamps are the 1-based visit
/// index. Deterministic given the rng state.
inline std::vector<PageVisit> generate_clickstream(const ScenarioConfig& cfg, Rng& rng) {
    std::vector<PageVisit> visits;
    visits.reserve(cfg.stream_length);
    for (std::size_t i = 0; i < cfg.stream_length; ++i) {
        PageVisit v;
        v.timestamp = static_cast<long long>(i + 1);
        v.category = rng.categorical(cfg.t);
        v.mode = VisitMode::normal;
        for (const SelectorSpec& s : cfg.selectors) {
            if (rng.bernoulli(s.coverage)) v.tracked_by.insert(s.id);
        }
        visits.push_back(std::move(v));
    }
    return visits;
}

/// Ground-truth non-interest ad distribution for one selector: a
/// symmetric draw over the simplex (i.i.d. exponentials, normalized),
/// floored and renormalized so every category keeps positive mass. The
/// override replaces the draw but is floored the same way.
inline Pmf generate_ground_truth_q(const ScenarioConfig& cfg, const SelectorSpec& selector,
                                   Rng& rng) {
    (void)selector;
    Pmf q(cfg.n);
    if (cfg.q_override) {
        q = *cfg.q_override;
    } else {
        double total = 0.0;
        for (std::size_t i = 0; i < cfg.n; ++i) {
            q[i] = -std::log(1.0 - rng.next_double());
            total += q[i];
        }
        for (double& v : q) v /= total;
    }
    double total = 0.0;
    for (double& v : q) {
        v = std::max(v, kGroundTruthQFloor);
        total += v;
    }
    for (double& v : q) v /= total;
    return q;
}

namespace detail {

inline std::size_t draw_ad_count(double ad_rate, Rng& rng) {
    std::size_t count = static_cast<std::size_t>(std::floor(ad_rate));
    const double frac = ad_rate - std::floor(ad_rate);
    if (frac > 0.0 && rng.bernoulli(frac)) ++count;
    return count;
}

inline std::string landing_for(std::size_t category) {
    return "adv-" + std::to_string(category) + ".example";
}

} // namespace detail

/// Serves ads for every visit: each selector serves ad_rate ads per page
/// (ad slots can route to any selector), switching per ad between its
/// interest-based source and its non-interest source with probability
/// alpha. Interest categories come from the selector's own running
/// estimate of the user (its observed-clickstream MLE) in the baseline
/// scenario and from t under paranoid assumptions; before a selector has
/// tracked anything it falls back to t. A rho-fraction of visits are
/// additionally revisited incognito, emitting ads drawn purely from
/// ground-truth q. Also returns each selector's q via out_q when
/// requested.
inline std::vector<GroundTruthAd> serve_ads(const ScenarioConfig& cfg,
                                            const std::vector<PageVisit>& visits, Rng& rng,
                                            std::vector<Pmf>* out_q = nullptr) {
    const std::size_t num_selectors = cfg.selectors.size();
    std::vector<Pmf> q(num_selectors);
    for (std::size_t s = 0; s < num_selectors; ++s) {
        q[s] = generate_ground_truth_q(cfg, cfg.selectors[s], rng);
    }

    // The ad selectors' own view of the user: windowed category counts
    // over the visits each one tracked (baseline only; paranoid serves
    // straight from t).
    std::vector<SelectorState> observed;
    observed.reserve(num_selectors);
    for (const SelectorSpec& s : cfg.selectors) observed.emplace_back(s.id, cfg.n);

    std::vector<GroundTruthAd> ads;
    for (std::size_t i = 0; i < visits.size(); ++i) {
        const PageVisit& visit = visits[i];
        if (cfg.scenario == Scenario::baseline) {
            for (std::size_t s = 0; s < num_selectors; ++s) {
                if (visit.tracked_by.count(cfg.selectors[s].id) > 0) {
                    observed[s].append_click(visit.category, cfg.window);
                }
            }
        }

        for (std::size_t s = 0; s < num_selectors; ++s) {
            const SelectorSpec& spec = cfg.selectors[s];
            const std::size_t count = detail::draw_ad_count(spec.ad_rate, rng);
            for (std::size_t k = 0; k < count; ++k) {
                GroundTruthAd ad;
                ad.visit_index = i;
                ad.ad.timestamp = visit.timestamp;
                ad.ad.selector_id = spec.id;
                ad.ad.mode = VisitMode::normal;
                if (rng.bernoulli(spec.alpha)) {
                    ad.true_class = AdClass::InterestBased;
                    if (cfg.scenario == Scenario::baseline && !observed[s].clickstream().empty()) {
                        ad.ad.category = rng.categorical(observed[s].window_mle());
                    } else {
                        ad.ad.category = rng.categorical(cfg.t);
                    }
                } else {
                    ad.true_class = AdClass::NonInterestBased;
                    ad.ad.category = rng.categorical(q[s]);
                }
                ad.ad.landing_domain = detail::landing_for(*ad.ad.category);
                ads.push_back(std::move(ad));
            }
        }

        if (cfg.rho > 0.0 && rng.bernoulli(cfg.rho)) {
            for (std::size_t s = 0; s < num_selectors; ++s) {
                const SelectorSpec& spec = cfg.selectors[s];
                const std::size_t count = detail::draw_ad_count(spec.ad_rate, rng);
                for (std::size_t k = 0; k < count; ++k) {
                    GroundTruthAd ad;
                    ad.visit_index = i;
                    ad.ad.timestamp = visit.timestamp;
                    ad.ad.selector_id = spec.id;
                    ad.ad.mode = VisitMode::incognito;
                    ad.ad.category = rng.categorical(q[s]);
                    ad.ad.landing_domain = detail::landing_for(*ad.ad.category);
                    ad.true_class = AdClass::NonInterestBased;
                    ads.push_back(std::move(ad));
                }
            }
        }
    }
    if (out_q != nullptr) *out_q = std::move(q);
    return ads;
}

/// Full pipeline on synthetic data: generate, observe, solve, classify,
/// compare against ground truth. Normal-mode ads are classified with each
/// selector's final rule, but only those served once the observer had
/// both a profile window and a q estimate (earlier ads are undecidable,
/// matching the online behavior of having no rule yet). Incognito ads
/// train the q estimate and are excluded from the error rates. A solver
/// budget overrun downgrades the selector to all-undecidable rather than
/// failing the experiment.
inline ExperimentReport run_experiment(const ScenarioConfig& cfg,
                                       std::chrono::duration<double> solve_budget =
                                           std::chrono::duration<double>(0.5),
                                       std::vector<PageVisit>* out_visits = nullptr,
                                       std::vector<GroundTruthAd>* out_ads = nullptr) {
    cfg.validate();
    Rng rng(cfg.seed);
    const std::vector<PageVisit> visits = generate_clickstream(cfg, rng);
    std::vector<Pmf> q_truth;
    std::vector<GroundTruthAd> ads = serve_ads(cfg, visits, rng, &q_truth);

    const std::size_t num_selectors = cfg.selectors.size();
    std::vector<SelectorState> states;
    states.reserve(num_selectors);
    for (const SelectorSpec& s : cfg.selectors) states.emplace_back(s.id, cfg.n);

    // Chronological replay: visits advance profile windows, incognito ads
    // advance q windows, and each normal ad records whether a rule could
    // have existed when it was served.
    std::vector<char> ready(ads.size(), 0);
    {
        std::size_t next_ad = 0;
        for (std::size_t i = 0; i < visits.size(); ++i) {
            for (std::size_t s = 0; s < num_selectors; ++s) {
                observe_visit(states[s], visits[i], cfg.window, cfg.scenario);
            }
            for (; next_ad < ads.size() && ads[next_ad].visit_index == i; ++next_ad) {
                GroundTruthAd& gta = ads[next_ad];
                const std::size_t s = static_cast<std::size_t>(
                    std::find_if(cfg.selectors.begin(), cfg.selectors.end(),
                                 [&](const SelectorSpec& spec) {
                                     return spec.id == gta.ad.selector_id;
                                 }) -
                    cfg.selectors.begin());
                if (gta.ad.mode == VisitMode::incognito) {
                    observe_incognito_ad(states[s], gta.ad, cfg.window);
                } else {
                    ready[next_ad] = states[s].clickstream().size() >= cfg.window.w_min &&
                                             states[s].q_hat().has_value()
                                         ? 1
                                         : 0;
                }
            }
        }
    }

    ExperimentReport report;
    report.selectors.resize(num_selectors);
    std::vector<bool> has_rule(num_selectors, false);
    std::vector<DetectorRule> rules(num_selectors);
    for (std::size_t s = 0; s < num_selectors; ++s) {
        SelectorOutcome& out = report.selectors[s];
        out.id = cfg.selectors[s].id;
        out.q_truth = q_truth[s];
        const SelectorState& st = states[s];
        if (st.uclass().initialized() && st.q_hat() && check_feasible(st.uclass())) {
            try {
                rules[s] = solve_minimax(st.uclass(), *st.q_hat(), solve_budget);
                has_rule[s] = true;
                const WorstCaseReport wc = worst_case_report(rules[s], st.uclass(), *st.q_hat());
                out.rule_available = true;
                out.rule = rules[s];
                out.p1_w = wc.p1_w;
                out.p2 = wc.p2;
                out.predicted_minimax_error = wc.minimax_error;
            } catch (const budget_exceeded&) {
                // Reported below as undecidable ads.
            }
        }
    }

    for (std::size_t a = 0; a < ads.size(); ++a) {
        const GroundTruthAd& gta = ads[a];
        if (gta.ad.mode == VisitMode::incognito) continue;
        std::size_t s = 0;
        while (cfg.selectors[s].id != gta.ad.selector_id) ++s;
        SelectorOutcome& out = report.selectors[s];
        ++report.total_ads;
        if (!has_rule[s] || !ready[a] || !gta.ad.category) {
            ++out.undecidable;
            ++report.total_undecidable;
            continue;
        }
        const AdClass decision = classify_ad(rules[s], *gta.ad.category, rng);
        const int d = decision == AdClass::InterestBased ? 0 : 1;
        const int t = gta.true_class == AdClass::InterestBased ? 0 : 1;
        ++report.confusion[d][t];
        if (decision == AdClass::InterestBased) {
            ++out.declared_interest;
        } else {
            ++out.declared_noninterest;
        }
        if (t == 0) {
            ++out.truth_interest_total;
            if (d == 1) ++out.false_negatives;
        } else {
            ++out.truth_noninterest_total;
            if (d == 0) ++out.false_positives;
        }
    }

    for (SelectorOutcome& out : report.selectors) {
        if (out.truth_interest_total > 0) {
            out.fn_rate = static_cast<double>(out.false_negatives) /
                          static_cast<double>(out.truth_interest_total);
        }
        if (out.truth_noninterest_total > 0) {
            out.fp_rate = static_cast<double>(out.false_positives) /
                          static_cast<double>(out.truth_noninterest_total);
        }
    }
    if (out_visits != nullptr) *out_visits = visits;
    if (out_ads != nullptr) *out_ads = std::move(ads);
    return report;
}

} // namespace adscope
