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
#include <optional>
#include <vector>

#include "adscope/errors.hpp"
#include "adscope/pmf.hpp"
#include "adscope/profiles.hpp"
#include "adscope/taxonomy.hpp"

namespace adscope {

/// Floor applied to the population profile before divergence
/// minimization, so zero-mass population categories cannot produce an
/// infinite divergence.
inline constexpr double kPopulationSmoothingEps = 1e-6;

/// Population-level aggregation results: the average interest profile
/// and the collection of per-selector minimum-uniqueness values it was
/// computed against.
struct PopulationStats {
    Pmf p_bar;
    std::vector<double> u_values;
};

struct UniquenessReport {
    double u_min = 0.0;                  // bits
    std::optional<double> percentile;    // absent when no population data
    Pmf attaining_p;
};

/// Kullback-Leibler divergence in bits: sum of p_i * log2(p_i / q_i) with
/// the 0 * log(0/x) = 0 convention. Throws when p puts mass where q has
/// none; callers smooth q first when that can happen.
inline double kl_divergence(const Pmf& p, const Pmf& q) {
    if (p.size() != q.size()) throw data_error("kl_divergence: dimension mismatch");
    double bits = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) throw data_error("kl_divergence: support violation");
        bits += p[i] * std::log2(p[i] / q[i]);
    }
    return bits;
}

/// Euclidean projection onto {p : p_min <= p <= p_max, sum p = 1}. The
/// projection has the form p_i = clamp(x_i - tau, p_min_i, p_max_i) for a
/// scalar shift tau; the sum is non-increasing and continuous in tau, so
/// bisection pins the shift where the sum hits one.
inline Pmf project_to_class(const std::vector<double>& x, const UncertaintyClass& u) {
    if (!check_feasible(u)) throw infeasible_error("project_to_class: infeasible class");
    const std::size_t n = u.size();
    if (x.size() != n) throw data_error("project_to_class: dimension mismatch");

    const auto shifted = [&](double tau, Pmf& out) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = std::clamp(x[i] - tau, u.p_min[i], u.p_max[i]);
            total += out[i];
        }
        return total;
    };

    double lo = x[0] - u.p_max[0], hi = x[0] - u.p_min[0];
    for (std::size_t i = 1; i < n; ++i) {
        lo = std::min(lo, x[i] - u.p_max[i]);
        hi = std::max(hi, x[i] - u.p_min[i]);
    }

    Pmf p(n);
    // At tau = lo the sum is sum(p_max) >= 1, at tau = hi it is
    // sum(p_min) <= 1; bisect between them.
    double total = shifted(lo, p);
    if (std::abs(total - 1.0) <= 1e-12) return p;
    total = shifted(hi, p);
    if (std::abs(total - 1.0) <= 1e-12) return p;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        total = shifted(mid, p);
        if (std::abs(total - 1.0) <= 1e-12) return p;
        if (total > 1.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return p; // interval collapsed below representable width; p is as close as doubles allow
}

/// Percentile of u within a population of historical values:
/// 100 * (count strictly less than u) / size. Absent for an empty
/// population ("percentile unavailable").
inline std::optional<double> percentile(double u, const std::vector<double>& population) {
    if (population.empty()) return std::nullopt;
    std::size_t less = 0;
    for (double v : population) {
        if (v < u) ++less;
    }
    return 100.0 * static_cast<double>(less) / static_cast<double>(population.size());
}

/// Minimum uniqueness: the smallest divergence (bits) between any profile
/// in the class and the population profile. D(p || p_bar) is convex in p
/// and the class is a polytope, so projected gradient descent with a
/// backtracking line search reaches the global minimum; it starts from
/// the projection of p_bar (always feasible) and stops when an accepted
/// step decreases the objective by less than 1e-9 or the budget is spent.
/// The iterate sequence is monotonically non-increasing in objective.
inline UniquenessReport min_uniqueness(const UncertaintyClass& u, const Pmf& p_bar,
                                       std::chrono::duration<double> budget =
                                           std::chrono::duration<double>(0.5),
                                       const std::vector<double>& u_values = {}) {
    if (!check_feasible(u)) throw infeasible_error("min_uniqueness: infeasible class");
    if (p_bar.size() != u.size()) throw data_error("min_uniqueness: dimension mismatch");
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration_cast<std::chrono::steady_clock::duration>(budget);
    const std::size_t n = u.size();
    const Pmf ref = smooth_pmf(p_bar, kPopulationSmoothingEps);
    constexpr double kInvLn2 = 1.4426950408889634; // 1 / ln 2

    const auto objective = [&](const Pmf& p) { return kl_divergence(p, ref); };
    const auto gradient = [&](const Pmf& p, std::vector<double>& g) {
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = std::log2(std::max(p[i], 1e-18) / ref[i]) + kInvLn2;
        }
    };

    Pmf p = project_to_class(ref, u);
    double f = objective(p);
    std::vector<double> g(n), trial(n);
    double step = 1.0;

    for (int iter = 0; iter < 100000; ++iter) {
        if (std::chrono::steady_clock::now() > deadline) break;
        gradient(p, g);

        // Backtracking along the projection arc with an Armijo test.
        bool accepted = false;
        double f_next = f;
        Pmf p_next;
        for (double eta = step; eta >= 1e-14; eta *= 0.5) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = p[i] - eta * g[i];
            Pmf candidate = project_to_class(trial, u);
            double directional = 0.0;
            for (std::size_t i = 0; i < n; ++i) directional += g[i] * (candidate[i] - p[i]);
            const double f_cand = objective(candidate);
            if (f_cand <= f + 1e-4 * directional) {
                p_next = std::move(candidate);
                f_next = f_cand;
                step = eta * 2.0;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;

        const double decrease = f - f_next;
        p = std::move(p_next);
        f = f_next;
        if (decrease < 1e-9) break;
    }

    UniquenessReport report;
    report.u_min = std::max(f, 0.0);
    report.attaining_p = std::move(p);
    report.percentile = percentile(report.u_min, u_values);
    return report;
}

/// Outer top-level box for a bottom-level class: each top bound is the
/// sum of its children's bounds (upper bounds capped at one). The result
/// contains the true image of the class under aggregation, so minimizing
/// over it is conservative (never overstates uniqueness).
inline UncertaintyClass project_class_to_top(const UncertaintyClass& u, const Taxonomy& t) {
    if (u.size() != t.bottom_count()) {
        throw data_error("project_class_to_top: dimension mismatch");
    }
    UncertaintyClass out;
    out.p_min.assign(t.top_count(), 0.0);
    out.p_max.assign(t.top_count(), 0.0);
    out.samples_seen = u.samples_seen;
    for (std::size_t j = 0; j < u.size(); ++j) {
        out.p_min[t.parent(j)] += u.p_min[j];
        out.p_max[t.parent(j)] += u.p_max[j];
    }
    for (double& v : out.p_max) v = std::min(v, 1.0);
    return out;
}

} // namespace adscope
