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
#include <numeric>
#include <vector>

#include "adscope/errors.hpp"
#include "adscope/lp.hpp"
#include "adscope/pmf.hpp"
#include "adscope/profiles.hpp"
#include "adscope/rng.hpp"

namespace adscope {

enum class AdClass { InterestBased, NonInterestBased };

/// Randomized detection rule: d_tilde[j] is the probability of declaring
/// an ad in category j interest-based. zeta is the certified worst-case
/// detection probability; (lambda, mu, nu) certify optimality of the
/// inner worst-case profile problem.
struct DetectorRule {
    std::vector<double> d_tilde;
    double zeta = 0.0;
    std::vector<double> lambda;
    std::vector<double> mu;
    double nu = 0.0;

    double worst_case_error() const { return 1.0 - zeta; }
};

/// 2x2 decision-given-hypothesis matrix; columns index the true
/// hypothesis (interest-based, non-interest-based) and sum to one.
struct PerformanceMatrix {
    double m[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
};

struct WorstCaseReport {
    double p1_w = 0.0;        // worst over the class: miss probability
    double p2 = 0.0;          // false-alarm probability under q
    double minimax_error = 0.0;
};

/// Exact linear optimization of c.p over the class: start every
/// coordinate at its lower bound and spend the remaining mass on the
/// best coordinates first (largest c when maximizing, smallest when
/// minimizing), capping each at its upper bound. Greedy is exact here
/// because the feasible set is a permutation-symmetric transportation
/// polytope. Ties break toward the smaller index, so results are
/// deterministic. Returns the optimum and an attaining distribution.
enum class OptSense { min, max };

inline std::pair<double, Pmf> linear_opt_over_class(const std::vector<double>& c,
                                                    const UncertaintyClass& u, OptSense sense) {
    if (!check_feasible(u)) throw infeasible_error("linear_opt_over_class: infeasible class");
    const std::size_t n = u.size();
    if (c.size() != n) throw data_error("linear_opt_over_class: dimension mismatch");

    Pmf p = u.p_min;
    double budget = 1.0 - sum(p);
    if (budget < 0.0) budget = 0.0; // within check_feasible's tolerance

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (c[a] != c[b]) return sense == OptSense::max ? c[a] > c[b] : c[a] < c[b];
        return a < b;
    });

    for (std::size_t idx : order) {
        if (budget <= 0.0) break;
        const double room = u.p_max[idx] - u.p_min[idx];
        const double add = std::min(room, budget);
        p[idx] += add;
        budget -= add;
    }
    return {dot(c, p), p};
}

/// Assembles the robust minimax detection LP over the variables
/// (zeta, d_tilde, lambda, mu, nu), in that order:
///   maximize zeta
///   s.t. mu.p_min - lambda.p_max + nu >= zeta     (worst-case detection)
///        1 - d_tilde.q >= zeta                    (false-alarm side)
///        mu - lambda + nu <= d_tilde componentwise
///        0 <= d_tilde <= 1, lambda >= 0, mu >= 0, nu free
/// The first group is the dual of min over the class of d_tilde.p, so a
/// feasible (lambda, mu, nu) certifies the worst-case detection level.
inline LpProblem build_minimax_lp(const UncertaintyClass& u, const Pmf& q) {
    if (!check_feasible(u)) throw infeasible_error("build_minimax_lp: infeasible class");
    const std::size_t n = u.size();
    validate_pmf(q, "build_minimax_lp: q");
    if (q.size() != n) throw data_error("build_minimax_lp: dimension mismatch");

    const std::size_t zeta = 0;
    const auto d = [&](std::size_t j) { return 1 + j; };
    const auto lam = [&](std::size_t j) { return 1 + n + j; };
    const auto mu = [&](std::size_t j) { return 1 + 2 * n + j; };
    const std::size_t nu = 1 + 3 * n;

    LpProblem lp;
    lp.num_vars = 3 * n + 2;
    lp.objective.assign(lp.num_vars, 0.0);
    lp.objective[zeta] = 1.0;
    lp.lower.assign(lp.num_vars, 0.0);
    lp.upper.assign(lp.num_vars, kLpInfinity);
    // The half-half rule reaches zeta = 0.5, so the zero lower bound on
    // zeta is never active at the optimum.
    for (std::size_t j = 0; j < n; ++j) lp.upper[d(j)] = 1.0;
    lp.lower[nu] = -kLpInfinity;

    std::vector<double> row(lp.num_vars, 0.0);

    // zeta - mu.p_min + lambda.p_max - nu <= 0
    row[zeta] = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        row[mu(j)] = -u.p_min[j];
        row[lam(j)] = u.p_max[j];
    }
    row[nu] = -1.0;
    lp.add_row(row, 0.0);

    // zeta + d_tilde.q <= 1
    std::fill(row.begin(), row.end(), 0.0);
    row[zeta] = 1.0;
    for (std::size_t j = 0; j < n; ++j) row[d(j)] = q[j];
    lp.add_row(row, 1.0);

    // mu_j - lambda_j + nu - d_tilde_j <= 0
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(row.begin(), row.end(), 0.0);
        row[mu(j)] = 1.0;
        row[lam(j)] = -1.0;
        row[nu] = 1.0;
        row[d(j)] = -1.0;
        lp.add_row(row, 0.0);
    }
    return lp;
}

namespace detail {

/// Maximum violation of the minimax LP constraints and bounds by a rule.
inline double minimax_residual(const DetectorRule& r, const UncertaintyClass& u, const Pmf& q) {
    const std::size_t n = u.size();
    double res = 0.0;
    double row_a = r.zeta - r.nu;
    for (std::size_t j = 0; j < n; ++j) {
        row_a += r.lambda[j] * u.p_max[j] - r.mu[j] * u.p_min[j];
    }
    res = std::max(res, row_a);
    res = std::max(res, r.zeta + dot(r.d_tilde, q) - 1.0);
    for (std::size_t j = 0; j < n; ++j) {
        res = std::max(res, r.mu[j] - r.lambda[j] + r.nu - r.d_tilde[j]);
        res = std::max(res, -r.d_tilde[j]);
        res = std::max(res, r.d_tilde[j] - 1.0);
        res = std::max(res, -r.lambda[j]);
        res = std::max(res, -r.mu[j]);
    }
    return res;
}

} // namespace detail

/// Solves the robust minimax detection problem. The returned rule is
/// verified two ways before being handed back: primal residuals of the LP
/// must be at most 1e-8, and the LP value must agree to 1e-6 with an
/// independent evaluation of the rule, min(worst-case detection via exact
/// greedy, 1 - d_tilde.q). Throws budget_exceeded when the time budget
/// runs out (reported upstream as an undecidable outcome).
inline DetectorRule solve_minimax(const UncertaintyClass& u, const Pmf& q,
                                  std::chrono::duration<double> budget =
                                      std::chrono::duration<double>(0.5)) {
    const LpProblem lp = build_minimax_lp(u, q);
    const LpSolution sol = solve_lp(lp, budget);
    if (sol.status != LpStatus::optimal) {
        throw infeasible_error("solve_minimax: LP not solvable for a feasible class");
    }
    const std::size_t n = u.size();
    DetectorRule rule;
    rule.zeta = sol.x[0];
    rule.d_tilde.assign(sol.x.begin() + 1, sol.x.begin() + 1 + n);
    rule.lambda.assign(sol.x.begin() + 1 + n, sol.x.begin() + 1 + 2 * n);
    rule.mu.assign(sol.x.begin() + 1 + 2 * n, sol.x.begin() + 1 + 3 * n);
    rule.nu = sol.x[1 + 3 * n];
    // Scrub bound-level roundoff; the residual check below sees the
    // scrubbed values, i.e. exactly what callers receive.
    for (std::size_t j = 0; j < n; ++j) {
        rule.d_tilde[j] = std::clamp(rule.d_tilde[j], 0.0, 1.0);
        rule.lambda[j] = std::max(rule.lambda[j], 0.0);
        rule.mu[j] = std::max(rule.mu[j], 0.0);
    }

    const double residual = detail::minimax_residual(rule, u, q);
    const double detect_worst = linear_opt_over_class(rule.d_tilde, u, OptSense::min).first;
    const double certified = std::min(detect_worst, 1.0 - dot(rule.d_tilde, q));
    if (residual > 1e-8 || std::abs(rule.zeta - certified) > 1e-6) {
        throw std::runtime_error("solve_minimax: optimality certificate failed");
    }
    return rule;
}

/// Worst-case performance of a rule over the class: p1_w is the largest
/// miss probability any profile in the class can induce; p2 is the
/// false-alarm probability, which does not depend on the class.
inline WorstCaseReport worst_case_report(const DetectorRule& rule, const UncertaintyClass& u,
                                         const Pmf& q) {
    WorstCaseReport report;
    report.p1_w = 1.0 - linear_opt_over_class(rule.d_tilde, u, OptSense::min).first;
    report.p2 = dot(rule.d_tilde, q);
    report.minimax_error = std::max(report.p1_w, report.p2);
    return report;
}

/// Decision-given-hypothesis matrix for a rule against a specific pair of
/// distributions (p column first).
inline PerformanceMatrix performance_matrix(const DetectorRule& rule, const Pmf& p, const Pmf& q) {
    PerformanceMatrix pm;
    const double detect_p = dot(rule.d_tilde, p);
    const double detect_q = dot(rule.d_tilde, q);
    pm.m[0][0] = detect_p;
    pm.m[1][0] = 1.0 - detect_p;
    pm.m[0][1] = detect_q;
    pm.m[1][1] = 1.0 - detect_q;
    return pm;
}

/// Randomized per-ad decision: declares interest-based with probability
/// d_tilde of the ad's category. Deterministic for a fixed rng state.
inline AdClass classify_ad(const DetectorRule& rule, std::size_t category, Rng& rng) {
    if (category >= rule.d_tilde.size()) throw data_error("classify_ad: category out of range");
    return rng.bernoulli(rule.d_tilde[category]) ? AdClass::InterestBased
                                                 : AdClass::NonInterestBased;
}

} // namespace adscope
