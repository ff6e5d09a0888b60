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

#include <cassert>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "adscope/errors.hpp"

namespace adscope {

inline constexpr double kLpInfinity = std::numeric_limits<double>::infinity();

/// A dense linear program:
///   maximize objective . x
///   subject to rows[i] . x <= rhs[i] for every row
///              lower <= x <= upper componentwise
/// Bounds may be -inf/+inf. Equality rows are expressed as two opposing
/// inequalities by the caller; the problem family solved here needs none.
struct LpProblem {
    std::size_t num_vars = 0;
    std::vector<double> objective;
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    std::vector<double> lower;
    std::vector<double> upper;

    void add_row(std::vector<double> coeffs, double bound) {
        assert(coeffs.size() == num_vars);
        rows.push_back(std::move(coeffs));
        rhs.push_back(bound);
    }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    double objective = 0.0;
    std::vector<double> x;
    std::size_t iterations = 0;
};

namespace detail {

/// Dense two-phase tableau simplex over 0 <= y <= cap variables (caps may
/// be infinite). Upper bounds are handled implicitly: a nonbasic variable
/// rests at either bound and the right-hand-side column always stores the
/// true values of the basic variables. Pricing is steepest-coefficient
/// with smallest-index tie-breaking; after a run of degenerate pivots the
/// solver switches to Bland's rule outright, which cannot cycle (bound
/// flips always strictly improve), so termination is guaranteed. Fully
/// deterministic.
class SimplexTableau {
public:
    SimplexTableau(std::size_t num_rows, std::size_t num_cols)
        : m_(num_rows), n_(num_cols), width_(num_cols + 1), tab_(num_rows * (num_cols + 1), 0.0),
          obj_(num_cols, 0.0), cap_(num_cols, kLpInfinity), basis_(num_rows, 0),
          at_upper_(num_cols, false), scratch_(num_rows, 0.0) {}

    double* row(std::size_t i) { return tab_.data() + i * width_; }
    const double* row(std::size_t i) const { return tab_.data() + i * width_; }
    double& at(std::size_t i, std::size_t j) { return tab_[i * width_ + j]; }
    double& rhs(std::size_t i) { return tab_[i * width_ + n_]; }
    std::vector<double>& caps() { return cap_; }
    bool nonbasic_at_upper(std::size_t j) const { return at_upper_[j]; }
    std::vector<std::size_t>& basis() { return basis_; }
    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }

    /// Value of column j in the current basic solution.
    double value(std::size_t j) const {
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] == j) return std::max(tab_[i * width_ + n_], 0.0);
        }
        return at_upper_[j] ? cap_[j] : 0.0;
    }

    /// Rebuilds the objective row in canonical form for costs c (basic
    /// columns eliminated). Only reduced costs are kept; objective values
    /// are computed from the solution directly.
    void canonicalize_objective(const std::vector<double>& costs) {
        for (std::size_t j = 0; j < n_; ++j) obj_[j] = costs[j];
        for (std::size_t i = 0; i < m_; ++i) {
            const double c = costs[basis_[i]];
            if (c == 0.0) continue;
            const double* r = row(i);
            for (std::size_t j = 0; j < n_; ++j) obj_[j] -= c * r[j];
        }
    }

    /// Gauss-Jordan elimination on the pivot column. The right-hand-side
    /// column is transformed too but callers that track variable bounds
    /// overwrite it with directly computed basic values afterwards.
    void pivot(std::size_t prow, std::size_t pcol) {
        double* pr = row(prow);
        const double inv = 1.0 / pr[pcol];
        for (std::size_t j = 0; j <= n_; ++j) pr[j] *= inv;
        pr[pcol] = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == prow) continue;
            double* r = row(i);
            const double factor = r[pcol];
            if (factor == 0.0) continue;
            for (std::size_t j = 0; j <= n_; ++j) r[j] -= factor * pr[j];
            r[pcol] = 0.0;
        }
        const double factor = obj_[pcol];
        if (factor != 0.0) {
            for (std::size_t j = 0; j < n_; ++j) obj_[j] -= factor * pr[j];
            obj_[pcol] = 0.0;
        }
        basis_[prow] = pcol;
        at_upper_[pcol] = false;
    }

    /// Runs the simplex on the current canonical objective until no
    /// allowed column improves it. `allowed` masks columns that may enter
    /// (artificials are banned in phase two).
    LpStatus iterate(const std::vector<bool>& allowed,
                     std::chrono::steady_clock::time_point deadline, std::size_t& iterations) {
        constexpr double kReducedCostTol = 1e-9;
        constexpr double kPivotTol = 1e-9;
        constexpr double kRatioTieTol = 1e-12;
        constexpr std::size_t kDegenerateLimit = 64;
        std::size_t degenerate_streak = 0;
        bool bland = false;

        while (true) {
            if ((iterations & 63u) == 0 && std::chrono::steady_clock::now() > deadline) {
                throw budget_exceeded("simplex: time budget exhausted");
            }

            // Entering column: a variable at its lower bound improves the
            // (maximized) objective when its reduced cost is positive, one
            // at its upper bound when it is negative. Dantzig pricing by
            // magnitude, or the first improving column under Bland's rule.
            std::size_t pcol = n_;
            double best = kReducedCostTol;
            double dir = 1.0;
            for (std::size_t j = 0; j < n_; ++j) {
                if (!allowed[j] || cap_[j] <= 0.0) continue;
                const double r = at_upper_[j] ? -obj_[j] : obj_[j];
                if (r > best) {
                    best = r;
                    pcol = j;
                    dir = at_upper_[j] ? -1.0 : 1.0;
                    if (bland) break;
                }
            }
            if (pcol == n_) return LpStatus::optimal;

            // Ratio test: the entering variable moves by t in direction
            // dir until it reaches its own other bound (a bound flip) or a
            // basic variable reaches one of its bounds. Ties go to the
            // smallest basic variable index (Bland's anti-cycling choice);
            // a tie with the flip keeps the cheaper flip.
            double t_best = cap_[pcol];
            std::size_t prow = m_;
            bool leave_at_upper = false;
            for (std::size_t i = 0; i < m_; ++i) {
                const double e = dir * tab_[i * width_ + pcol];
                double t;
                bool hits_upper;
                if (e > kPivotTol) {
                    t = std::max(tab_[i * width_ + n_], 0.0) / e;
                    hits_upper = false;
                } else if (e < -kPivotTol && std::isfinite(cap_[basis_[i]])) {
                    t = std::max(cap_[basis_[i]] - tab_[i * width_ + n_], 0.0) / -e;
                    hits_upper = true;
                } else {
                    continue;
                }
                const bool better =
                    t < t_best - kRatioTieTol ||
                    (t < t_best + kRatioTieTol && prow != m_ && basis_[i] < basis_[prow]);
                if (better) {
                    t_best = std::min(t, t_best);
                    prow = i;
                    leave_at_upper = hits_upper;
                }
            }
            if (prow == m_ && !std::isfinite(t_best)) return LpStatus::unbounded;
            ++iterations;

            if (prow == m_) {
                // Bound flip: no basis change, adjust basic values only.
                const double step = dir * cap_[pcol];
                for (std::size_t i = 0; i < m_; ++i) {
                    tab_[i * width_ + n_] -= step * tab_[i * width_ + pcol];
                }
                at_upper_[pcol] = !at_upper_[pcol];
                degenerate_streak = 0;
                bland = false;
                continue;
            }

            // Basis change: compute the new basic values directly, then
            // apply the matrix pivot and overwrite the rhs column.
            const std::size_t leaving = basis_[prow];
            const double enter_value = dir > 0.0 ? t_best : cap_[pcol] - t_best;
            for (std::size_t i = 0; i < m_; ++i) {
                scratch_[i] = tab_[i * width_ + n_] - dir * t_best * tab_[i * width_ + pcol];
            }
            pivot(prow, pcol);
            for (std::size_t i = 0; i < m_; ++i) {
                tab_[i * width_ + n_] = i == prow ? enter_value : scratch_[i];
            }
            at_upper_[leaving] = leave_at_upper;

            if (t_best <= kRatioTieTol) {
                if (++degenerate_streak >= kDegenerateLimit) bland = true;
            } else {
                degenerate_streak = 0;
                bland = false;
            }
        }
    }

private:
    std::size_t m_, n_, width_;
    std::vector<double> tab_;
    std::vector<double> obj_;
    std::vector<double> cap_;
    std::vector<std::size_t> basis_;
    std::vector<bool> at_upper_;
    std::vector<double> scratch_;
};

} // namespace detail

/// Solves an LpProblem with a dense two-phase simplex. Deterministic for
/// identical inputs. Throws budget_exceeded when the wall-clock budget
/// runs out before optimality.
inline LpSolution solve_lp(const LpProblem& lp,
                           std::chrono::duration<double> budget = std::chrono::duration<double>(30.0)) {
    assert(lp.objective.size() == lp.num_vars);
    assert(lp.lower.size() == lp.num_vars && lp.upper.size() == lp.num_vars);
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration_cast<std::chrono::steady_clock::duration>(budget);

    // Normalize every variable to 0 <= y <= cap. Finite lower bounds are
    // shifted out, upper-bounded-only variables are mirrored, and free
    // variables split into a positive and a negative part.
    struct ColumnMap {
        std::size_t col = 0;      // first normalized column
        double shift = 0.0;       // x = shift + sign * y  (- second column when split)
        double sign = 1.0;
        bool split = false;       // x = y_pos - y_neg (both bounds infinite)
    };
    std::vector<ColumnMap> map(lp.num_vars);
    std::size_t num_cols = 0;
    for (std::size_t v = 0; v < lp.num_vars; ++v) {
        const double lo = lp.lower[v], hi = lp.upper[v];
        if (lo > hi) return LpSolution{LpStatus::infeasible, 0.0, {}, 0};
        if (std::isfinite(lo)) {
            map[v] = {num_cols, lo, 1.0, false};
            num_cols += 1;
        } else if (std::isfinite(hi)) {
            map[v] = {num_cols, hi, -1.0, false}; // x = hi - y
            num_cols += 1;
        } else {
            map[v] = {num_cols, 0.0, 1.0, true};
            num_cols += 2;
        }
    }

    const std::size_t m = lp.rows.size();

    // Dense row expansion with shifted right-hand sides.
    std::vector<std::vector<double>> rows(m, std::vector<double>(num_cols, 0.0));
    std::vector<double> rhs(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double b = lp.rhs[i];
        for (std::size_t v = 0; v < lp.num_vars; ++v) {
            const double a = lp.rows[i][v];
            if (a == 0.0) continue;
            const ColumnMap& cm = map[v];
            b -= a * cm.shift;
            rows[i][cm.col] += a * cm.sign;
            if (cm.split) rows[i][cm.col + 1] -= a;
        }
        rhs[i] = b;
    }

    // Objective in normalized columns. The constant from bound shifts is
    // irrelevant to pivoting and re-enters when the objective is evaluated
    // at the recovered point.
    std::vector<double> std_obj(num_cols, 0.0);
    for (std::size_t v = 0; v < lp.num_vars; ++v) {
        const double c = lp.objective[v];
        if (c == 0.0) continue;
        const ColumnMap& cm = map[v];
        std_obj[cm.col] += c * cm.sign;
        if (cm.split) std_obj[cm.col + 1] -= c;
    }

    // Rows with negative rhs are negated and receive an artificial
    // alongside their surplus column; every other row gets a plain slack
    // that can start basic.
    std::size_t num_artificial = 0;
    for (double b : rhs) {
        if (b < 0.0) ++num_artificial;
    }
    const std::size_t total_cols = num_cols + m + num_artificial;
    detail::SimplexTableau tab(m, total_cols);
    std::vector<bool> is_artificial(total_cols, false);

    for (std::size_t v = 0; v < lp.num_vars; ++v) {
        const ColumnMap& cm = map[v];
        if (!cm.split && std::isfinite(lp.lower[v]) && std::isfinite(lp.upper[v])) {
            tab.caps()[cm.col] = lp.upper[v] - lp.lower[v];
        }
    }
    {
        std::size_t art = 0;
        for (std::size_t i = 0; i < m; ++i) {
            double* r = tab.row(i);
            const bool negate = rhs[i] < 0.0;
            const double s = negate ? -1.0 : 1.0;
            for (std::size_t j = 0; j < num_cols; ++j) r[j] = s * rows[i][j];
            r[num_cols + i] = negate ? -1.0 : 1.0; // slack / surplus
            tab.rhs(i) = s * rhs[i];
            if (negate) {
                const std::size_t acol = num_cols + m + art;
                r[acol] = 1.0;
                is_artificial[acol] = true;
                tab.basis()[i] = acol;
                ++art;
            } else {
                tab.basis()[i] = num_cols + i;
            }
        }
    }

    LpSolution result;
    std::vector<bool> allowed(total_cols, true);

    if (num_artificial > 0) {
        // Phase one: drive the artificials to zero.
        std::vector<double> phase1(total_cols, 0.0);
        for (std::size_t j = 0; j < total_cols; ++j) {
            if (is_artificial[j]) phase1[j] = -1.0;
        }
        tab.canonicalize_objective(phase1);
        const LpStatus st = tab.iterate(allowed, deadline, result.iterations);
        (void)st; // phase one is bounded below by zero, never unbounded
        double infeasibility = 0.0;
        for (std::size_t i = 0; i < tab.rows(); ++i) {
            if (is_artificial[tab.basis()[i]]) infeasibility += std::max(tab.rhs(i), 0.0);
        }
        if (infeasibility > 1e-7) {
            result.status = LpStatus::infeasible;
            return result;
        }
        // Pivot lingering artificials out of the basis where possible;
        // all-zero rows are redundant and harmless to keep. The basic
        // artificial is zero here, so the swap moves no mass and the plain
        // matrix pivot keeps the rhs column consistent.
        for (std::size_t i = 0; i < tab.rows(); ++i) {
            if (!is_artificial[tab.basis()[i]]) continue;
            const double* r = tab.row(i);
            for (std::size_t j = 0; j < num_cols + m; ++j) {
                if (std::abs(r[j]) > 1e-9 && !tab.nonbasic_at_upper(j)) {
                    tab.pivot(i, j);
                    break;
                }
            }
        }
        for (std::size_t j = 0; j < total_cols; ++j) {
            if (is_artificial[j]) allowed[j] = false;
        }
    }

    // Phase two on the real objective.
    std::vector<double> phase2(total_cols, 0.0);
    for (std::size_t j = 0; j < num_cols; ++j) phase2[j] = std_obj[j];
    tab.canonicalize_objective(phase2);
    result.status = tab.iterate(allowed, deadline, result.iterations);
    if (result.status != LpStatus::optimal) return result;

    // Recover the original variables from the basic solution.
    std::vector<double> y(total_cols, 0.0);
    for (std::size_t j = 0; j < num_cols; ++j) y[j] = tab.value(j);
    result.x.assign(lp.num_vars, 0.0);
    result.objective = 0.0;
    for (std::size_t v = 0; v < lp.num_vars; ++v) {
        const ColumnMap& cm = map[v];
        double value = cm.shift + cm.sign * y[cm.col];
        if (cm.split) value -= y[cm.col + 1];
        result.x[v] = value;
        result.objective += lp.objective[v] * value;
    }
    return result;
}

} // namespace adscope
