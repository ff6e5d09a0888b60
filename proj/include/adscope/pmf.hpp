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
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "adscope/errors.hpp"

namespace adscope {

/// Probability mass function over a finite category alphabet, stored as a
/// dense vector indexed by category id.
using Pmf = std::vector<double>;

/// Tolerance used when validating that a Pmf sums to one.
inline constexpr double kPmfSumTolerance = 1e-9;

inline double sum(const Pmf& p) {
    return std::accumulate(p.begin(), p.end(), 0.0);
}

/// True iff every entry is nonnegative and the entries sum to one within
/// kPmfSumTolerance.
inline bool is_pmf(const Pmf& p) {
    if (p.empty()) return false;
    for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v)) return false;
    }
    return std::abs(sum(p) - 1.0) <= kPmfSumTolerance;
}

inline void validate_pmf(const Pmf& p, const char* context) {
    if (!is_pmf(p)) {
        throw data_error(std::string(context) + ": not a probability mass function");
    }
}

/// Maximum-likelihood category distribution from observation counts:
/// output_i = counts_i / total. Requires a positive total count.
inline Pmf ml_estimate(const std::vector<long long>& counts) {
    long long total = 0;
    for (long long c : counts) {
        assert(c >= 0);
        total += c;
    }
    if (total <= 0) {
        throw data_error("ml_estimate: no observations");
    }
    Pmf out(counts.size());
    const double inv = 1.0 / static_cast<double>(total);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        out[i] = static_cast<double>(counts[i]) * inv;
    }
    return out;
}

/// Componentwise average of equally weighted profiles. All inputs must
/// share one dimension; the average of valid Pmfs is again a valid Pmf.
inline Pmf average_profile(const std::vector<Pmf>& profiles) {
    if (profiles.empty()) {
        throw data_error("average_profile: empty population");
    }
    const std::size_t n = profiles.front().size();
    Pmf out(n, 0.0);
    for (const Pmf& p : profiles) {
        if (p.size() != n) {
            throw data_error("average_profile: mixed dimensions");
        }
        for (std::size_t i = 0; i < n; ++i) out[i] += p[i];
    }
    const double inv = 1.0 / static_cast<double>(profiles.size());
    for (double& v : out) v *= inv;
    return out;
}

/// Floors every entry at eps and renormalizes, yielding a strictly
/// positive Pmf. Used before divergence computations whose reference
/// distribution must have full support.
inline Pmf smooth_pmf(const Pmf& p, double eps) {
    assert(eps > 0.0);
    Pmf out(p.size());
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i] = std::max(p[i], eps);
        total += out[i];
    }
    for (double& v : out) v /= total;
    return out;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    assert(a.size() == b.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

} // namespace adscope
