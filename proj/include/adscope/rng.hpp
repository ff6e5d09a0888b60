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
#include <cstdint>
#include <random>
#include <vector>

namespace adscope {

/// Deterministic random source. Wraps std::mt19937_64 (whose output
/// sequence is fixed by the standard) and converts to doubles explicitly,
/// so a seed fully determines every stream of draws on every platform.
/// std::*_distribution adapters are avoided on purpose: their mapping from
/// engine output to values is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random mantissa bits.
    double next_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound) via rejection sampling (unbiased).
    std::uint64_t next_below(std::uint64_t bound) {
        assert(bound > 0);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    bool bernoulli(double p) { return next_double() < p; }

    /// Samples an index distributed according to weights (need not be
    /// normalized) by inverse transform over the cumulative sums.
    std::size_t categorical(const std::vector<double>& weights) {
        assert(!weights.empty());
        double total = 0.0;
        for (double w : weights) total += w;
        assert(total > 0.0);
        double u = next_double() * total;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            u -= weights[i];
            if (u < 0.0) return i;
        }
        return weights.size() - 1;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

} // namespace adscope
