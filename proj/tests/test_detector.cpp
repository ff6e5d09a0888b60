#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <random>

#include "adscope/detector.hpp"
#include "adscope/rng.hpp"
#include "oracles.hpp"

using adscope::AdClass;
using adscope::DetectorRule;
using adscope::Pmf;
using adscope::singleton_class;
using adscope::solve_minimax;
using adscope::UncertaintyClass;

TEST_CASE("singleton anchors: separation, symmetry, identity") {
    // Well-separated pair: the optimal rule fires on the first category.
    const DetectorRule rule = solve_minimax(singleton_class({0.8, 0.2}), {0.2, 0.8});
    REQUIRE(rule.worst_case_error() == Catch::Approx(0.2).margin(1e-9));
    REQUIRE(rule.zeta == Catch::Approx(0.8).margin(1e-9));
    REQUIRE(adscope::dot(rule.d_tilde, {0.8, 0.2}) >= 0.8 - 1e-9);

    // Identical hypotheses: no rule beats a coin flip.
    const DetectorRule coin = solve_minimax(singleton_class({0.3, 0.7}), {0.3, 0.7});
    REQUIRE(coin.worst_case_error() == Catch::Approx(0.5).margin(1e-9));

    // Disjoint supports: a perfect detector exists.
    const DetectorRule perfect = solve_minimax(singleton_class({1.0, 0.0}), {0.0, 1.0});
    REQUIRE(perfect.worst_case_error() == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("detection probabilities are consistent with the returned rule") {
    std::mt19937_64 rng(90210);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng() % 7;
        const UncertaintyClass u = oracles::random_class(rng, n);
        const Pmf q = oracles::random_pmf(rng, n);
        const DetectorRule rule = solve_minimax(u, q);

        for (double d : rule.d_tilde) {
            REQUIRE(d >= -1e-8);
            REQUIRE(d <= 1.0 + 1e-8);
        }
        // zeta equals the smaller of the two guarantees, recomputed
        // independently of the solver.
        const double worst_detect = oracles::greedy_min_dot(rule.d_tilde, u);
        const double no_alarm = 1.0 - adscope::dot(rule.d_tilde, q);
        REQUIRE(rule.zeta == Catch::Approx(std::min(worst_detect, no_alarm)).margin(1e-6));

        const adscope::WorstCaseReport wc = adscope::worst_case_report(rule, u, q);
        REQUIRE(wc.p1_w == Catch::Approx(1.0 - worst_detect).margin(1e-6));
        REQUIRE(wc.p2 == Catch::Approx(1.0 - no_alarm).margin(1e-6));
        REQUIRE(wc.minimax_error == Catch::Approx(rule.worst_case_error()).margin(1e-6));
    }
}

TEST_CASE("library greedy linear optimization equals vertex enumeration") {
    std::mt19937_64 rng(515151);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 3;
        const UncertaintyClass u = oracles::random_class(rng, n);
        std::vector<double> c(n);
        for (double& v : c) v = coeff(rng);
        const auto [lib_min, at_min] = adscope::linear_opt_over_class(c, u, adscope::OptSense::min);
        const auto [lib_max, at_max] = adscope::linear_opt_over_class(c, u, adscope::OptSense::max);
        REQUIRE(lib_min ==
                Catch::Approx(oracles::linear_opt_vertex_oracle(c, u, false)).margin(1e-10));
        REQUIRE(lib_max ==
                Catch::Approx(oracles::linear_opt_vertex_oracle(c, u, true)).margin(1e-10));
        REQUIRE(adscope::dot(c, at_min) == Catch::Approx(lib_min).margin(1e-12));
        REQUIRE(adscope::dot(c, at_max) == Catch::Approx(lib_max).margin(1e-12));
    }
}

TEST_CASE("solver matches the exhaustive rule grid at n = 2") {
    std::mt19937_64 rng(626262);
    for (int trial = 0; trial < 12; ++trial) {
        const UncertaintyClass u = oracles::random_class(rng, 2);
        const Pmf q = oracles::random_pmf(rng, 2);
        const double lp = solve_minimax(u, q).worst_case_error();
        const double grid = oracles::grid_minimax(u, q);
        REQUIRE(lp == Catch::Approx(grid).margin(2e-3));
    }
}

TEST_CASE("solver matches the exhaustive rule grid at n = 3") {
    std::mt19937_64 rng(737373);
    for (int trial = 0; trial < 3; ++trial) {
        const UncertaintyClass u = oracles::random_class(rng, 3);
        const Pmf q = oracles::random_pmf(rng, 3);
        const double lp = solve_minimax(u, q).worst_case_error();
        const double grid = oracles::grid_minimax(u, q);
        REQUIRE(lp == Catch::Approx(grid).margin(2e-3));
    }
}

TEST_CASE("widening the class never helps the detector") {
    std::mt19937_64 rng(848484);
    std::uniform_real_distribution<double> extra(0.0, 0.15);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + rng() % 5;
        const UncertaintyClass u = oracles::random_class(rng, n, 0.1);
        const Pmf q = oracles::random_pmf(rng, n);

        UncertaintyClass wider = u;
        for (std::size_t i = 0; i < n; ++i) {
            wider.p_min[i] = std::max(0.0, wider.p_min[i] - extra(rng));
            wider.p_max[i] = std::min(1.0, wider.p_max[i] + extra(rng));
        }
        const double narrow_err = solve_minimax(u, q).worst_case_error();
        const double wide_err = solve_minimax(wider, q).worst_case_error();
        REQUIRE(wide_err >= narrow_err - 1e-7);
    }
}

TEST_CASE("infeasible classes and mismatched dimensions are rejected") {
    UncertaintyClass empty;
    empty.p_min = {0.6, 0.6};
    empty.p_max = {0.4, 0.4};  // p_min above p_max
    empty.samples_seen = 1;
    REQUIRE_THROWS_AS(solve_minimax(empty, {0.5, 0.5}), adscope::infeasible_error);

    UncertaintyClass overfull;
    overfull.p_min = {0.7, 0.7};  // sums above one
    overfull.p_max = {0.9, 0.9};
    overfull.samples_seen = 1;
    REQUIRE_THROWS_AS(solve_minimax(overfull, {0.5, 0.5}), adscope::infeasible_error);

    REQUIRE_THROWS_AS(solve_minimax(singleton_class({0.5, 0.5}), {1.0}), adscope::data_error);
}

TEST_CASE("randomized classification follows d_tilde frequencies") {
    DetectorRule rule;
    rule.d_tilde = {1.0, 0.0, 0.3};
    adscope::Rng rng(2026);

    for (int i = 0; i < 200; ++i) {
        REQUIRE(adscope::classify_ad(rule, 0, rng) == AdClass::InterestBased);
        REQUIRE(adscope::classify_ad(rule, 1, rng) == AdClass::NonInterestBased);
    }
    int hits = 0;
    const int draws = 20000;
    for (int i = 0; i < draws; ++i) {
        hits += adscope::classify_ad(rule, 2, rng) == AdClass::InterestBased ? 1 : 0;
    }
    REQUIRE(static_cast<double>(hits) / draws == Catch::Approx(0.3).margin(0.02));

    REQUIRE_THROWS_AS(adscope::classify_ad(rule, 3, rng), adscope::data_error);
}

TEST_CASE("solver stays within the runtime budget at full taxonomy width") {
    std::mt19937_64 rng(959595);
    for (int trial = 0; trial < 5; ++trial) {
        const UncertaintyClass u = oracles::random_class(rng, 32, 0.05);
        const Pmf q = oracles::random_pmf(rng, 32);
        const auto t0 = std::chrono::steady_clock::now();
        const DetectorRule rule = solve_minimax(u, q, std::chrono::duration<double>(0.5));
        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
        REQUIRE(rule.zeta >= 0.5 - 1e-9);  // guessing already guarantees 0.5
        REQUIRE(ms <= 500.0);
    }
}
