// Acceptance gate: exercises every component against independent oracles,
// analytic anchors, and the built command-line binary, printing exactly
// one PASS/FAIL line per criterion. Exits non-zero if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "adscope/adscope.hpp"

#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format(const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. Robust-detector solves: feasibility residuals, objective consistency
//    against an independent greedy inner minimum, and the speed envelope.
// ---------------------------------------------------------------------------
std::string check_lp_optimality(std::string& detail) {
    std::mt19937_64 rng(4001);
    double total_time = 0.0, max_time = 0.0;
    std::size_t solves = 0;

    const auto run_batch = [&](std::size_t n, std::size_t count) -> std::string {
        for (std::size_t trial = 0; trial < count; ++trial) {
            const auto u = oracles::random_class(rng, n);
            const auto q = oracles::random_pmf(rng, n);

            const auto start = Clock::now();
            const adscope::DetectorRule rule = adscope::solve_minimax(u, q);
            const double elapsed = seconds_since(start);
            total_time += elapsed;
            max_time = std::max(max_time, elapsed);
            ++solves;

            for (double d : rule.d_tilde) {
                if (d < -1e-8 || d > 1.0 + 1e-8) {
                    return format("decision variable out of [0,1] by more than 1e-8 "
                                  "(n=%zu trial %zu)", n, trial);
                }
            }
            const double guarantee = oracles::rule_guarantee(rule.d_tilde, u, q);
            if (std::abs(rule.zeta - guarantee) > 1e-6) {
                return format("objective inconsistent with its own rule: zeta %.9f vs "
                              "recomputed %.9f (n=%zu trial %zu)",
                              rule.zeta, guarantee, n, trial);
            }
            if (rule.zeta < 0.5 - 1e-9) {
                return format("zeta %.9f below the always-achievable 0.5 (n=%zu trial %zu)",
                              rule.zeta, n, trial);
            }
        }
        return "";
    };

    if (auto err = run_batch(32, 1000); !err.empty()) return err;
    if (auto err = run_batch(330, 100); !err.empty()) return err;

    const double mean_time = total_time / static_cast<double>(solves);
    detail = format("%zu solves, mean %.4fs, max %.4fs", solves, mean_time, max_time);
    if (mean_time > 0.1) return format("mean solve time %.4fs exceeds 0.1s", mean_time);
    if (max_time > 0.5) return format("max solve time %.4fs exceeds 0.5s", max_time);
    return "";
}

// ---------------------------------------------------------------------------
// 2. Low-dimensional solves match an exhaustive grid search over decision
//    rules (step 1e-3, exact greedy inner minimum).
// ---------------------------------------------------------------------------
std::string check_minimax_grid(std::string& detail) {
    std::mt19937_64 rng(4002);
    double worst = 0.0;
    const auto run_batch = [&](std::size_t n, std::size_t count) -> std::string {
        for (std::size_t trial = 0; trial < count; ++trial) {
            const auto u = oracles::random_class(rng, n);
            const auto q = oracles::random_pmf(rng, n);
            const double solver = adscope::solve_minimax(u, q).worst_case_error();
            const double oracle = oracles::grid_minimax(u, q);
            const double gap = std::abs(solver - oracle);
            worst = std::max(worst, gap);
            if (gap > 2e-3) {
                return format("n=%zu trial %zu: solver %.6f vs grid %.6f (gap %.2e)",
                              n, trial, solver, oracle, gap);
            }
        }
        return "";
    };
    if (auto err = run_batch(2, 150); !err.empty()) return err;
    if (auto err = run_batch(3, 50); !err.empty()) return err;
    detail = format("200 instances, worst gap %.2e", worst);
    return "";
}

// ---------------------------------------------------------------------------
// 3. The interest-class envelope remains feasible after every update of
//    every random visit stream.
// ---------------------------------------------------------------------------
std::string check_envelope_feasibility(std::string& detail) {
    std::mt19937_64 rng(4003);
    std::uniform_int_distribution<std::size_t> length_dist(87, 5000);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    adscope::WindowConfig window; // defaults: w_min 87, w_max 3915

    std::size_t checked = 0;
    for (std::size_t stream = 0; stream < 10000; ++stream) {
        const std::size_t length = length_dist(rng);
        // Log-uniform dimension in [2, 330].
        const std::size_t n = std::min<std::size_t>(
            330, static_cast<std::size_t>(2.0 * std::pow(165.0, uni(rng))));
        adscope::SelectorState state("s", n);
        for (std::size_t i = 0; i < length; ++i) {
            state.append_click(rng() % n, window);
            const bool should_exist = i + 1 >= window.w_min;
            if (state.uclass().initialized() != should_exist) {
                return format("stream %zu: class initialized=%d at %zu clicks", stream,
                              static_cast<int>(state.uclass().initialized()), i + 1);
            }
            if (should_exist) {
                ++checked;
                if (!adscope::check_feasible(state.uclass())) {
                    return format("stream %zu (n=%zu): envelope infeasible after %zu clicks",
                                  stream, n, i + 1);
                }
            }
        }
    }
    detail = format("10000 streams, %zu post-update checks, 0 violations", checked);
    return "";
}

// ---------------------------------------------------------------------------
// 4. Simulated error rates stay within the solver's predicted worst case
//    (plus binomial noise), and degenerate anchor setups behave exactly.
// ---------------------------------------------------------------------------
std::string check_simulator_bounds(std::string& detail) {
    std::mt19937_64 trng(4004);
    std::size_t scenarios_ok = 0;
    for (int i = 0; i < 50; ++i) {
        adscope::ScenarioConfig cfg;
        cfg.n = 32;
        cfg.t = oracles::random_pmf(trng, 32);
        cfg.scenario = adscope::Scenario::baseline;
        cfg.rho = 0.9;
        cfg.stream_length = 4000;
        cfg.seed = 1000 + static_cast<std::uint64_t>(i);
        adscope::SelectorSpec sel;
        sel.id = "sel";
        sel.coverage = 1.0;
        sel.alpha = 0.1 * static_cast<double>(1 + i % 9);
        sel.ad_rate = 1.0;
        cfg.selectors = {sel};

        const auto report = adscope::run_experiment(cfg);
        const auto& out = report.selectors[0];
        bool ok = out.rule_available;
        if (ok && out.truth_interest_total > 0) {
            const double sigma = std::sqrt(out.p1_w * (1.0 - out.p1_w) /
                                           static_cast<double>(out.truth_interest_total));
            ok = out.fn_rate <= out.p1_w + 3.0 * sigma + 1e-9;
        }
        if (ok && out.truth_noninterest_total > 0) {
            const double sigma = std::sqrt(out.p2 * (1.0 - out.p2) /
                                           static_cast<double>(out.truth_noninterest_total));
            ok = out.fp_rate <= out.p2 + 3.0 * sigma + 1e-9;
        }
        if (ok) ++scenarios_ok;
    }
    if (scenarios_ok < 49) {
        return format("only %zu/50 scenarios within predicted bounds", scenarios_ok);
    }

    // Anchor: when the class is exactly {q}, no rule can beat coin flipping;
    // both empirical rates must sit at 0.5.
    for (int t = 0; t < 3; ++t) {
        std::mt19937_64 rng(4100 + t);
        const auto q = oracles::random_pmf(rng, 32);
        adscope::UncertaintyClass u;
        u.p_min = q;
        u.p_max = q;
        u.samples_seen = 1;
        const auto rule = adscope::solve_minimax(u, q);
        adscope::Rng draws(77 + static_cast<std::uint64_t>(t));
        std::size_t miss = 0, alarm = 0;
        const std::size_t trials = 20000;
        for (std::size_t k = 0; k < trials; ++k) {
            if (adscope::classify_ad(rule, draws.categorical(q), draws) ==
                adscope::AdClass::NonInterestBased) {
                ++miss;
            }
            if (adscope::classify_ad(rule, draws.categorical(q), draws) ==
                adscope::AdClass::InterestBased) {
                ++alarm;
            }
        }
        const double miss_rate = static_cast<double>(miss) / static_cast<double>(trials);
        const double alarm_rate = static_cast<double>(alarm) / static_cast<double>(trials);
        if (std::abs(miss_rate - 0.5) > 0.02 || std::abs(alarm_rate - 0.5) > 0.02) {
            return format("singleton-class anchor off 0.5: miss %.4f, alarm %.4f", miss_rate,
                          alarm_rate);
        }
    }

    // Anchor: disjoint supports are perfectly separable.
    {
        adscope::UncertaintyClass u;
        u.p_min.assign(32, 0.0);
        u.p_max.assign(32, 0.0);
        for (std::size_t i = 0; i < 16; ++i) {
            u.p_min[i] = 0.02;
            u.p_max[i] = 0.12;
        }
        u.samples_seen = 1;
        adscope::Pmf q(32, 0.0);
        for (std::size_t i = 16; i < 32; ++i) q[i] = 1.0 / 16.0;
        adscope::Pmf p(32, 0.0);
        for (std::size_t i = 0; i < 16; ++i) p[i] = 1.0 / 16.0;

        const auto rule = adscope::solve_minimax(u, q);
        adscope::Rng draws(88);
        std::size_t miss = 0, alarm = 0;
        const std::size_t trials = 20000;
        for (std::size_t k = 0; k < trials; ++k) {
            if (adscope::classify_ad(rule, draws.categorical(p), draws) ==
                adscope::AdClass::NonInterestBased) {
                ++miss;
            }
            if (adscope::classify_ad(rule, draws.categorical(q), draws) ==
                adscope::AdClass::InterestBased) {
                ++alarm;
            }
        }
        const double miss_rate = static_cast<double>(miss) / static_cast<double>(trials);
        const double alarm_rate = static_cast<double>(alarm) / static_cast<double>(trials);
        if (miss_rate > 0.01 || alarm_rate > 0.01) {
            return format("disjoint-support anchor not separable: miss %.4f, alarm %.4f",
                          miss_rate, alarm_rate);
        }
    }

    detail = format("%zu/50 scenarios within bounds; anchors exact", scenarios_ok);
    return "";
}

// ---------------------------------------------------------------------------
// 5. Uniqueness solver: analytic divergence anchors, gradient vs finite
//    differences, grid-oracle agreement, and the n = 32 time budget.
// ---------------------------------------------------------------------------
std::string check_uniqueness(std::string& detail) {
    std::mt19937_64 rng(4005);

    for (int t = 0; t < 5; ++t) {
        const auto p = oracles::random_pmf(rng, 2 + t);
        if (std::abs(adscope::kl_divergence(p, p)) > 1e-9) {
            return "self-divergence is not zero";
        }
    }
    if (std::abs(adscope::kl_divergence({1.0, 0.0}, {0.5, 0.5}) - 1.0) > 1e-9) {
        return "point mass vs fair coin is not one bit";
    }

    // The optimizer's gradient model: d/dp_i of sum p log2(p/ref) is
    // log2(p_i/ref_i) + 1/ln2. Check it against central differences.
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + trial % 4;
        const auto p = oracles::random_pmf(rng, n, 0.05);
        const auto ref = oracles::random_pmf(rng, n, 0.05);
        const double h = 1e-6;
        for (std::size_t i = 0; i < n; ++i) {
            const double analytic = std::log2(p[i] / ref[i]) + 1.0 / std::log(2.0);
            auto lo = p, hi = p;
            lo[i] -= h;
            hi[i] += h;
            const double fd =
                (adscope::kl_divergence(hi, ref) - adscope::kl_divergence(lo, ref)) / (2.0 * h);
            if (std::abs(analytic - fd) > 1e-5) {
                return format("gradient mismatch at coordinate %zu: analytic %.8f vs fd %.8f",
                              i, analytic, fd);
            }
        }
    }

    double worst = 0.0;
    const auto run_batch = [&](std::size_t n, std::size_t count) -> std::string {
        for (std::size_t trial = 0; trial < count; ++trial) {
            const auto u = oracles::random_class(rng, n);
            const auto p_bar = oracles::random_pmf(rng, n);
            const double solver = adscope::min_uniqueness(u, p_bar).u_min;
            const double oracle = oracles::uniqueness_grid(u, p_bar);
            const double gap = std::abs(solver - oracle);
            worst = std::max(worst, gap);
            if (gap > 1e-4) {
                return format("n=%zu trial %zu: solver %.8f vs grid %.8f bits", n, trial,
                              solver, oracle);
            }
        }
        return "";
    };
    if (auto err = run_batch(2, 70); !err.empty()) return err;
    if (auto err = run_batch(3, 30); !err.empty()) return err;

    double max_time = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto u = oracles::random_class(rng, 32);
        const auto p_bar = oracles::random_pmf(rng, 32);
        const auto start = Clock::now();
        const auto report = adscope::min_uniqueness(u, p_bar);
        const double elapsed = seconds_since(start);
        max_time = std::max(max_time, elapsed);
        if (elapsed > 0.55) {
            return format("n=32 solve took %.3fs, over the 0.5s budget", elapsed);
        }
        if (!(report.u_min >= 0.0) || !std::isfinite(report.u_min)) {
            return "n=32 solve returned a non-finite or negative divergence";
        }
    }
    detail = format("100 oracle instances (worst gap %.2e bits), n=32 max %.3fs", worst, max_time);
    return "";
}

// ---------------------------------------------------------------------------
// 6. Policy engine worked examples: positives stay silent, a blanket
//    negative prevails, top-level percentile-gated blocking, and verdict
//    order independence over 1,000 permutations.
// ---------------------------------------------------------------------------
std::string check_policy_examples(std::string& detail) {
    const adscope::Taxonomy tax =
        adscope::load_taxonomy(std::string(ADSCOPE_DATA_DIR) + "/taxonomy.txt");
    const auto bottom = [&](const char* name) {
        return adscope::CategoryId{*tax.find_bottom(name), adscope::Level::bottom};
    };
    const auto top = [&](const char* name) {
        return adscope::CategoryId{*tax.find_top(name), adscope::Level::top};
    };
    const auto make = [](adscope::PolicySign sign, std::optional<int> interest,
                         std::optional<adscope::CategoryId> cat,
                         std::optional<double> pct = std::nullopt) {
        adscope::Policy p;
        p.sign = sign;
        p.constraint.interest_flag = interest;
        p.constraint.category = cat;
        p.constraint.min_uniqueness_percentile = pct;
        return p;
    };
    const auto annotate = [](std::optional<adscope::AdClass> decision,
                             std::optional<adscope::CategoryId> cat,
                             std::optional<double> pct = std::nullopt) {
        adscope::AdAnnotation a;
        a.selector_id = "sel";
        a.decision = decision;
        a.category = cat;
        a.uniqueness_percentile = pct;
        return a;
    };
    using adscope::AdClass;
    using adscope::PolicySign;
    using adscope::Verdict;

    // Worked example one: a user who welcomes profile-based ads about the
    // things they actually care about. Positive policies alone never hide.
    adscope::PolicySet likes;
    likes.policies = {make(PolicySign::allow, 1, bottom("trains")),
                      make(PolicySign::allow, 1, bottom("theme parks"))};
    if (adscope::decide(likes, annotate(AdClass::InterestBased, bottom("trains")), &tax)
            .decision != Verdict::Show) {
        return "welcomed interest ad was not shown";
    }
    if (adscope::decide(likes, annotate(AdClass::InterestBased, bottom("theme parks")), &tax)
            .decision != Verdict::Show) {
        return "welcomed interest ad was not shown";
    }

    // Constructed conflict: a blanket block of interest-based ads now
    // matches the same ad as the allows. Blocking must prevail.
    adscope::PolicySet conflict = likes;
    conflict.policies.push_back(make(PolicySign::block, 1, std::nullopt));
    const auto clash =
        adscope::decide(conflict, annotate(AdClass::InterestBased, bottom("trains")), &tax);
    if (clash.decision != Verdict::Hide) return "blanket negative did not prevail over positives";
    if (adscope::decide(conflict, annotate(AdClass::NonInterestBased, bottom("trains")), &tax)
            .decision != Verdict::Show) {
        return "non-interest ad was hidden by an interest-only policy";
    }

    // Worked example two: hide profile-based health ads backed by a
    // distinctive profile (top-level category, percentile gate).
    adscope::PolicySet health;
    health.policies = {make(PolicySign::block, 1, top("health & fitness"), 25.0)};
    if (adscope::decide(health, annotate(AdClass::InterestBased, bottom("cancer"), 30.0), &tax)
            .decision != Verdict::Hide) {
        return "distinctive health ad was not hidden";
    }
    if (adscope::decide(health, annotate(AdClass::InterestBased, bottom("cancer"), 20.0), &tax)
            .decision != Verdict::Show) {
        return "common health ad was not shown";
    }
    if (adscope::decide(health, annotate(AdClass::InterestBased, bottom("trains"), 95.0), &tax)
            .decision != Verdict::Show) {
        return "non-health ad was hidden by the health policy";
    }

    // Order independence across 1,000 permutations of a mixed set.
    adscope::PolicySet mixed;
    mixed.policies = {make(PolicySign::allow, 1, bottom("trains")),
                      make(PolicySign::allow, 1, bottom("theme parks")),
                      make(PolicySign::block, 1, std::nullopt),
                      make(PolicySign::block, 0, bottom("movies")),
                      make(PolicySign::block, std::nullopt, top("health & fitness"), 25.0),
                      make(PolicySign::allow, 0, std::nullopt)};
    const auto subject = annotate(AdClass::InterestBased, bottom("trains"), 50.0);
    const auto baseline = adscope::decide(mixed, subject, &tax).decision;
    std::mt19937_64 rng(4006);
    for (int perm = 0; perm < 1000; ++perm) {
        std::shuffle(mixed.policies.begin(), mixed.policies.end(), rng);
        if (adscope::decide(mixed, subject, &tax).decision != baseline) {
            return format("verdict changed under permutation %d", perm);
        }
    }
    detail = "worked examples exact; 1000 permutations agree";
    return "";
}

// ---------------------------------------------------------------------------
// 7. The command-line pipeline (simulate, ingest, report) is byte-for-byte
//    deterministic for a fixed seed.
// ---------------------------------------------------------------------------
std::string check_cli_determinism(std::string& detail) {
    const fs::path root = fs::temp_directory_path() / "adscope_acceptance_cli";
    std::error_code ec;
    fs::remove_all(root, ec);
    fs::create_directories(root);

    const auto write = [](const fs::path& path, const std::string& body) {
        std::ofstream out(path);
        out << body;
    };
    write(root / "scenario.json", R"({
      "schema": 1,
      "n": 8,
      "t": [0.3, 0.2, 0.15, 0.1, 0.1, 0.05, 0.05, 0.05],
      "selectors": [{"id": "sel-a", "coverage": 1.0, "alpha": 0.5, "ad_rate": 1.0},
                    {"id": "sel-b", "coverage": 0.5, "alpha": 0.3, "ad_rate": 0.5}],
      "scenario": "baseline",
      "rho": 0.3,
      "stream_length": 600,
      "seed": 11,
      "window": {"w_min": 30, "w_max": 150}
    })");
    write(root / "config.json", R"({
      "schema": 1,
      "n": 8,
      "scenario": "baseline",
      "window": {"w_min": 30, "w_max": 150, "rho": 0.3}
    })");

    const auto shell = [&](const std::string& args) -> bool {
        const std::string cmd = "env -u ADSCOPE_STATE_DIR \"" ADSCOPE_CLI_PATH "\" " + args +
                                " > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) && WEXITSTATUS(status) == 0;
    };
    const auto slurp = [](const fs::path& path) {
        std::ifstream in(path);
        std::ostringstream out;
        out << in.rdbuf();
        return out.str();
    };

    for (const char* side : {"A", "B"}) {
        const fs::path sim = root / (std::string("sim") + side);
        const fs::path state = root / (std::string("state") + side);
        const fs::path rep = root / (std::string("report") + side + ".json");
        if (!shell("simulate " + (root / "scenario.json").string() + " --out-dir " +
                   sim.string())) {
            return format("simulate run %s failed", side);
        }
        if (!shell("--config " + (root / "config.json").string() + " --state-dir " +
                   state.string() + " ingest " + (sim / "events.jsonl").string())) {
            return format("ingest run %s failed", side);
        }
        if (!shell("--config " + (root / "config.json").string() + " --state-dir " +
                   state.string() + " report --out " + rep.string())) {
            return format("report run %s failed", side);
        }
    }

    const std::string events_a = slurp(root / "simA" / "events.jsonl");
    if (events_a.empty()) return "simulation produced no events";
    if (events_a != slurp(root / "simB" / "events.jsonl")) {
        return "event logs differ between identical runs";
    }
    if (slurp(root / "simA" / "simulation_report.json") !=
        slurp(root / "simB" / "simulation_report.json")) {
        return "simulation reports differ between identical runs";
    }
    const std::string report_a = slurp(root / "reportA.json");
    if (report_a.empty()) return "detection report is empty";
    if (report_a != slurp(root / "reportB.json")) {
        return "detection reports differ between identical runs";
    }
    detail = format("reports byte-identical (%zu bytes)", report_a.size());
    fs::remove_all(root, ec);
    return "";
}

// ---------------------------------------------------------------------------
// 8. Page categorizer on a synthetic corpus drawn from the bundled
//    lexicon: perfect on URL-mapped pages, >= 95% on text-only pages,
//    cache on/off identical.
// ---------------------------------------------------------------------------
std::string check_categorizer(std::string& detail) {
    const std::string data_dir = ADSCOPE_DATA_DIR;
    const adscope::Taxonomy tax = adscope::load_taxonomy(data_dir + "/taxonomy.txt");
    const adscope::Lexicon lex = adscope::load_lexicon(data_dir + "/lexicon.txt", tax);
    const auto pools = oracles::parse_lexicon_file(data_dir + "/lexicon.txt");
    const auto corpus = oracles::make_corpus(pools, 200, 20260819);
    if (corpus.size() != 200) return "corpus generation did not produce 200 pages";

    adscope::CategoryCache cache_on(4096);
    adscope::CategoryCache cache_off(0);
    std::size_t url_total = 0, url_right = 0, text_total = 0, text_right = 0;
    for (const auto& labeled : corpus) {
        const auto with_cache = adscope::classify_page(labeled.page, lex, cache_on);
        const auto without = adscope::classify_page(labeled.page, lex, cache_off);
        const bool same = with_cache.has_value() == without.has_value() &&
                          (!with_cache || (with_cache->index == without->index &&
                                           with_cache->level == without->level));
        if (!same) return "cache-on and cache-off classifications differ";

        const auto expected = tax.find_bottom(labeled.category);
        if (!expected) return "corpus label missing from taxonomy: " + labeled.category;
        const bool right = with_cache.has_value() &&
                           with_cache->level == adscope::Level::bottom &&
                           with_cache->index == *expected;
        if (labeled.url_mapped) {
            ++url_total;
            url_right += right ? 1 : 0;
        } else {
            ++text_total;
            text_right += right ? 1 : 0;
        }
    }
    if (url_total == 0 || text_total == 0) return "corpus lacks one of the page kinds";
    if (url_right != url_total) {
        return format("url-mapped accuracy %zu/%zu, expected perfect", url_right, url_total);
    }
    if (text_right * 100 < text_total * 95) {
        return format("text accuracy %zu/%zu below 95%%", text_right, text_total);
    }
    detail = format("url %zu/%zu, text %zu/%zu, cache consistent", url_right, url_total,
                    text_right, text_total);
    return "";
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<std::string(std::string&)> run;
    };
    const std::vector<Criterion> criteria = {
        {"solver optimality and speed (n=32, n=330)", check_lp_optimality},
        {"solver matches exhaustive grid oracle (n<=3)", check_minimax_grid},
        {"interest-class envelope always feasible", check_envelope_feasibility},
        {"simulated error rates within predicted bounds", check_simulator_bounds},
        {"uniqueness anchors, gradient, oracle, budget", check_uniqueness},
        {"policy worked examples and order independence", check_policy_examples},
        {"command-line pipeline byte-deterministic", check_cli_determinism},
        {"categorizer accuracy on synthetic corpus", check_categorizer},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        std::string detail;
        std::string error;
        try {
            error = criteria[i].run(detail);
        } catch (const std::exception& e) {
            error = std::string("exception: ") + e.what();
        }
        if (error.empty()) {
            std::printf("PASS  %zu. %s — %s\n", i + 1, criteria[i].name, detail.c_str());
        } else {
            std::printf("FAIL  %zu. %s — %s\n", i + 1, criteria[i].name, error.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
    if (failures > 0) {
        std::printf("%d of %zu checks failed\n", failures, criteria.size());
        return 1;
    }
    std::printf("all %zu checks passed\n", criteria.size());
    return 0;
}
