// Simulation study: sweep the ad server's interest-targeting rate and
// compare the solver's predicted worst-case error against the error rates
// actually observed on synthetic ground truth, for both a server that
// reuses the observed profile and one that targets fresh sessions too.

#include <cstdio>
#include <string>
#include <vector>

#include "adscope/adscope.hpp"

namespace {

adscope::ScenarioConfig base_config(std::uint64_t seed, adscope::Scenario scenario) {
    adscope::ScenarioConfig cfg;
    cfg.n = 32;
    cfg.t.resize(cfg.n);
    double sum = 0.0;
    for (std::size_t i = 0; i < cfg.n; ++i) sum += cfg.t[i] = 1.0 / static_cast<double>(i + 3);
    for (double& x : cfg.t) x /= sum;
    cfg.scenario = scenario;
    cfg.rho = 0.5;
    cfg.stream_length = 3000;
    cfg.seed = seed;
    cfg.window.w_min = 87;
    cfg.window.w_max = 1000;

    adscope::SelectorSpec sel;
    sel.id = "tracker";
    sel.coverage = 1.0;
    sel.ad_rate = 1.0;
    cfg.selectors = {sel};
    return cfg;
}

} // namespace

int main() {
    std::printf("Sweep of the interest-targeting rate (baseline server, 3000 visits)\n");
    std::printf("%-7s %-10s %-10s %-10s %-10s %-12s\n", "alpha", "pred.miss", "obs.miss",
                "pred.fa", "obs.fa", "undecidable");
    for (int step = 1; step <= 9; step += 2) {
        adscope::ScenarioConfig cfg = base_config(500 + step, adscope::Scenario::baseline);
        cfg.selectors[0].alpha = 0.1 * step;
        const adscope::ExperimentReport rep = adscope::run_experiment(cfg);
        const adscope::SelectorOutcome& out = rep.selectors[0];
        if (!out.rule_available) {
            std::printf("%-7.1f (no rule available)\n", cfg.selectors[0].alpha);
            continue;
        }
        std::printf("%-7.1f %-10.4f %-10.4f %-10.4f %-10.4f %zu/%zu\n", cfg.selectors[0].alpha,
                    out.p1_w, out.fn_rate, out.p2, out.fp_rate, out.undecidable, rep.total_ads);
    }
    std::printf("The observed miss rate stays below its prediction, which is a worst\n"
                "case over every profile the observed windows allow; the false-alarm\n"
                "rate tracks its prediction up to sampling noise in the background\n"
                "estimate the rule was solved against.\n\n");

    std::printf("Server strategy comparison at alpha = 0.5\n");
    for (const auto scenario : {adscope::Scenario::baseline, adscope::Scenario::paranoid}) {
        adscope::ScenarioConfig cfg = base_config(900, scenario);
        cfg.selectors[0].alpha = 0.5;
        const adscope::ExperimentReport rep = adscope::run_experiment(cfg);
        const adscope::SelectorOutcome& out = rep.selectors[0];
        std::printf("  %-9s guarantee %.4f  miss %.4f  false alarm %.4f\n",
                    scenario == adscope::Scenario::baseline ? "baseline" : "paranoid",
                    out.rule_available ? 1.0 - out.predicted_minimax_error : 0.0, out.fn_rate,
                    out.fp_rate);
    }
    std::printf("A server that targets from the whole interest profile (paranoid) is\n"
                "harder to pin down than one that replays the observed window, but the\n"
                "worst-case guarantee covers both.\n\n");

    std::printf("Effect of the incognito revisit rate (alpha = 0.5, baseline)\n");
    std::printf("%-7s %-12s %-12s\n", "rho", "rule?", "undecidable");
    for (const double rho : {0.0, 0.05, 0.25, 0.75}) {
        adscope::ScenarioConfig cfg = base_config(700, adscope::Scenario::baseline);
        cfg.selectors[0].alpha = 0.5;
        cfg.rho = rho;
        const adscope::ExperimentReport rep = adscope::run_experiment(cfg);
        const adscope::SelectorOutcome& out = rep.selectors[0];
        std::printf("%-7.2f %-12s %zu/%zu\n", rho, out.rule_available ? "yes" : "no",
                    out.undecidable, rep.total_ads);
    }
    std::printf("Without incognito revisits there is no background estimate, so every\n"
                "ad stays undecidable; a modest revisit rate unlocks classification.\n");
    return 0;
}
