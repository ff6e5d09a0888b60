// End-to-end walkthrough on a small synthetic example: build an interest
// profile from a clickstream, estimate the background category mix from
// incognito ads, solve for the robust classification rule, classify a few
// ads, score profile uniqueness, and apply a user blocking policy.

#include <cstdio>
#include <string>
#include <vector>

#include "adscope/adscope.hpp"

namespace {

void print_pmf(const char* label, const adscope::Pmf& p) {
    std::printf("%-14s[", label);
    for (std::size_t i = 0; i < p.size(); ++i) {
        std::printf("%s%.3f", i ? ", " : "", p[i]);
    }
    std::printf("]\n");
}

} // namespace

int main() {
    constexpr std::size_t kCategories = 4;
    const char* names[kCategories] = {"autos", "cooking", "finance", "gardening"};

    adscope::WindowConfig window;
    window.w_min = 40;
    window.w_max = 200;

    // A browsing history heavy on cooking and gardening.
    adscope::Rng rng(2026);
    const adscope::Pmf taste = {0.10, 0.45, 0.10, 0.35};
    adscope::SelectorState state("tracker-1", kCategories);
    for (int i = 0; i < 300; ++i) state.append_click(rng.categorical(taste), window);

    // The background mix, estimated from ads served to a fresh session.
    const adscope::Pmf background = {0.40, 0.25, 0.20, 0.15};
    for (int i = 0; i < 200; ++i) {
        state.append_incognito(rng.categorical(background), window);
    }

    std::printf("== Profile the tracker could have built ==\n");
    print_pmf("window mle", state.window_mle());
    print_pmf("class lower", state.uclass().p_min);
    print_pmf("class upper", state.uclass().p_max);
    print_pmf("background", *state.q_hat());

    std::printf("\n== Robust classification rule ==\n");
    const adscope::DetectorRule rule = adscope::solve_minimax(state.uclass(), *state.q_hat());
    print_pmf("d_tilde", rule.d_tilde);
    const adscope::WorstCaseReport wc =
        adscope::worst_case_report(rule, state.uclass(), *state.q_hat());
    std::printf("guarantee zeta      %.4f\n", rule.zeta);
    std::printf("worst-case error    %.4f (miss %.4f, false alarm %.4f)\n",
                wc.minimax_error, wc.p1_w, wc.p2);

    std::printf("\n== Classifying incoming ads ==\n");
    for (std::size_t cat = 0; cat < kCategories; ++cat) {
        int interest = 0;
        const int trials = 2000;
        for (int i = 0; i < trials; ++i) {
            if (adscope::classify_ad(rule, cat, rng) == adscope::AdClass::InterestBased) {
                ++interest;
            }
        }
        std::printf("ad about %-10s -> declared interest-based %4.1f%% of the time\n",
                    names[cat], 100.0 * interest / trials);
    }

    std::printf("\n== How identifying is this profile? ==\n");
    const adscope::Pmf population = {0.30, 0.30, 0.25, 0.15};
    std::vector<double> history;
    adscope::Rng hrng(7);
    for (int i = 0; i < 500; ++i) {
        adscope::UncertaintyClass other;
        other.p_min = other.p_max = [&] {
            adscope::Pmf p(kCategories);
            double sum = 0.0;
            for (double& x : p) sum += x = 0.05 + hrng.next_double();
            for (double& x : p) x /= sum;
            return p;
        }();
        other.samples_seen = 1;
        history.push_back(adscope::min_uniqueness(other, population).u_min);
    }
    const adscope::UniquenessReport uniq = adscope::min_uniqueness(state.uclass(), population);
    const auto pct = adscope::percentile(uniq.u_min, history);
    std::printf("lower bound on divergence from the average profile: %.4f bits\n", uniq.u_min);
    std::printf("more identifying than %.1f%% of a 500-profile reference population\n", *pct);

    std::printf("\n== Applying the user's blocking policy ==\n");
    adscope::Policy hide_unique_interest;
    hide_unique_interest.sign = adscope::PolicySign::block;
    hide_unique_interest.constraint.interest_flag = 1;
    hide_unique_interest.constraint.min_uniqueness_percentile = 50.0;
    adscope::PolicySet policy;
    policy.policies = {hide_unique_interest};
    std::printf("policy: %s\n", adscope::render_policy(hide_unique_interest, nullptr).c_str());

    const auto verdict_name = [](adscope::Verdict v) {
        return v == adscope::Verdict::Hide ? "Hide" : v == adscope::Verdict::Show ? "Show"
                                                                                  : "Undecidable";
    };
    adscope::AdAnnotation ad;
    ad.selector_id = "tracker-1";
    ad.decision = adscope::AdClass::InterestBased;
    ad.uniqueness_percentile = pct;
    std::printf("interest-based ad backed by this profile: %s\n",
                verdict_name(adscope::decide(policy, ad, nullptr).decision));
    ad.decision = adscope::AdClass::NonInterestBased;
    std::printf("ad judged untargeted:                     %s\n",
                verdict_name(adscope::decide(policy, ad, nullptr).decision));
    return 0;
}
