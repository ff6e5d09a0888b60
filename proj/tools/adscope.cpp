// adscope: command-line front end for the ad-transparency toolkit.
//
// Subcommands:
//   ingest      feed JSONL event logs into a persistent state directory
//   report      per-selector detection report (JSON file + text table)
//   uniqueness  worst-case profile-uniqueness per selector
//   aggregate   combine state directories into population statistics
//   policy-eval evaluate an ad-blocking policy file against logged ads
//   simulate    run a synthetic scenario, emit events + ground-truth report
//
// Exit codes: 0 success (including recoverable warnings), 1 usage error,
// 2 data error (unreadable/invalid inputs), 3 internal error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "adscope/adscope.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kReportSchemaVersion = 1;
constexpr std::chrono::milliseconds kSolveBudget{500};

/// Invocation problems (missing arguments, unresolvable run configuration).
/// Distinct from data_error so the two map to different exit codes.
class usage_error : public std::runtime_error {
public:
    explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

/// Everything a command may need, merged from the config file, command-line
/// flags and the environment. Paths in the config file are resolved relative
/// to the config file's own directory.
struct RunConfig {
    std::optional<std::string> taxonomy_path;
    std::optional<std::string> lexicon_path;
    std::optional<std::string> public_suffix_path;
    std::optional<std::string> policy_path;
    std::optional<std::string> population_path;
    std::optional<std::string> state_dir;
    std::optional<std::string> scenario;
    std::optional<std::size_t> n;
    adscope::WindowConfig window;
    std::uint64_t seed = 1;
};

std::string resolve_relative(const fs::path& base, const std::string& p) {
    fs::path path(p);
    if (path.is_absolute()) return path.string();
    return (base / path).lexically_normal().string();
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw adscope::data_error("cannot read config file " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw adscope::data_error("config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw adscope::data_error("config file " + path + ": not a JSON object");
    if (j.contains("schema") && j["schema"].get<int>() != 1) {
        throw adscope::data_error("config file " + path + ": unsupported schema version");
    }

    const fs::path base = fs::path(path).parent_path();
    RunConfig cfg;
    auto take_path = [&](const char* key, std::optional<std::string>& out) {
        if (!j.contains(key)) return;
        if (!j[key].is_string()) {
            throw adscope::data_error(std::string("config field '") + key + "' must be a string");
        }
        out = resolve_relative(base, j[key].get<std::string>());
    };
    take_path("taxonomy", cfg.taxonomy_path);
    take_path("lexicon", cfg.lexicon_path);
    take_path("public_suffix", cfg.public_suffix_path);
    take_path("policy", cfg.policy_path);
    take_path("population", cfg.population_path);
    take_path("state_dir", cfg.state_dir);
    if (j.contains("scenario")) {
        cfg.scenario = j["scenario"].get<std::string>();
        adscope::scenario_from_string(*cfg.scenario); // validate early
    }
    if (j.contains("n")) {
        const long long n = j["n"].get<long long>();
        if (n <= 0) throw adscope::data_error("config field 'n' must be positive");
        cfg.n = static_cast<std::size_t>(n);
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("window")) {
        const json& w = j["window"];
        if (!w.is_object()) throw adscope::data_error("config field 'window' must be an object");
        if (w.contains("w_min")) cfg.window.w_min = w["w_min"].get<std::size_t>();
        if (w.contains("w_max")) cfg.window.w_max = w["w_max"].get<std::size_t>();
        if (w.contains("rho")) cfg.window.rho = w["rho"].get<double>();
        if (cfg.window.w_min == 0 || cfg.window.w_min > cfg.window.w_max) {
            throw adscope::data_error("config window: need 0 < w_min <= w_max");
        }
        if (cfg.window.rho < 0.0 || cfg.window.rho > 1.0) {
            throw adscope::data_error("config window: rho outside [0,1]");
        }
    }
    return cfg;
}

/// Command-line values that override the config file.
struct CliOverrides {
    std::string config_path;
    std::string state_dir;
    std::string scenario;
    std::string policy_path;
    std::string population_path;
    std::optional<std::uint64_t> seed;
};

/// Loaded resources shared by the commands.
struct Context {
    RunConfig cfg;
    CliOverrides cli;
    std::optional<adscope::Taxonomy> taxonomy;
    std::optional<adscope::Lexicon> lexicon;
    adscope::SuffixList suffixes;

    static Context make(const CliOverrides& cli) {
        Context ctx;
        ctx.cli = cli;
        if (!cli.config_path.empty()) ctx.cfg = load_run_config(cli.config_path);
        if (ctx.cfg.taxonomy_path) {
            ctx.taxonomy = adscope::load_taxonomy(*ctx.cfg.taxonomy_path);
        }
        if (ctx.cfg.lexicon_path) {
            if (!ctx.taxonomy) {
                throw adscope::data_error("config: 'lexicon' requires 'taxonomy'");
            }
            ctx.lexicon = adscope::load_lexicon(*ctx.cfg.lexicon_path, *ctx.taxonomy);
        }
        if (ctx.cfg.public_suffix_path) {
            ctx.suffixes = adscope::SuffixList::load(*ctx.cfg.public_suffix_path);
        }
        return ctx;
    }

    fs::path state_dir() const {
        if (!cli.state_dir.empty()) return cli.state_dir;
        if (cfg.state_dir) return *cfg.state_dir;
        if (const char* env = std::getenv("ADSCOPE_STATE_DIR"); env && *env) return env;
        throw usage_error("no state directory: pass --state-dir, set it in the config, "
                          "or export ADSCOPE_STATE_DIR");
    }

    adscope::Scenario scenario_or(adscope::Scenario fallback) const {
        if (!cli.scenario.empty()) return adscope::scenario_from_string(cli.scenario);
        if (cfg.scenario) return adscope::scenario_from_string(*cfg.scenario);
        return fallback;
    }

    bool scenario_explicit() const { return !cli.scenario.empty(); }

    std::uint64_t seed() const { return cli.seed ? *cli.seed : cfg.seed; }

    std::string policy_path() const {
        if (!cli.policy_path.empty()) return cli.policy_path;
        if (cfg.policy_path) return *cfg.policy_path;
        throw usage_error("no policy file: pass --policy or set 'policy' in the config");
    }

    std::optional<std::string> population_path() const {
        if (!cli.population_path.empty()) return cli.population_path;
        return cfg.population_path;
    }

    /// Category count for a fresh state directory.
    std::size_t fresh_n() const {
        if (cfg.n) return *cfg.n;
        if (taxonomy) return taxonomy->bottom_count();
        throw usage_error("cannot size a new state directory: set 'n' or 'taxonomy' "
                          "in the config");
    }
};

// ---------------------------------------------------------------------------
// Event-to-category resolution
// ---------------------------------------------------------------------------

/// Maps a bottom-level classifier result onto the state's category space.
std::optional<std::size_t> map_bottom_to_n(adscope::CategoryId cat, std::size_t n,
                                           const adscope::Taxonomy& tax) {
    if (n == tax.bottom_count()) return cat.index;
    if (n == tax.top_count()) return tax.parent(cat.index);
    return std::nullopt;
}

/// Resolves an event's category to an index in [0, n): explicit index first,
/// then a taxonomy name, then (for visits) the URL classifier. Returns
/// nothing when the event stays uncategorizable.
std::optional<std::size_t> resolve_category(const adscope::EventRecord& rec, std::size_t n,
                                            const Context& ctx, adscope::CategoryCache& cache) {
    if (rec.category) {
        if (*rec.category < n) return rec.category;
        return std::nullopt;
    }
    if (rec.category_name && ctx.taxonomy) {
        const adscope::Taxonomy& tax = *ctx.taxonomy;
        if (n == tax.bottom_count()) {
            return tax.find_bottom(*rec.category_name);
        }
        if (n == tax.top_count()) {
            if (auto top = tax.find_top(*rec.category_name)) return top;
            if (auto bottom = tax.find_bottom(*rec.category_name)) return tax.parent(*bottom);
        }
        return std::nullopt;
    }
    if (rec.kind == adscope::EventRecord::Kind::visit && !rec.url.empty() && ctx.lexicon &&
        ctx.taxonomy) {
        adscope::PageText page;
        page.url = rec.url;
        if (auto cat = adscope::classify_page(page, *ctx.lexicon, cache)) {
            return map_bottom_to_n(*cat, n, *ctx.taxonomy);
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

struct IngestStats {
    std::size_t applied = 0;
    std::size_t malformed = 0;
    std::size_t undecidable = 0;
};

void apply_event(adscope::StateStore& store, const adscope::EventRecord& rec,
                 const Context& ctx, adscope::CategoryCache& cache, IngestStats& stats) {
    adscope::GlobalState& g = store.global();
    if (rec.ts < g.last_ts) {
        std::cerr << "warning: timestamp " << rec.ts << " goes backwards (last was "
                  << g.last_ts << ")\n";
    } else {
        g.last_ts = rec.ts;
    }

    const std::optional<std::size_t> category = resolve_category(rec, g.n, ctx, cache);

    if (rec.kind == adscope::EventRecord::Kind::visit) {
        ++g.visit_count;
        if (rec.mode == adscope::VisitMode::normal && !rec.url.empty()) {
            const std::string site = ctx.suffixes.registrable(rec.url);
            if (!site.empty()) g.visited_domains.insert(site);
        }
        if (!category) {
            ++g.undecidable_events;
            ++stats.undecidable;
            return;
        }
        ++g.actual_counts[*category];
        if (rec.mode != adscope::VisitMode::normal) return; // invisible to selectors

        adscope::PageVisit visit;
        visit.timestamp = rec.ts;
        visit.category = *category;
        visit.mode = adscope::VisitMode::normal;
        visit.tracked_by.insert(rec.tracked_by.begin(), rec.tracked_by.end());
        for (const std::string& id : rec.tracked_by) store.selector(id); // auto-create
        for (auto& [id, state] : store.selectors()) {
            adscope::observe_visit(state, visit, g.window, g.scenario);
        }
        return;
    }

    // Ad observation.
    ++g.ad_count;
    adscope::SelectorState& state = store.selector(rec.selector); // auto-create
    if (!category) {
        ++g.undecidable_events;
        ++stats.undecidable;
        return;
    }
    if (rec.mode == adscope::VisitMode::incognito) {
        adscope::AdObservation ad;
        ad.timestamp = rec.ts;
        ad.selector_id = rec.selector;
        ad.category = category;
        ad.landing_domain = rec.landing;
        ad.mode = adscope::VisitMode::incognito;
        adscope::observe_incognito_ad(state, ad, g.window);
    }
    // Normal-mode ads are what the detector later classifies; ingesting them
    // only tallies the sighting.
}

int cmd_ingest(const Context& ctx, const std::vector<std::string>& event_files) {
    const fs::path dir = ctx.state_dir();
    adscope::StateLock lock(dir);

    adscope::StateStore store;
    if (adscope::StateStore::exists(dir)) {
        store = adscope::StateStore::load(dir);
        if (ctx.scenario_explicit() &&
            ctx.scenario_or(store.global().scenario) != store.global().scenario) {
            throw adscope::data_error("state directory " + dir.string() +
                                      " was created under the other scenario; --scenario "
                                      "cannot change it");
        }
    } else {
        const std::size_t n = ctx.fresh_n();
        store = adscope::StateStore(n, ctx.scenario_or(adscope::Scenario::baseline),
                                    ctx.cfg.window);
    }

    adscope::CategoryCache cache;
    IngestStats stats;
    for (const std::string& file : event_files) {
        std::ifstream in(file);
        if (!in) throw adscope::data_error("cannot read events file " + file);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            adscope::EventRecord rec;
            try {
                rec = adscope::parse_event_line(line);
            } catch (const adscope::data_error& e) {
                std::cerr << "warning: " << file << ":" << lineno << ": " << e.what() << "\n";
                ++stats.malformed;
                continue;
            }
            apply_event(store, rec, ctx, cache, stats);
            ++stats.applied;
        }
    }

    store.save(dir);
    std::cout << "applied " << stats.applied << " events (" << stats.malformed
              << " malformed skipped, " << stats.undecidable << " undecidable) into "
              << dir.string() << "\n";
    std::cout << "selectors tracked: " << store.selectors().size() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

void require_state(const fs::path& dir) {
    if (!adscope::StateStore::exists(dir)) {
        throw adscope::data_error("no state found in " + dir.string() + " (run ingest first)");
    }
}

adscope::StateStore load_store(const fs::path& dir) {
    require_state(dir);
    return adscope::StateStore::load(dir);
}

ordered_json pmf_to_json(const adscope::Pmf& p) { return ordered_json(p); }

int cmd_report(const Context& ctx, const std::string& out_path) {
    const fs::path dir = ctx.state_dir();
    require_state(dir);
    adscope::StateLock lock(dir);
    const adscope::StateStore store = load_store(dir);
    const adscope::GlobalState& g = store.global();

    ordered_json report;
    report["schema"] = kReportSchemaVersion;
    report["kind"] = "detection-report";
    report["scenario"] = g.scenario == adscope::Scenario::baseline ? "baseline" : "paranoid";
    report["n"] = g.n;
    report["window"] = {{"w_min", g.window.w_min}, {"w_max", g.window.w_max}};
    report["visits"] = g.visit_count;
    report["ads"] = g.ad_count;
    report["undecidable_events"] = g.undecidable_events;
    report["selectors"] = ordered_json::array();

    std::vector<std::string> table;
    for (const auto& [id, state] : store.selectors()) {
        ordered_json row;
        row["id"] = id;
        row["pages_observed"] = state.clickstream().size();
        row["incognito_ads_observed"] = state.q_window().size();

        std::string status = "ok";
        if (state.clickstream().size() < g.window.w_min || !state.uclass().initialized()) {
            status = "insufficient interest data";
        } else if (!state.q_hat()) {
            status = "insufficient incognito data";
        }

        double minimax_error = -1.0;
        if (status == "ok") {
            row["interest_class"] = {{"p_min", pmf_to_json(state.uclass().p_min)},
                                     {"p_max", pmf_to_json(state.uclass().p_max)},
                                     {"updates", state.uclass().samples_seen}};
            row["q_hat"] = pmf_to_json(*state.q_hat());
            try {
                const adscope::DetectorRule rule =
                    adscope::solve_minimax(state.uclass(), *state.q_hat(), kSolveBudget);
                const adscope::WorstCaseReport wc =
                    adscope::worst_case_report(rule, state.uclass(), *state.q_hat());
                row["rule"] = {{"zeta", rule.zeta},
                               {"minimax_error", rule.worst_case_error()},
                               {"worst_miss_probability", wc.p1_w},
                               {"false_alarm_probability", wc.p2},
                               {"d_tilde", pmf_to_json(rule.d_tilde)}};
                minimax_error = rule.worst_case_error();
            } catch (const adscope::budget_exceeded&) {
                status = "solver budget exceeded";
            } catch (const adscope::infeasible_error&) {
                status = "class infeasible";
            }
        }
        row["status"] = status;
        report["selectors"].push_back(std::move(row));

        std::ostringstream line;
        line.setf(std::ios::fixed);
        line.precision(4);
        line << "  " << id << ": " << state.clickstream().size() << " pages, "
             << state.q_window().size() << " incognito ads, " << status;
        if (minimax_error >= 0.0) line << ", worst-case error " << minimax_error;
        table.push_back(line.str());
    }

    const fs::path out = out_path.empty() ? dir / "report.json" : fs::path(out_path);
    std::ofstream os(out);
    if (!os) throw adscope::data_error("cannot write report to " + out.string());
    os << report.dump(2) << "\n";

    std::cout << "detection report (" << store.selectors().size() << " selectors, scenario "
              << (g.scenario == adscope::Scenario::baseline ? "baseline" : "paranoid")
              << ")\n";
    for (const std::string& line : table) std::cout << line << "\n";
    std::cout << "written to " << out.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// uniqueness
// ---------------------------------------------------------------------------

/// Lifts a selector's interest class to the population's dimension, using
/// the taxonomy's bottom-to-top aggregation when required.
adscope::UncertaintyClass class_at_dimension(const adscope::UncertaintyClass& u,
                                             std::size_t target, const Context& ctx) {
    if (u.size() == target) return u;
    if (ctx.taxonomy && u.size() == ctx.taxonomy->bottom_count() &&
        target == ctx.taxonomy->top_count()) {
        return adscope::project_class_to_top(u, *ctx.taxonomy);
    }
    throw adscope::data_error("cannot compare a " + std::to_string(u.size()) +
                              "-category profile against a " + std::to_string(target) +
                              "-category population");
}

int cmd_uniqueness(const Context& ctx, const std::string& out_path) {
    const fs::path dir = ctx.state_dir();
    require_state(dir);
    adscope::StateLock lock(dir);
    const adscope::StateStore store = load_store(dir);

    const auto pop_path = ctx.population_path();
    if (!pop_path) {
        throw usage_error("no population file: pass --population or set 'population' "
                          "in the config (create one with 'adscope aggregate')");
    }
    const adscope::PopulationStats pop = adscope::load_population(*pop_path);

    ordered_json report;
    report["schema"] = kReportSchemaVersion;
    report["kind"] = "uniqueness-report";
    report["population_size"] = pop.u_values.size();
    report["selectors"] = ordered_json::array();

    std::cout << "worst-case uniqueness against a population of " << pop.u_values.size()
              << " profiles\n";
    for (const auto& [id, state] : store.selectors()) {
        ordered_json row;
        row["id"] = id;
        if (!state.uclass().initialized()) {
            row["status"] = "insufficient interest data";
            report["selectors"].push_back(std::move(row));
            std::cout << "  " << id << ": insufficient interest data\n";
            continue;
        }
        const adscope::UncertaintyClass u =
            class_at_dimension(state.uclass(), pop.p_bar.size(), ctx);
        const adscope::UniquenessReport r =
            adscope::min_uniqueness(u, pop.p_bar, kSolveBudget, pop.u_values);
        row["status"] = "ok";
        row["u_min_bits"] = r.u_min;
        if (r.percentile) row["percentile"] = *r.percentile;
        row["least_unique_profile"] = pmf_to_json(r.attaining_p);
        report["selectors"].push_back(std::move(row));

        std::ostringstream line;
        line.setf(std::ios::fixed);
        line.precision(4);
        line << "  " << id << ": at least " << r.u_min << " bits from the population profile";
        if (r.percentile) {
            line.precision(1);
            line << " (percentile " << *r.percentile << ")";
        }
        std::cout << line.str() << "\n";
    }

    if (!out_path.empty()) {
        std::ofstream os(out_path);
        if (!os) throw adscope::data_error("cannot write report to " + out_path);
        os << report.dump(2) << "\n";
        std::cout << "written to " << out_path << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// aggregate
// ---------------------------------------------------------------------------

int cmd_aggregate(const Context& ctx, const std::vector<std::string>& dirs,
                  const std::string& out_path) {
    if (out_path.empty()) throw usage_error("aggregate needs --out <population-file>");

    std::vector<adscope::Pmf> profiles;
    std::vector<adscope::UncertaintyClass> classes;
    std::optional<std::size_t> target;

    for (const std::string& d : dirs) {
        const adscope::StateStore store = load_store(d);
        const adscope::GlobalState& g = store.global();
        long long total = 0;
        for (long long c : g.actual_counts) total += c;
        if (total == 0) {
            std::cerr << "warning: " << d << " holds no categorized visits; skipped\n";
            continue;
        }
        adscope::Pmf p = adscope::ml_estimate(g.actual_counts);
        if (ctx.taxonomy && p.size() == ctx.taxonomy->bottom_count()) {
            adscope::Pmf top(ctx.taxonomy->top_count(), 0.0);
            for (std::size_t i = 0; i < p.size(); ++i) top[ctx.taxonomy->parent(i)] += p[i];
            p = std::move(top);
        }
        if (!target) target = p.size();
        if (p.size() != *target) {
            throw adscope::data_error("state directory " + d +
                                      " has a different category dimension than the rest");
        }
        profiles.push_back(std::move(p));
        for (const auto& [id, state] : store.selectors()) {
            if (!state.uclass().initialized()) continue;
            classes.push_back(class_at_dimension(state.uclass(), *target, ctx));
        }
    }
    if (profiles.empty()) {
        throw adscope::data_error("no usable profiles among the given state directories");
    }

    adscope::PopulationStats pop;
    pop.p_bar = adscope::average_profile(profiles);
    for (const adscope::UncertaintyClass& u : classes) {
        pop.u_values.push_back(adscope::min_uniqueness(u, pop.p_bar, kSolveBudget).u_min);
    }
    adscope::save_population(out_path, pop);

    std::cout << "aggregated " << profiles.size() << " profiles (" << classes.size()
              << " selector views) into " << out_path << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// policy-eval
// ---------------------------------------------------------------------------

const char* verdict_name(adscope::Verdict v) {
    switch (v) {
        case adscope::Verdict::Show: return "show";
        case adscope::Verdict::Hide: return "hide";
        default: return "undecidable";
    }
}

int cmd_policy_eval(const Context& ctx, const std::vector<std::string>& event_files,
                    const std::string& out_path) {
    if (!ctx.taxonomy) throw usage_error("policy-eval needs 'taxonomy' in the config");
    const adscope::Taxonomy& tax = *ctx.taxonomy;
    const adscope::PolicySet policies = adscope::parse_policy_file(ctx.policy_path(), tax);

    const fs::path dir = ctx.state_dir();
    require_state(dir);
    adscope::StateLock lock(dir);
    const adscope::StateStore store = load_store(dir);
    const adscope::GlobalState& g = store.global();

    std::optional<adscope::PopulationStats> pop;
    if (auto p = ctx.population_path()) pop = adscope::load_population(*p);

    // Per-selector detection rule and uniqueness percentile, built on demand.
    std::map<std::string, std::optional<adscope::DetectorRule>> rules;
    std::map<std::string, std::optional<double>> percentiles;
    auto rule_for = [&](const std::string& id) -> const std::optional<adscope::DetectorRule>& {
        auto it = rules.find(id);
        if (it != rules.end()) return it->second;
        std::optional<adscope::DetectorRule> rule;
        auto sit = store.selectors().find(id);
        if (sit != store.selectors().end() && sit->second.uclass().initialized() &&
            sit->second.q_hat()) {
            try {
                rule = adscope::solve_minimax(sit->second.uclass(), *sit->second.q_hat(),
                                              kSolveBudget);
            } catch (const adscope::budget_exceeded&) {
            } catch (const adscope::infeasible_error&) {
            }
        }
        return rules.emplace(id, std::move(rule)).first->second;
    };
    auto percentile_for = [&](const std::string& id) -> std::optional<double> {
        auto it = percentiles.find(id);
        if (it != percentiles.end()) return it->second;
        std::optional<double> pct;
        auto sit = store.selectors().find(id);
        if (pop && sit != store.selectors().end() && sit->second.uclass().initialized()) {
            const adscope::UncertaintyClass u =
                class_at_dimension(sit->second.uclass(), pop->p_bar.size(), ctx);
            pct = adscope::min_uniqueness(u, pop->p_bar, kSolveBudget, pop->u_values).percentile;
        }
        percentiles.emplace(id, pct);
        return pct;
    };

    adscope::Rng rng(ctx.seed());
    adscope::CategoryCache cache;
    ordered_json out;
    out["schema"] = kReportSchemaVersion;
    out["kind"] = "policy-eval";
    out["decisions"] = ordered_json::array();
    std::size_t shown = 0, hidden = 0, undecided = 0;

    for (const std::string& file : event_files) {
        std::ifstream in(file);
        if (!in) throw adscope::data_error("cannot read events file " + file);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            adscope::EventRecord rec;
            try {
                rec = adscope::parse_event_line(line);
            } catch (const adscope::data_error& e) {
                std::cerr << "warning: " << file << ":" << lineno << ": " << e.what() << "\n";
                continue;
            }
            if (rec.kind != adscope::EventRecord::Kind::ad ||
                rec.mode != adscope::VisitMode::normal) {
                continue; // policies govern ads shown during normal browsing
            }

            adscope::AdAnnotation a;
            a.selector_id = rec.selector;
            if (auto cat = resolve_category(rec, g.n, ctx, cache)) {
                if (g.n == tax.bottom_count()) {
                    a.category = adscope::CategoryId{*cat, adscope::Level::bottom};
                } else if (g.n == tax.top_count()) {
                    a.category = adscope::CategoryId{*cat, adscope::Level::top};
                }
            }
            const auto& rule = rule_for(rec.selector);
            if (rule && a.category) {
                // The state's category space indexes the rule's d_tilde.
                std::size_t idx = a.category->index;
                a.decision = adscope::classify_ad(*rule, idx, rng);
                a.worst_case_error = rule->worst_case_error();
            }
            if (!rec.landing.empty()) {
                a.retargeted =
                    adscope::is_retargeted(rec.landing, g.visited_domains, ctx.suffixes);
            }
            a.uniqueness_percentile = percentile_for(rec.selector);

            const adscope::PolicyVerdict v = adscope::decide(policies, a, &tax);
            if (v.decision == adscope::Verdict::Show) ++shown;
            else if (v.decision == adscope::Verdict::Hide) ++hidden;
            else ++undecided;

            ordered_json d;
            d["ts"] = rec.ts;
            d["selector"] = rec.selector;
            if (a.category) {
                d["category"] = a.category->level == adscope::Level::bottom
                                    ? tax.bottom_name(a.category->index)
                                    : tax.top_name(a.category->index);
            }
            if (a.decision) {
                d["decision"] = a.decision == adscope::AdClass::InterestBased
                                    ? "interest-based"
                                    : "non-interest-based";
            }
            d["retargeted"] = a.retargeted;
            if (a.uniqueness_percentile) d["uniqueness_percentile"] = *a.uniqueness_percentile;
            d["verdict"] = verdict_name(v.decision);
            if (!v.explanation.empty()) d["because"] = v.explanation;
            out["decisions"].push_back(std::move(d));
        }
    }
    out["shown"] = shown;
    out["hidden"] = hidden;
    out["undecidable"] = undecided;

    std::cout << "policy verdicts over " << (shown + hidden + undecided) << " ads: " << shown
              << " show, " << hidden << " hide, " << undecided << " undecidable\n";
    if (!out_path.empty()) {
        std::ofstream os(out_path);
        if (!os) throw adscope::data_error("cannot write report to " + out_path);
        os << out.dump(2) << "\n";
        std::cout << "written to " << out_path << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

adscope::ScenarioConfig parse_scenario_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw adscope::data_error("cannot read scenario file " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw adscope::data_error("scenario file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw adscope::data_error("scenario file: not a JSON object");
    if (j.contains("schema") && j["schema"].get<int>() != 1) {
        throw adscope::data_error("scenario file: unsupported schema version");
    }

    auto need = [&](const char* key) -> const json& {
        if (!j.contains(key)) {
            throw adscope::data_error(std::string("scenario field '") + key + "' is missing");
        }
        return j[key];
    };
    auto field = [&](const char* key, auto&& read) {
        try {
            read(need(key));
        } catch (const adscope::data_error&) {
            throw;
        } catch (const std::exception& e) {
            throw adscope::data_error(std::string("scenario field '") + key + "': " + e.what());
        }
    };

    adscope::ScenarioConfig cfg;
    field("n", [&](const json& v) { cfg.n = v.get<std::size_t>(); });
    field("t", [&](const json& v) { cfg.t = v.get<adscope::Pmf>(); });
    field("selectors", [&](const json& v) {
        if (!v.is_array()) throw adscope::data_error("scenario field 'selectors': not a list");
        for (const json& s : v) {
            adscope::SelectorSpec spec;
            if (!s.contains("id")) {
                throw adscope::data_error("scenario field 'selectors': entry without id");
            }
            spec.id = s["id"].get<std::string>();
            if (s.contains("coverage")) spec.coverage = s["coverage"].get<double>();
            if (s.contains("alpha")) spec.alpha = s["alpha"].get<double>();
            if (s.contains("ad_rate")) spec.ad_rate = s["ad_rate"].get<double>();
            cfg.selectors.push_back(std::move(spec));
        }
    });
    field("stream_length", [&](const json& v) { cfg.stream_length = v.get<std::size_t>(); });
    field("seed", [&](const json& v) { cfg.seed = v.get<std::uint64_t>(); });
    if (j.contains("scenario")) {
        cfg.scenario = adscope::scenario_from_string(j["scenario"].get<std::string>());
    }
    if (j.contains("rho")) cfg.rho = j["rho"].get<double>();
    if (j.contains("window")) {
        const json& w = j["window"];
        if (w.contains("w_min")) cfg.window.w_min = w["w_min"].get<std::size_t>();
        if (w.contains("w_max")) cfg.window.w_max = w["w_max"].get<std::size_t>();
    }
    cfg.window.rho = cfg.rho;
    if (j.contains("q_override")) cfg.q_override = j["q_override"].get<adscope::Pmf>();
    try {
        cfg.validate();
    } catch (const adscope::data_error& e) {
        throw adscope::data_error(std::string("scenario file ") + path + ": " + e.what());
    }
    return cfg;
}

int cmd_simulate(const Context& ctx, const std::string& scenario_path,
                 const std::string& out_dir) {
    adscope::ScenarioConfig cfg = parse_scenario_config(scenario_path);
    if (ctx.scenario_explicit()) cfg.scenario = ctx.scenario_or(cfg.scenario);
    if (ctx.cli.seed) cfg.seed = *ctx.cli.seed;
    cfg.validate();

    std::vector<adscope::PageVisit> visits;
    std::vector<adscope::GroundTruthAd> ads;
    const adscope::ExperimentReport rep =
        adscope::run_experiment(cfg, kSolveBudget, &visits, &ads);

    const fs::path out(out_dir.empty() ? "." : out_dir);
    fs::create_directories(out);
    {
        std::ofstream os(out / "events.jsonl");
        if (!os) throw adscope::data_error("cannot write " + (out / "events.jsonl").string());
        os << adscope::events_to_jsonl(visits, ads);
    }

    ordered_json r;
    r["schema"] = kReportSchemaVersion;
    r["kind"] = "simulation-report";
    r["scenario"] = cfg.scenario == adscope::Scenario::baseline ? "baseline" : "paranoid";
    r["n"] = cfg.n;
    r["stream_length"] = cfg.stream_length;
    r["seed"] = cfg.seed;
    r["total_ads"] = rep.total_ads;
    r["total_undecidable"] = rep.total_undecidable;
    r["confusion"] = {{"declared_interest_truth_interest", rep.confusion[0][0]},
                      {"declared_interest_truth_noninterest", rep.confusion[0][1]},
                      {"declared_noninterest_truth_interest", rep.confusion[1][0]},
                      {"declared_noninterest_truth_noninterest", rep.confusion[1][1]}};
    r["selectors"] = ordered_json::array();
    for (const adscope::SelectorOutcome& s : rep.selectors) {
        ordered_json row;
        row["id"] = s.id;
        row["rule_available"] = s.rule_available;
        row["q_truth"] = pmf_to_json(s.q_truth);
        if (s.rule_available) {
            row["zeta"] = s.rule.zeta;
            row["predicted_minimax_error"] = s.predicted_minimax_error;
            row["worst_miss_probability"] = s.p1_w;
            row["false_alarm_probability"] = s.p2;
            row["d_tilde"] = pmf_to_json(s.rule.d_tilde);
        }
        row["truth_interest_ads"] = s.truth_interest_total;
        row["truth_noninterest_ads"] = s.truth_noninterest_total;
        row["false_negatives"] = s.false_negatives;
        row["false_positives"] = s.false_positives;
        row["empirical_miss_rate"] = s.fn_rate;
        row["empirical_false_alarm_rate"] = s.fp_rate;
        row["undecidable_ads"] = s.undecidable;
        r["selectors"].push_back(std::move(row));
    }
    {
        std::ofstream os(out / "simulation_report.json");
        if (!os) {
            throw adscope::data_error("cannot write " +
                                      (out / "simulation_report.json").string());
        }
        os << r.dump(2) << "\n";
    }

    std::cout << "simulated " << cfg.stream_length << " visits, " << rep.total_ads
              << " ads across " << rep.selectors.size() << " selectors\n";
    for (const adscope::SelectorOutcome& s : rep.selectors) {
        std::ostringstream line;
        line.setf(std::ios::fixed);
        line.precision(4);
        line << "  " << s.id << ": ";
        if (s.rule_available) {
            line << "predicted worst-case error " << s.predicted_minimax_error
                 << ", empirical miss " << s.fn_rate << ", false alarm " << s.fp_rate;
        } else {
            line << "no detection rule (insufficient data or budget)";
        }
        std::cout << line.str() << "\n";
    }
    std::cout << "wrote " << (out / "events.jsonl").string() << " and "
              << (out / "simulation_report.json").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"adscope: detect, score and filter behaviorally targeted ads"};
    app.require_subcommand(1);
    app.fallthrough();

    CliOverrides cli;
    app.add_option("--config", cli.config_path, "run configuration JSON file");
    app.add_option("--state-dir", cli.state_dir,
                   "state directory (fallback: config, then $ADSCOPE_STATE_DIR)");
    app.add_option("--scenario", cli.scenario, "tracking scenario")
        ->check(CLI::IsMember({"baseline", "paranoid"}));
    std::uint64_t seed_value = 0;
    CLI::Option* seed_opt =
        app.add_option("--seed", seed_value, "seed for randomized classification");

    std::vector<std::string> event_files;
    std::vector<std::string> agg_dirs;
    std::string out_path;
    std::string out_dir;
    std::string scenario_file;

    CLI::App* ingest = app.add_subcommand("ingest", "feed JSONL event logs into the state");
    ingest->fallthrough();
    ingest->add_option("events", event_files, "event files (JSONL)")
        ->required()
        ->check(CLI::ExistingFile);

    CLI::App* report = app.add_subcommand("report", "write the per-selector detection report");
    report->fallthrough();
    report->add_option("--out", out_path, "report path (default: <state-dir>/report.json)");

    CLI::App* uniq = app.add_subcommand("uniqueness", "worst-case uniqueness per selector");
    uniq->fallthrough();
    uniq->add_option("--population", cli.population_path, "population statistics file")
        ->check(CLI::ExistingFile);
    uniq->add_option("--out", out_path, "also write the report as JSON");

    CLI::App* agg = app.add_subcommand("aggregate", "combine state dirs into population stats");
    agg->fallthrough();
    agg->add_option("state_dirs", agg_dirs, "state directories")
        ->required()
        ->check(CLI::ExistingDirectory);
    agg->add_option("--out", out_path, "population statistics output file")->required();

    CLI::App* pol = app.add_subcommand("policy-eval", "evaluate the policy file against ads");
    pol->fallthrough();
    pol->add_option("events", event_files, "event files (JSONL)")
        ->required()
        ->check(CLI::ExistingFile);
    pol->add_option("--policy", cli.policy_path, "policy file")->check(CLI::ExistingFile);
    pol->add_option("--population", cli.population_path, "population statistics file")
        ->check(CLI::ExistingFile);
    pol->add_option("--out", out_path, "also write decisions as JSON");

    CLI::App* sim = app.add_subcommand("simulate", "run a synthetic scenario");
    sim->fallthrough();
    sim->add_option("scenario", scenario_file, "scenario config JSON")
        ->required()
        ->check(CLI::ExistingFile);
    sim->add_option("--out-dir", out_dir, "output directory (default: .)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    if (seed_opt->count() > 0) cli.seed = seed_value;

    try {
        const Context ctx = Context::make(cli);
        if (app.got_subcommand(ingest)) return cmd_ingest(ctx, event_files);
        if (app.got_subcommand(report)) return cmd_report(ctx, out_path);
        if (app.got_subcommand(uniq)) return cmd_uniqueness(ctx, out_path);
        if (app.got_subcommand(agg)) return cmd_aggregate(ctx, agg_dirs, out_path);
        if (app.got_subcommand(pol)) return cmd_policy_eval(ctx, event_files, out_path);
        if (app.got_subcommand(sim)) return cmd_simulate(ctx, scenario_file, out_dir);
        return 1;
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const adscope::data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
