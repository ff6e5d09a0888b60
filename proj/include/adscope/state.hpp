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
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "adscope/errors.hpp"
#include "adscope/pmf.hpp"
#include "adscope/profiles.hpp"
#include "adscope/uniqueness.hpp"

namespace adscope {

// Human-readable structured text with a version header. Floats are written
// with 17 significant digits, which round-trips IEEE doubles exactly.
inline constexpr int kStateFormatVersion = 1;

namespace detail {

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_doubles(std::ostream& out, const std::string& key,
                          const std::vector<double>& values) {
    out << key << ' ' << values.size() << '\n';
    for (std::size_t i = 0; i < values.size(); ++i) {
        out << (i ? " " : "") << format_double(values[i]);
    }
    out << '\n';
}

/// Line-oriented token reader with file/line context in every error.
class StateReader {
public:
    StateReader(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}

    /// Reads the next whitespace-separated token; empty at end of file.
    std::string next() {
        std::string tok;
        if (!(in_ >> tok)) return {};
        return tok;
    }

    std::string expect_key(const std::string& key) {
        std::string tok = next();
        if (tok != key) fail("expected '" + key + "', got '" + tok + "'");
        return tok;
    }

    long long read_int() {
        std::string tok = next();
        try {
            std::size_t pos = 0;
            long long v = std::stoll(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            fail("expected an integer, got '" + tok + "'");
        }
        return 0;
    }

    std::size_t read_count() {
        long long v = read_int();
        if (v < 0) fail("expected a nonnegative count");
        return static_cast<std::size_t>(v);
    }

    double read_double() {
        std::string tok = next();
        try {
            std::size_t pos = 0;
            double v = std::stod(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            fail("expected a real number, got '" + tok + "'");
        }
        return 0.0;
    }

    std::vector<double> read_doubles(const std::string& key) {
        expect_key(key);
        std::size_t count = read_count();
        std::vector<double> values(count);
        for (auto& v : values) v = read_double();
        return values;
    }

    std::deque<std::size_t> read_indices(const std::string& key, std::size_t n) {
        expect_key(key);
        std::size_t count = read_count();
        std::deque<std::size_t> values;
        for (std::size_t i = 0; i < count; ++i) {
            long long v = read_int();
            if (v < 0 || static_cast<std::size_t>(v) >= n) fail("category index out of range");
            values.push_back(static_cast<std::size_t>(v));
        }
        return values;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw data_error(path_ + ": " + what);
    }

private:
    std::istream& in_;
    std::string path_;
};

inline void read_header(StateReader& r, const std::string& kind) {
    r.expect_key("adscope-state");
    if (r.read_int() != kStateFormatVersion) r.fail("unsupported state format version");
    r.expect_key("kind");
    r.expect_key(kind);
}

} // namespace detail

/// Exclusive ownership of a state directory for the lifetime of one
/// process, via an O_EXCL-style lock file that is removed on destruction.
class StateLock {
public:
    explicit StateLock(const std::filesystem::path& dir) {
        std::filesystem::create_directories(dir);
        path_ = dir / ".lock";
        std::FILE* f = std::fopen(path_.string().c_str(), "wx");
        if (f == nullptr) {
            throw data_error("state directory is locked by another process (remove " +
                             path_.string() + " if stale)");
        }
        std::fclose(f);
    }
    ~StateLock() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    StateLock(const StateLock&) = delete;
    StateLock& operator=(const StateLock&) = delete;

private:
    std::filesystem::path path_;
};

/// Cross-selector bookkeeping: the user's actual (full-history) category
/// counts, domains visited (for retargeting checks), lifetime tallies, and
/// the run configuration the directory was created with.
struct GlobalState {
    std::size_t n = 0;
    Scenario scenario = Scenario::baseline;
    WindowConfig window;
    long long last_ts = 0;
    long long visit_count = 0;
    long long ad_count = 0;
    long long undecidable_events = 0;
    std::vector<long long> actual_counts;
    std::set<std::string> visited_domains;
};

/// All persistent state under one directory: one global file plus one file
/// per selector. Selector iteration is ordered by id, so every derived
/// report is stable.
class StateStore {
public:
    StateStore() = default;
    StateStore(std::size_t n, Scenario scenario, const WindowConfig& window) {
        global_.n = n;
        global_.scenario = scenario;
        global_.window = window;
        global_.actual_counts.assign(n, 0);
    }

    GlobalState& global() { return global_; }
    const GlobalState& global() const { return global_; }

    SelectorState& selector(const std::string& id) {
        auto it = selectors_.find(id);
        if (it == selectors_.end()) {
            it = selectors_.emplace(id, SelectorState(id, global_.n)).first;
        }
        return it->second;
    }

    const std::map<std::string, SelectorState>& selectors() const { return selectors_; }
    std::map<std::string, SelectorState>& selectors() { return selectors_; }

    static bool exists(const std::filesystem::path& dir) {
        return std::filesystem::exists(dir / "global.state");
    }

    void save(const std::filesystem::path& dir) const {
        std::filesystem::create_directories(dir);
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            const std::string name = entry.path().filename().string();
            if (name.rfind("selector-", 0) == 0 && entry.path().extension() == ".state") {
                std::filesystem::remove(entry.path());
            }
        }
        save_global(dir / "global.state");
        std::size_t index = 0;
        for (const auto& [id, state] : selectors_) {
            char name[40];
            std::snprintf(name, sizeof name, "selector-%04zu.state", index++);
            save_selector(dir / name, state);
        }
    }

    static StateStore load(const std::filesystem::path& dir) {
        StateStore store;
        store.load_global(dir / "global.state");
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            const std::string name = entry.path().filename().string();
            if (name.rfind("selector-", 0) == 0 && entry.path().extension() == ".state") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        for (const auto& path : files) store.load_selector(path);
        return store;
    }

private:
    void save_global(const std::filesystem::path& path) const {
        std::ofstream out(path);
        if (!out) throw data_error("cannot write " + path.string());
        out << "adscope-state " << kStateFormatVersion << "\nkind global\n";
        out << "n " << global_.n << '\n';
        out << "scenario " << to_string(global_.scenario) << '\n';
        out << "w_min " << global_.window.w_min << '\n';
        out << "w_max " << global_.window.w_max << '\n';
        out << "rho " << detail::format_double(global_.window.rho) << '\n';
        out << "last_ts " << global_.last_ts << '\n';
        out << "visits " << global_.visit_count << '\n';
        out << "ads " << global_.ad_count << '\n';
        out << "undecidable " << global_.undecidable_events << '\n';
        out << "actual_counts " << global_.actual_counts.size() << '\n';
        for (std::size_t i = 0; i < global_.actual_counts.size(); ++i) {
            out << (i ? " " : "") << global_.actual_counts[i];
        }
        out << '\n';
        out << "visited " << global_.visited_domains.size() << '\n';
        for (const auto& d : global_.visited_domains) out << d << '\n';
        out << "end\n";
        if (!out) throw data_error("write failed: " + path.string());
    }

    void load_global(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw data_error("no state at " + path.string() + " (run ingest first)");
        detail::StateReader r(in, path.string());
        detail::read_header(r, "global");
        r.expect_key("n");
        global_.n = r.read_count();
        r.expect_key("scenario");
        global_.scenario = scenario_from_string(r.next());
        r.expect_key("w_min");
        global_.window.w_min = r.read_count();
        r.expect_key("w_max");
        global_.window.w_max = r.read_count();
        r.expect_key("rho");
        global_.window.rho = r.read_double();
        r.expect_key("last_ts");
        global_.last_ts = r.read_int();
        r.expect_key("visits");
        global_.visit_count = r.read_int();
        r.expect_key("ads");
        global_.ad_count = r.read_int();
        r.expect_key("undecidable");
        global_.undecidable_events = r.read_int();
        r.expect_key("actual_counts");
        std::size_t count = r.read_count();
        if (count != global_.n) r.fail("actual_counts length mismatch");
        global_.actual_counts.assign(count, 0);
        for (auto& c : global_.actual_counts) c = r.read_int();
        r.expect_key("visited");
        std::size_t domains = r.read_count();
        for (std::size_t i = 0; i < domains; ++i) {
            std::string d = r.next();
            if (d.empty()) r.fail("truncated visited-domain list");
            global_.visited_domains.insert(d);
        }
        r.expect_key("end");
    }

    void save_selector(const std::filesystem::path& path, const SelectorState& s) const {
        std::ofstream out(path);
        if (!out) throw data_error("cannot write " + path.string());
        out << "adscope-state " << kStateFormatVersion << "\nkind selector\n";
        out << "id " << s.selector_id() << '\n';
        out << "n " << s.dimension() << '\n';
        out << "clickstream " << s.clickstream().size() << '\n';
        for (std::size_t i = 0; i < s.clickstream().size(); ++i) {
            out << (i ? " " : "") << s.clickstream()[i];
        }
        out << '\n';
        out << "q_window " << s.q_window().size() << '\n';
        for (std::size_t i = 0; i < s.q_window().size(); ++i) {
            out << (i ? " " : "") << s.q_window()[i];
        }
        out << '\n';
        out << "samples_seen " << s.uclass().samples_seen << '\n';
        detail::write_doubles(out, "p_min", s.uclass().p_min);
        detail::write_doubles(out, "p_max", s.uclass().p_max);
        if (s.q_hat()) {
            detail::write_doubles(out, "q_hat", *s.q_hat());
        } else {
            out << "q_hat absent\n";
        }
        out << "end\n";
        if (!out) throw data_error("write failed: " + path.string());
    }

    void load_selector(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw data_error("cannot read " + path.string());
        detail::StateReader r(in, path.string());
        detail::read_header(r, "selector");
        r.expect_key("id");
        std::string id = r.next();
        if (id.empty()) r.fail("missing selector id");
        r.expect_key("n");
        std::size_t n = r.read_count();
        if (n != global_.n) r.fail("selector dimension disagrees with global state");
        auto clickstream = r.read_indices("clickstream", n);
        auto q_window = r.read_indices("q_window", n);
        r.expect_key("samples_seen");
        UncertaintyClass uclass;
        uclass.samples_seen = r.read_count();
        uclass.p_min = r.read_doubles("p_min");
        uclass.p_max = r.read_doubles("p_max");
        if (uclass.samples_seen > 0 && (uclass.p_min.size() != n || uclass.p_max.size() != n)) {
            r.fail("uncertainty bounds length mismatch");
        }
        r.expect_key("q_hat");
        std::optional<Pmf> q_hat;
        {
            std::string tok = r.next();
            if (tok != "absent") {
                std::size_t count = 0;
                try {
                    count = static_cast<std::size_t>(std::stoll(tok));
                } catch (const std::exception&) {
                    r.fail("expected q_hat length or 'absent'");
                }
                if (count != n) r.fail("q_hat length mismatch");
                Pmf q(count);
                for (auto& v : q) v = r.read_double();
                q_hat = std::move(q);
            }
        }
        r.expect_key("end");
        SelectorState state(id, n);
        state.restore(std::move(clickstream), std::move(q_window), std::move(uclass),
                      std::move(q_hat));
        selectors_.insert_or_assign(id, std::move(state));
    }

    GlobalState global_;
    std::map<std::string, SelectorState> selectors_;
};

inline void save_population(const std::filesystem::path& path, const PopulationStats& stats) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write " + path.string());
    out << "adscope-state " << kStateFormatVersion << "\nkind population\n";
    out << "n " << stats.p_bar.size() << '\n';
    detail::write_doubles(out, "p_bar", stats.p_bar);
    detail::write_doubles(out, "u_values", stats.u_values);
    out << "end\n";
    if (!out) throw data_error("write failed: " + path.string());
}

inline PopulationStats load_population(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot read population stats at " + path.string());
    detail::StateReader r(in, path.string());
    detail::read_header(r, "population");
    r.expect_key("n");
    std::size_t n = r.read_count();
    PopulationStats stats;
    stats.p_bar = r.read_doubles("p_bar");
    if (stats.p_bar.size() != n) r.fail("p_bar length mismatch");
    stats.u_values = r.read_doubles("u_values");
    r.expect_key("end");
    return stats;
}

} // namespace adscope
