#pragma once

// Run configuration, result tables and the run orchestration behind the
// command-line tool.

#include "bootstrap.hpp"
#include "measures.hpp"
#include "oracles.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace lmgboot {

enum class Mode { bootstrap, oracle_am, oracle_ed, compare, toy };

inline std::string to_string(Mode m) {
    switch(m) {
        case Mode::bootstrap: return "bootstrap";
        case Mode::oracle_am: return "oracle-am";
        case Mode::oracle_ed: return "oracle-ed";
        case Mode::compare: return "compare";
        case Mode::toy: return "toy";
    }
    return "?";
}

inline std::optional<Mode> parse_mode(const std::string &s) {
    for(Mode m : {Mode::bootstrap, Mode::oracle_am, Mode::oracle_ed, Mode::compare, Mode::toy})
        if(to_string(m) == s) return m;
    return std::nullopt;
}

inline const std::vector<std::string> &measure_names() {
    static const std::vector<std::string> names{"concurrence", "tangle", "residual", "qfi", "entropy"};
    return names;
}

enum class Format { csv, json };

struct RunConfig {
    int                              L = 2;
    ModelParams                      params;
    std::optional<std::vector<Spin>> sectors; // nullopt: all
    Mode                             mode = Mode::bootstrap;
    std::set<std::string>            measures{measure_names().begin(), measure_names().end()};
    Tolerances                       tolerances;
    std::string                      output; // empty: no files
    Format                           format = Format::csv;

    [[nodiscard]] bool wants(const std::string &m) const { return measures.contains(m); }
};

// One line per violation.
class ConfigError : public std::runtime_error {
    public:
    explicit ConfigError(std::vector<std::string> reasons) : std::runtime_error(join(reasons)), reasons_(std::move(reasons)) {}
    [[nodiscard]] const std::vector<std::string> &reasons() const { return reasons_; }

    private:
    static std::string join(const std::vector<std::string> &r) {
        std::string s;
        for(const auto &x : r) s += (s.empty() ? "" : "\n") + x;
        return s;
    }
    std::vector<std::string> reasons_;
};

using RawConfig = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if(b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::string json_value_text(const nlohmann::json &v) {
    if(v.is_string()) return v.get<std::string>();
    if(v.is_array()) {
        std::string s;
        for(const auto &x : v) s += (s.empty() ? "" : ",") + json_value_text(x);
        return s;
    }
    return v.dump();
}

inline std::optional<double> to_number(const std::string &s) {
    const std::string t = trim(s);
    if(t.empty()) return std::nullopt;
    char  *end = nullptr;
    double v   = std::strtod(t.c_str(), &end);
    if(end != t.c_str() + t.size()) return std::nullopt;
    return v;
}

inline std::vector<std::string> split_list(std::string s) {
    s = trim(s);
    if(!s.empty() && s.front() == '[') s.erase(0, 1);
    if(!s.empty() && s.back() == ']') s.pop_back();
    std::vector<std::string> out;
    std::stringstream        ss(s);
    std::string              item;
    while(std::getline(ss, item, ',')) {
        item = trim(item);
        if(!item.empty()) out.push_back(item);
    }
    return out;
}

} // namespace detail

// Plain `key=value` tokens (whitespace or newline separated, `#` comments)
// or a JSON object.
inline RawConfig parse_raw_config(const std::string &text) {
    RawConfig         raw;
    const std::string t = detail::trim(text);
    if(!t.empty() && t.front() == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(t);
        } catch(const nlohmann::json::exception &e) { throw ConfigError({std::string("malformed JSON configuration: ") + e.what()}); }
        for(auto it = j.begin(); it != j.end(); ++it) raw[it.key()] = detail::json_value_text(it.value());
        return raw;
    }
    std::stringstream lines(t);
    std::string       line;
    std::vector<std::string> errors;
    while(std::getline(lines, line)) {
        if(auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::stringstream tokens(line);
        std::string       tok;
        while(tokens >> tok) {
            const auto eq = tok.find('=');
            if(eq == std::string::npos || eq == 0) {
                errors.push_back("expected key=value, got '" + tok + "'");
                continue;
            }
            raw[tok.substr(0, eq)] = tok.substr(eq + 1);
        }
    }
    if(!errors.empty()) throw ConfigError(errors);
    return raw;
}

inline RunConfig validate_config(const RawConfig &raw) {
    static const std::set<std::string> known{"L",       "gamma",   "hx",      "hz",  "sectors", "mode",
                                             "measures", "tol_null", "tol_res", "tol_deg", "out",  "format"};
    std::vector<std::string> errors;
    RunConfig                cfg;
    for(const auto &[k, _] : raw)
        if(!known.contains(k)) errors.push_back("unknown key '" + k + "'");

    auto number = [&](const std::string &key, double &target) {
        auto it = raw.find(key);
        if(it == raw.end()) return;
        if(auto v = detail::to_number(it->second))
            target = *v;
        else
            errors.push_back(key + " must be a number, got '" + it->second + "'");
    };

    if(auto it = raw.find("L"); it != raw.end()) {
        auto v = detail::to_number(it->second);
        if(!v || *v != std::floor(*v))
            errors.push_back("L must be an integer, got '" + it->second + "'");
        else
            cfg.L = static_cast<int>(*v);
    }
    if(cfg.L < 1 || cfg.L > max_system_size) errors.push_back("L must lie in [1, " + std::to_string(max_system_size) + "], got " + std::to_string(cfg.L));
    number("gamma", cfg.params.gamma);
    number("hx", cfg.params.hx);
    number("hz", cfg.params.hz);
    number("tol_null", cfg.tolerances.null_space);
    number("tol_res", cfg.tolerances.residual);
    number("tol_deg", cfg.tolerances.degeneracy);
    for(const auto &[key, val] : {std::pair{"tol_null", cfg.tolerances.null_space}, std::pair{"tol_res", cfg.tolerances.residual},
                                  std::pair{"tol_deg", cfg.tolerances.degeneracy}})
        if(!(val > 0.0)) errors.push_back(std::string(key) + " must be positive");

    if(auto it = raw.find("mode"); it != raw.end()) {
        if(auto m = parse_mode(it->second))
            cfg.mode = *m;
        else
            errors.push_back("mode must be one of bootstrap|oracle-am|oracle-ed|compare|toy, got '" + it->second + "'");
    }
    if(auto it = raw.find("sectors"); it != raw.end() && detail::trim(it->second) != "all") {
        std::vector<Spin> list;
        for(const auto &item : detail::split_list(it->second)) {
            auto v = detail::to_number(item);
            if(!v) {
                errors.push_back("sector '" + item + "' is not a number");
                continue;
            }
            try {
                const Spin l = Spin::from_double(*v);
                if(cfg.L >= 1 && cfg.L <= max_system_size) check_admissible(cfg.L, l);
                list.push_back(l);
            } catch(const std::invalid_argument &e) { errors.push_back(std::string("sectors: ") + e.what()); }
        }
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
        if(list.empty() && errors.empty()) errors.push_back("sectors list is empty");
        cfg.sectors = list;
    }
    if(auto it = raw.find("measures"); it != raw.end() && detail::trim(it->second) != "all") {
        cfg.measures.clear();
        for(const auto &item : detail::split_list(it->second)) {
            if(std::find(measure_names().begin(), measure_names().end(), item) == measure_names().end())
                errors.push_back("unknown measure '" + item + "'");
            else
                cfg.measures.insert(item);
        }
    }
    if(auto it = raw.find("format"); it != raw.end()) {
        if(it->second == "csv")
            cfg.format = Format::csv;
        else if(it->second == "json")
            cfg.format = Format::json;
        else
            errors.push_back("format must be csv or json, got '" + it->second + "'");
    }
    if(auto it = raw.find("out"); it != raw.end()) cfg.output = it->second;
    if(cfg.mode == Mode::oracle_ed && cfg.L > ed::default_cap)
        errors.push_back("oracle-ed is capped at L=" + std::to_string(ed::default_cap));

    if(!errors.empty()) throw ConfigError(errors);
    return cfg;
}

inline RunConfig validate_config(const std::string &text) { return validate_config(parse_raw_config(text)); }

// ---------------------------------------------------------------------------

struct ResultRow {
    double                E = 0.0;
    std::optional<Spin>   l;
    bool                  degenerate   = false;
    int                   cluster_size = 1;
    double                residual_commutator = 0.0;
    double                residual_eigen      = 0.0;
    double                residual_symmetry   = 0.0;
    std::optional<double> C, tau, delta_tau, S, F_x, F_y, F_z, F_sum, F_max;
    std::optional<int>    depth;
    std::string           warnings; // semicolon-joined

    void warn(const std::string &w) {
        if(warnings.find(w) != std::string::npos) return;
        warnings += (warnings.empty() ? "" : ";") + w;
    }

    bool operator==(const ResultRow &) const = default;
};

inline const std::vector<std::string> &row_columns() {
    static const std::vector<std::string> cols{"E",     "l",       "degenerate", "cluster_size", "residual_commutator",
                                               "residual_eigen", "residual_symmetry", "C", "tau", "delta_tau",
                                               "S",     "F_x",     "F_y",        "F_z",          "F_sum",
                                               "F_max", "depth",   "warnings"};
    return cols;
}

namespace detail {

inline std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v == 0.0 ? 0.0 : v); // no "-0"
    return buf;
}

inline double round12(double v) { return std::strtod(fmt12(v).c_str(), nullptr); }

inline std::string csv_escape(const std::string &s) {
    if(s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for(char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

} // namespace detail

// Same row after the 12-significant-digit serialization.
inline ResultRow rounded(ResultRow r) {
    auto rd  = [](double &v) { v = detail::round12(v); };
    auto rdo = [](std::optional<double> &v) {
        if(v) *v = detail::round12(*v);
    };
    rd(r.E);
    rd(r.residual_commutator);
    rd(r.residual_eigen);
    rd(r.residual_symmetry);
    for(auto *o : {&r.C, &r.tau, &r.delta_tau, &r.S, &r.F_x, &r.F_y, &r.F_z, &r.F_sum, &r.F_max}) rdo(*o);
    return r;
}

inline void write_csv(std::ostream &os, const std::vector<ResultRow> &rows) {
    const auto &cols = row_columns();
    for(std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    auto opt = [](const std::optional<double> &v) { return v ? detail::fmt12(*v) : std::string(); };
    for(const auto &r : rows) {
        os << detail::fmt12(r.E) << ',' << (r.l ? detail::fmt12(r.l->value()) : "") << ',' << (r.degenerate ? 1 : 0) << ','
           << r.cluster_size << ',' << detail::fmt12(r.residual_commutator) << ',' << detail::fmt12(r.residual_eigen) << ','
           << detail::fmt12(r.residual_symmetry) << ',' << opt(r.C) << ',' << opt(r.tau) << ',' << opt(r.delta_tau) << ','
           << opt(r.S) << ',' << opt(r.F_x) << ',' << opt(r.F_y) << ',' << opt(r.F_z) << ',' << opt(r.F_sum) << ','
           << opt(r.F_max) << ',' << (r.depth ? std::to_string(*r.depth) : "") << ',' << detail::csv_escape(r.warnings) << '\n';
    }
}

// Numbers are emitted as 12-significant-digit literals so the JSON and CSV
// tables agree digit for digit.
inline std::string to_json_text(const std::vector<ResultRow> &rows) {
    auto num = [](double v) { return detail::fmt12(v); };
    auto opt = [&](const std::optional<double> &v) { return v ? num(*v) : std::string("null"); };
    std::string out = "[";
    for(std::size_t i = 0; i < rows.size(); ++i) {
        const auto &r = rows[i];
        out += i ? ",\n  {" : "\n  {";
        out += "\"E\": " + num(r.E);
        out += ", \"l\": " + (r.l ? num(r.l->value()) : std::string("null"));
        out += ", \"degenerate\": " + std::string(r.degenerate ? "true" : "false");
        out += ", \"cluster_size\": " + std::to_string(r.cluster_size);
        out += ", \"residual_commutator\": " + num(r.residual_commutator);
        out += ", \"residual_eigen\": " + num(r.residual_eigen);
        out += ", \"residual_symmetry\": " + num(r.residual_symmetry);
        out += ", \"C\": " + opt(r.C) + ", \"tau\": " + opt(r.tau) + ", \"delta_tau\": " + opt(r.delta_tau);
        out += ", \"S\": " + opt(r.S) + ", \"F_x\": " + opt(r.F_x) + ", \"F_y\": " + opt(r.F_y) + ", \"F_z\": " + opt(r.F_z);
        out += ", \"F_sum\": " + opt(r.F_sum) + ", \"F_max\": " + opt(r.F_max);
        out += ", \"depth\": " + (r.depth ? std::to_string(*r.depth) : std::string("null"));
        out += ", \"warnings\": " + nlohmann::json(r.warnings).dump() + "}";
    }
    out += rows.empty() ? "]\n" : "\n]\n";
    return out;
}

inline std::vector<ResultRow> rows_from_json(const std::string &text) {
    const auto             j = nlohmann::json::parse(text);
    std::vector<ResultRow> rows;
    auto opt = [](const nlohmann::json &o, const char *k) -> std::optional<double> {
        if(!o.contains(k) || o.at(k).is_null()) return std::nullopt;
        return o.at(k).get<double>();
    };
    for(const auto &o : j) {
        ResultRow r;
        r.E = o.at("E").get<double>();
        if(!o.at("l").is_null()) r.l = Spin::from_double(o.at("l").get<double>());
        r.degenerate          = o.at("degenerate").get<bool>();
        r.cluster_size        = o.at("cluster_size").get<int>();
        r.residual_commutator = o.at("residual_commutator").get<double>();
        r.residual_eigen      = o.at("residual_eigen").get<double>();
        r.residual_symmetry   = o.at("residual_symmetry").get<double>();
        r.C                   = opt(o, "C");
        r.tau                 = opt(o, "tau");
        r.delta_tau           = opt(o, "delta_tau");
        r.S                   = opt(o, "S");
        r.F_x                 = opt(o, "F_x");
        r.F_y                 = opt(o, "F_y");
        r.F_z                 = opt(o, "F_z");
        r.F_sum               = opt(o, "F_sum");
        r.F_max               = opt(o, "F_max");
        if(!o.at("depth").is_null()) r.depth = o.at("depth").get<int>();
        r.warnings = o.at("warnings").get<std::string>();
        rows.push_back(std::move(r));
    }
    return rows;
}

// (E, l, value) columns for one measure; rows without the value are skipped.
inline void write_plot_data(std::ostream &os, const std::vector<ResultRow> &rows, std::optional<double> ResultRow::*field) {
    os << "E,l,value\n";
    for(const auto &r : rows)
        if(r.*field) os << detail::fmt12(r.E) << ',' << (r.l ? detail::fmt12(r.l->value()) : "") << ',' << detail::fmt12(*(r.*field)) << '\n';
}

inline void sort_rows(std::vector<ResultRow> &rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const ResultRow &a, const ResultRow &b) {
        const int la = a.l ? a.l->twice : -1, lb = b.l ? b.l->twice : -1;
        if(la != lb) return la < lb;
        return a.E < b.E;
    });
}

// ---------------------------------------------------------------------------

// Thread count for sector solves, from LMGBOOT_THREADS (default 1).
inline unsigned thread_count() {
    if(const char *env = std::getenv("LMGBOOT_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if(n > 0) return static_cast<unsigned>(n);
    }
    return 1;
}

// out[i] = f(i) for i in [0, n), computed on up to `threads` workers.
template<typename T, typename F>
std::vector<T> parallel_map(std::size_t n, unsigned threads, F &&f) {
    std::vector<T> out(n);
    if(threads <= 1 || n <= 1) {
        for(std::size_t i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::vector<std::jthread> pool;
    for(unsigned t = 0; t < std::min<std::size_t>(threads, n); ++t)
        pool.emplace_back([&, t] {
            for(std::size_t i = t; i < n; i += threads) out[i] = f(i);
        });
    pool.clear(); // joins
    return out;
}

// Fills the measure columns of a row from collective moments.
inline void fill_measures(ResultRow &row, const MomentSet &m, const RunConfig &cfg) {
    const MeasureReport rep = measure_all(m);
    if(cfg.wants("tangle")) row.tau = rep.tangle;
    if(cfg.wants("entropy")) row.S = rep.entropy;
    if(cfg.wants("qfi")) {
        row.F_x   = rep.qfi.f_x;
        row.F_y   = rep.qfi.f_y;
        row.F_z   = rep.qfi.f_z;
        row.F_sum = rep.qfi.f_sum;
        row.F_max = rep.qfi.f_max;
        row.depth = rep.qfi.depth;
    }
    if(rep.concurrence && (cfg.wants("concurrence") || cfg.wants("residual"))) {
        if(cfg.wants("concurrence")) row.C = rep.concurrence->value;
        if(cfg.wants("residual")) row.delta_tau = rep.residual->value;
        if(rep.assumed_symmetric) row.warn("assumed_symmetric");
        if(rep.concurrence->non_physical) row.warn("non_physical_rdm");
        if(cfg.wants("residual") && rep.residual->ckw_violated) row.warn("ckw_violated");
    }
}

struct RunOutcome {
    int                      exit_code = 0;
    std::vector<ResultRow>   rows;
    std::vector<std::string> files;
    std::vector<std::string> warnings; // run-level, also mirrored in rows
    double                   max_residual   = 0.0;
    double                   max_energy_gap = 0.0; // compare mode
};

namespace detail {

inline std::vector<Spin> selected_sectors(const RunConfig &cfg) {
    if(cfg.sectors) return *cfg.sectors;
    std::vector<Spin> out;
    for(const auto &s : lmgboot::sectors(cfg.L)) out.push_back(s.l);
    return out;
}

inline std::vector<ResultRow> bootstrap_rows(const RunConfig &cfg, RunOutcome &outcome, std::vector<SectorResult> *keep = nullptr) {
    LmgBootstrap boot(cfg.L, cfg.tolerances);
    boot.prepare();
    const auto sel     = selected_sectors(cfg);
    // Slices are prepared above, so concurrent solves only read the engine.
    std::vector<SectorResult> solved = parallel_map<SectorResult>(sel.size(), thread_count(), [&](std::size_t i) {
        return boot.solve_sector(cfg.params, sel[i]);
    });
    std::vector<ResultRow> rows;
    for(std::size_t i = 0; i < sel.size(); ++i) {
        const auto &res = solved[i];
        for(const auto &d : res.diagnostics) {
            const std::string w = to_string(d.kind);
            if(d.kind == Diagnostic::wrong_state_count) {
                outcome.warnings.push_back("sector l=" + sel[i].str() + ": " + w + " (" + std::to_string(res.solutions.size()) + " of " +
                                           std::to_string(sel[i].dim()) + ")");
                outcome.exit_code = 3;
            } else {
                outcome.warnings.push_back("sector l=" + sel[i].str() + ": " + w + " at E=" + fmt12(d.energy));
            }
        }
        for(const auto &s : res.solutions) {
            ResultRow row;
            row.E                   = s.energy;
            row.l                   = s.sector;
            row.degenerate          = s.degenerate();
            row.cluster_size        = s.cluster_size;
            row.residual_commutator = s.residual_commutator;
            row.residual_eigen      = s.residual_eigen;
            row.residual_symmetry   = s.residual_symmetry;
            outcome.max_residual    = std::max({outcome.max_residual, s.residual_commutator, s.residual_eigen, s.residual_symmetry});
            if(s.degenerate()) row.warn("degenerate_cluster");
            if(res.has(Diagnostic::wrong_state_count)) row.warn("wrong_state_count");
            try {
                fill_measures(row, moments_from_solution(s, boot.basis()), cfg);
            } catch(const HermiticityViolated &) {
                row.warn("hermiticity_violated");
                outcome.exit_code = 3;
            }
            rows.push_back(std::move(row));
        }
    }
    if(keep) *keep = std::move(solved);
    return rows;
}

inline std::vector<ResultRow> oracle_am_rows(const RunConfig &cfg) {
    std::vector<ResultRow> rows;
    for(const Spin l : selected_sectors(cfg)) {
        const auto spec = angular_momentum_solve(cfg.L, cfg.params, l);
        for(int k = 0; k < spec.size(); ++k) {
            ResultRow row;
            row.E                 = spec.energies[k];
            row.l                 = l;
            const auto [lo, hi]   = spec.cluster_range(k, cfg.tolerances.degeneracy);
            row.cluster_size      = hi - lo;
            row.degenerate        = row.cluster_size > 1;
            if(row.degenerate) row.warn("degenerate_cluster");
            fill_measures(row, spec.cluster_moments(k, cfg.tolerances.degeneracy), cfg);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

// Exact site-resolved quantities: C = C_12, τ = 4 det ρ_1,
// Δτ = τ − Σ_j C_1j²; QFI from collective moments.
inline std::vector<ResultRow> oracle_ed_rows(const RunConfig &cfg) {
    const auto sel    = selected_sectors(cfg);
    const auto states = dense_ed(cfg.L, cfg.params);
    std::vector<ResultRow> rows;
    for(const auto &st : states) {
        if(std::find(sel.begin(), sel.end(), st.casimir_l) == sel.end()) continue;
        ResultRow row;
        row.E          = st.energy;
        row.l          = st.casimir_l;
        row.degenerate = st.degenerate;
        if(st.degenerate) row.warn("degenerate_cluster");
        const auto m = ed::collective_moments(cfg.L, st.amplitudes, st.casimir_l);
        RunConfig  qcfg = cfg;
        qcfg.measures   = {};
        if(cfg.wants("qfi")) qcfg.measures.insert("qfi");
        fill_measures(row, m, qcfg);
        const double tau = std::clamp(4.0 * ed::one_site_rdm(cfg.L, st.amplitudes, 0).determinant().real(), 0.0, 1.0);
        if(cfg.wants("tangle")) row.tau = tau;
        if(cfg.wants("entropy")) row.S = entropy_from_tangle(tau);
        if(cfg.L >= 2) {
            const double c12 = concurrence(ed::two_site_rdm(cfg.L, st.amplitudes, 0, 1)).value;
            if(cfg.wants("concurrence")) row.C = c12;
            if(cfg.wants("residual")) {
                double sum = 0.0;
                for(int j = 1; j < cfg.L; ++j) {
                    const double c = concurrence(ed::two_site_rdm(cfg.L, st.amplitudes, 0, j)).value;
                    sum += c * c;
                }
                row.delta_tau = tau - sum;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<ResultRow> toy_rows(const RunConfig &cfg, RunOutcome &outcome) {
    const auto res = solve_toy_model(cfg.L, cfg.tolerances);
    for(const auto &d : res.diagnostics) {
        outcome.warnings.push_back("toy: " + to_string(d.kind));
        if(d.kind == Diagnostic::wrong_state_count) outcome.exit_code = 3;
    }
    std::vector<ResultRow> rows;
    for(const auto &s : res.solutions) {
        ResultRow row;
        row.E                   = s.energy;
        row.residual_commutator = s.residual_commutator;
        row.residual_eigen      = s.residual_eigen;
        outcome.max_residual    = std::max({outcome.max_residual, s.residual_commutator, s.residual_eigen});
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string stem_of(const std::string &path) {
    const std::filesystem::path p(path);
    return (p.parent_path() / p.stem()).string();
}

} // namespace detail

// Energy agreement threshold used by compare mode.
inline constexpr double compare_tolerance = 1e-8;

inline RunOutcome run(const RunConfig &cfg, std::ostream &summary) {
    const auto t0 = std::chrono::steady_clock::now();
    RunOutcome out;
    switch(cfg.mode) {
        case Mode::bootstrap: out.rows = detail::bootstrap_rows(cfg, out); break;
        case Mode::oracle_am: out.rows = detail::oracle_am_rows(cfg); break;
        case Mode::oracle_ed: out.rows = detail::oracle_ed_rows(cfg); break;
        case Mode::toy: out.rows = detail::toy_rows(cfg, out); break;
        case Mode::compare: {
            out.rows = detail::bootstrap_rows(cfg, out);
            for(const Spin l : detail::selected_sectors(cfg)) {
                const auto        spec = angular_momentum_solve(cfg.L, cfg.params, l);
                std::vector<double> boot;
                for(const auto &r : out.rows)
                    if(r.l == l) boot.push_back(r.E);
                std::sort(boot.begin(), boot.end());
                if(static_cast<int>(boot.size()) != spec.size()) {
                    out.warnings.push_back("sector l=" + l.str() + ": state count differs from oracle");
                    out.max_energy_gap = std::numeric_limits<double>::infinity();
                    continue;
                }
                for(int k = 0; k < spec.size(); ++k)
                    out.max_energy_gap = std::max(out.max_energy_gap, std::abs(boot[static_cast<std::size_t>(k)] - spec.energies[k]));
            }
            summary << "max |E_bootstrap - E_oracle| = " << detail::fmt12(out.max_energy_gap) << '\n';
            if(!(out.max_energy_gap < compare_tolerance)) out.exit_code = 3;
            break;
        }
    }
    sort_rows(out.rows);

    if(!cfg.output.empty()) {
        {
            std::ofstream f(cfg.output, std::ios::out | std::ios::trunc | std::ios::binary);
            if(!f) throw std::runtime_error("cannot open output file " + cfg.output);
            if(cfg.format == Format::csv)
                write_csv(f, out.rows);
            else
                f << to_json_text(out.rows);
            out.files.push_back(cfg.output);
        }
        if(cfg.mode != Mode::toy) {
            const std::vector<std::pair<std::string, std::optional<double> ResultRow::*>> plots{
                {"concurrence", &ResultRow::C}, {"tangle", &ResultRow::tau},   {"residual", &ResultRow::delta_tau},
                {"entropy", &ResultRow::S},     {"qfi_max", &ResultRow::F_max}, {"qfi_sum", &ResultRow::F_sum}};
            for(const auto &[name, field] : plots) {
                const std::string measure = name.starts_with("qfi") ? "qfi" : name;
                if(!cfg.wants(measure)) continue;
                const std::string path = detail::stem_of(cfg.output) + "_" + name + ".csv";
                std::ofstream     f(path, std::ios::out | std::ios::trunc | std::ios::binary);
                if(!f) throw std::runtime_error("cannot open output file " + path);
                write_plot_data(f, out.rows, field);
                out.files.push_back(path);
            }
        }
    }

    std::map<std::string, int> counts;
    for(const auto &r : out.rows) ++counts[r.l ? r.l->str() : "-"];
    summary << "mode=" << to_string(cfg.mode) << " L=" << cfg.L << " gamma=" << detail::fmt12(cfg.params.gamma)
            << " hx=" << detail::fmt12(cfg.params.hx) << " hz=" << detail::fmt12(cfg.params.hz) << '\n';
    for(const auto &[l, n] : counts) summary << "  sector l=" << l << ": " << n << " states\n";
    summary << "  max residual: " << detail::fmt12(out.max_residual) << '\n';
    for(const auto &w : out.warnings) summary << "  warning: " << w << '\n';
    std::map<std::string, int> row_warnings;
    for(const auto &r : out.rows) {
        std::stringstream ss(r.warnings);
        std::string       w;
        while(std::getline(ss, w, ';'))
            if(!w.empty()) ++row_warnings[w];
    }
    for(const auto &[w, n] : row_warnings) summary << "  rows flagged " << w << ": " << n << '\n';
    summary << "  wall time: " << std::fixed << std::setprecision(3)
            << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s\n"
            << std::defaultfloat;
    return out;
}

} // namespace lmgboot
