// harness.hpp — experiment configuration, method orchestration and
// machine-readable reporting (report.json, rates.csv, sweep tables).

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qkramers/fp.hpp"
#include "qkramers/langevin.hpp"
#include "qkramers/rates.hpp"

namespace qkramers {

inline constexpr const char* kVersion = "qkramers 1.0.0";

// Config syntax or unknown-key problem; maps to exit code 2.
struct ConfigError : std::runtime_error {
    int line = 0;
    ConfigError(int line_, const std::string& what_)
        : std::runtime_error("config line " + std::to_string(line_) + ": " + what_), line(line_) {}
    explicit ConfigError(const std::string& what_) : std::runtime_error(what_) {}
};

// Violated validity guard; maps to exit code 3.
struct GuardError : std::runtime_error {
    std::string constraint;
    explicit GuardError(const std::string& constraint_)
        : std::runtime_error("validity guard violated: " + constraint_), constraint(constraint_) {}
};

enum class SweepAxis { none, ys, gamma };

struct ExperimentConfig {
    double ys = 10.0;
    double gamma = 0.01; // gamma / Omega0
    std::vector<Method> methods = {Method::asymptotic,     Method::perturbative,
                                   Method::laguerre_root,  Method::kramers_quadrature,
                                   Method::fp_numeric,     Method::tunnel_isolated,
                                   Method::tunnel_env};
    std::uint64_t seed = 20260808;
    std::string out;
    int ntraj = 2000;
    int grid_cells = 4000;
    double cutoff = 50.0;
    double tmax = 0.0; // 0: derived from the expected rate
    double dt = 0.0;   // 0: default_timestep rule
    SweepAxis sweep_axis = SweepAxis::none;
    std::vector<double> sweep_values;
    bool write_profile = true;
    bool fp_snapshots = false;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double parse_number(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(line, "invalid number '" + v + "'");
    }
}

inline std::uint64_t parse_seed(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(line, "invalid seed '" + v + "'");
    }
}

inline bool parse_bool(const std::string& v, int line) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(line, "invalid boolean '" + v + "'");
}

inline std::vector<std::string> split_csv(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

inline std::vector<Method> parse_methods(const std::string& v, int line) {
    std::vector<Method> out;
    for (const std::string& tok : split_csv(v)) {
        if (tok == "deterministic") {
            for (Method m : {Method::asymptotic, Method::perturbative, Method::laguerre_root,
                             Method::kramers_quadrature, Method::fp_numeric,
                             Method::tunnel_isolated, Method::tunnel_env})
                out.push_back(m);
            continue;
        }
        if (tok == "all") {
            for (Method m : {Method::asymptotic, Method::perturbative, Method::laguerre_root,
                             Method::kramers_quadrature, Method::fp_numeric, Method::langevin_mc,
                             Method::tunnel_isolated, Method::tunnel_env})
                out.push_back(m);
            continue;
        }
        const auto m = method_from_name(tok);
        if (!m) throw ConfigError(line, "unknown method '" + tok + "'");
        out.push_back(*m);
    }
    // dedupe, preserving first occurrence
    std::vector<Method> uniq;
    for (Method m : out)
        if (std::find(uniq.begin(), uniq.end(), m) == uniq.end()) uniq.push_back(m);
    return uniq;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace detail

inline bool needs_eigenvalue_barrier(const std::vector<Method>& methods) {
    for (Method m : methods)
        if (m == Method::perturbative || m == Method::laguerre_root ||
            m == Method::kramers_quadrature || m == Method::fp_numeric)
            return true;
    return false;
}

// Guard checks shared by the validator and by programmatic callers.
inline void check_guards(const ExperimentConfig& c) {
    if (!(c.ys > 0.0)) throw GuardError("ys > 0");
    if (!(c.gamma > 0.0)) throw GuardError("gamma > 0");
    if (c.gamma > 0.1) throw GuardError("gamma/Omega0 <= 0.1");
    if (c.ys < 2.0 && needs_eigenvalue_barrier(c.methods))
        throw GuardError("ys >= 2 for eigenvalue methods");
    if (c.ntraj < 1) throw GuardError("ntraj >= 1");
    if (c.grid_cells < 100) throw GuardError("grid_cells >= 100");
    if (!(c.cutoff > 0.0)) throw GuardError("cutoff > 0");
    if (c.tmax < 0.0) throw GuardError("tmax >= 0");
    if (c.dt < 0.0) throw GuardError("dt >= 0");
}

// Line-oriented `key = value` configuration; '#' starts a comment, unknown
// keys are rejected with the offending line number, defaults fill in the
// rest, then the validity guards run.
inline ExperimentConfig validate_config(const std::string& text) {
    ExperimentConfig c;
    std::stringstream ss(text);
    std::string raw;
    int lineno = 0;
    bool methods_set = false;
    while (std::getline(ss, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        const std::string line = detail::trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(lineno, "expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(lineno, "missing key");
        if (key == "ys") {
            c.ys = detail::parse_number(val, lineno);
        } else if (key == "gamma") {
            c.gamma = detail::parse_number(val, lineno);
        } else if (key == "methods") {
            c.methods = detail::parse_methods(val, lineno);
            methods_set = true;
            if (c.methods.empty()) throw ConfigError(lineno, "methods list is empty");
        } else if (key == "seed") {
            c.seed = detail::parse_seed(val, lineno);
        } else if (key == "out") {
            c.out = val;
        } else if (key == "ntraj") {
            c.ntraj = static_cast<int>(detail::parse_number(val, lineno));
        } else if (key == "grid_cells") {
            c.grid_cells = static_cast<int>(detail::parse_number(val, lineno));
        } else if (key == "cutoff") {
            c.cutoff = detail::parse_number(val, lineno);
        } else if (key == "tmax") {
            c.tmax = detail::parse_number(val, lineno);
        } else if (key == "dt") {
            c.dt = detail::parse_number(val, lineno);
        } else if (key == "sweep_axis") {
            if (val == "ys")
                c.sweep_axis = SweepAxis::ys;
            else if (val == "gamma")
                c.sweep_axis = SweepAxis::gamma;
            else
                throw ConfigError(lineno, "sweep_axis must be 'ys' or 'gamma'");
        } else if (key == "sweep_values") {
            c.sweep_values.clear();
            for (const std::string& tok : detail::split_csv(val))
                c.sweep_values.push_back(detail::parse_number(tok, lineno));
        } else if (key == "write_profile") {
            c.write_profile = detail::parse_bool(val, lineno);
        } else if (key == "fp_snapshots") {
            c.fp_snapshots = detail::parse_bool(val, lineno);
        } else {
            throw ConfigError(lineno, "unknown key '" + key + "'");
        }
    }
    if (methods_set && c.methods.empty()) throw ConfigError("methods list is empty");
    check_guards(c);
    return c;
}

// Canonical echo: every key in a fixed order, defaults included. Hashing
// this string identifies the experiment.
inline std::string echo_config(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "ys = " << detail::format_double(c.ys) << '\n';
    os << "gamma = " << detail::format_double(c.gamma) << '\n';
    os << "methods = ";
    for (std::size_t i = 0; i < c.methods.size(); ++i)
        os << (i ? "," : "") << method_name(c.methods[i]);
    os << '\n';
    os << "seed = " << c.seed << '\n';
    os << "out = " << c.out << '\n';
    os << "ntraj = " << c.ntraj << '\n';
    os << "grid_cells = " << c.grid_cells << '\n';
    os << "cutoff = " << detail::format_double(c.cutoff) << '\n';
    os << "tmax = " << detail::format_double(c.tmax) << '\n';
    os << "dt = " << detail::format_double(c.dt) << '\n';
    os << "sweep_axis = "
       << (c.sweep_axis == SweepAxis::ys ? "ys"
                                         : c.sweep_axis == SweepAxis::gamma ? "gamma" : "none")
       << '\n';
    os << "sweep_values = ";
    for (std::size_t i = 0; i < c.sweep_values.size(); ++i)
        os << (i ? "," : "") << detail::format_double(c.sweep_values[i]);
    os << '\n';
    os << "write_profile = " << (c.write_profile ? "true" : "false") << '\n';
    os << "fp_snapshots = " << (c.fp_snapshots ? "true" : "false") << '\n';
    return os.str();
}

inline std::string config_hash(const ExperimentConfig& c) {
    // FNV-1a 64
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : echo_config(c)) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct MethodEntry {
    Method method = Method::asymptotic;
    std::optional<RateResult> result;
    std::string error; // empty when the method completed
};

struct ComparisonReport {
    ExperimentConfig config;
    std::vector<MethodEntry> entries;
    std::map<std::string, double> ratios;
    std::vector<std::string> warnings;
    std::string hash;
    std::optional<EnsembleResult> ensemble; // populated when langevin_mc ran
};

namespace detail {

inline RateResult run_fp_numeric(const ExperimentConfig& c) {
    const EnergyGrid grid(c.ys, c.grid_cells);
    const DiscreteOperator op = build_operator(grid, c.gamma, 0.5); // eps0 in Omega0=hbar=1 units
    const LowestMode lm = lowest_mode(op);
    RateResult r;
    r.method = Method::fp_numeric;
    r.rate = lm.rate;
    r.rbar = lm.rate / (2.0 * c.gamma);
    r.diagnostics["grid_cells"] = static_cast<double>(c.grid_cells);
    return r;
}

inline double auto_horizon(const ExperimentConfig& c) {
    const double guess = 2.0 * c.gamma * c.ys * std::exp(-c.ys);
    return std::min(4.0 / std::max(guess, 1e-12), 1e9);
}

inline RateResult run_langevin(const ExperimentConfig& c, EnsembleResult* out_ensemble) {
    EnsembleConfig ec;
    ec.well = well_from_barrier(c.ys);
    ec.bath = bath_from_gamma(c.gamma, 1.0, c.cutoff);
    ec.ntraj = c.ntraj;
    ec.dt = c.dt;
    ec.t_max = c.tmax > 0.0 ? c.tmax : auto_horizon(c);
    ec.seed = c.seed;
    EnsembleResult res = ensemble_run(ec);
    if (out_ensemble) *out_ensemble = res;
    RateResult r = res.rate;
    r.diagnostics["mean_energy"] = res.mean_energy;
    return r;
}

inline void atomic_write(const std::filesystem::path& path, const std::string& contents) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + tmp.string());
        os << contents;
    }
    std::filesystem::rename(tmp, path);
}

inline std::string timestamp_utc() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace detail

inline RateResult run_method(Method m, const ExperimentConfig& c,
                             EnsembleResult* out_ensemble = nullptr) {
    switch (m) {
        case Method::asymptotic: return rate_asymptotic(c.ys, c.gamma);
        case Method::perturbative: return rate_perturbative(c.ys, c.gamma);
        case Method::laguerre_root: return rate_laguerre_root(c.ys, c.gamma);
        case Method::kramers_quadrature: return kramers_flux(c.ys, c.gamma);
        case Method::fp_numeric: return detail::run_fp_numeric(c);
        case Method::langevin_mc: return detail::run_langevin(c, out_ensemble);
        case Method::tunnel_isolated: return tunneling_rate_isolated(c.ys, 1.0);
        case Method::tunnel_env: return tunneling_rate_env(c.ys, c.gamma, 1.0);
    }
    throw std::logic_error("run_method: unhandled method");
}

// Executes the requested methods on one parameter point. Numeric failures
// are captured per method; the report is still produced.
inline ComparisonReport run_point(const ExperimentConfig& c) {
    check_guards(c);
    ComparisonReport rep;
    rep.config = c;
    rep.hash = config_hash(c);
    if (c.gamma > 0.05)
        rep.warnings.push_back("gamma/Omega0 > 0.05: weak-dissipation expansion degrades");
    for (Method m : c.methods) {
        MethodEntry e;
        e.method = m;
        try {
            EnsembleResult ens;
            e.result = run_method(m, c, &ens);
            if (m == Method::langevin_mc) rep.ensemble = std::move(ens);
        } catch (const std::exception& ex) {
            e.error = ex.what();
        }
        rep.entries.push_back(std::move(e));
    }
    for (std::size_t i = 0; i < rep.entries.size(); ++i) {
        for (std::size_t j = i + 1; j < rep.entries.size(); ++j) {
            const auto& a = rep.entries[i];
            const auto& b = rep.entries[j];
            if (!a.result || !b.result || b.result->rate == 0.0) continue;
            rep.ratios[std::string(method_name(a.method)) + "/" + method_name(b.method)] =
                a.result->rate / b.result->rate;
        }
    }
    const auto act = rep.ratios.find("asymptotic/tunnel_isolated");
    if (act != rep.ratios.end()) rep.ratios["activation_over_tunnel"] = act->second;
    return rep;
}

inline bool report_has_errors(const ComparisonReport& rep) {
    for (const auto& e : rep.entries)
        if (!e.error.empty()) return true;
    return false;
}

inline nlohmann::ordered_json report_to_json(const ComparisonReport& rep) {
    nlohmann::ordered_json j;
    j["version"] = kVersion;
    j["timestamp"] = detail::timestamp_utc();
    j["config_hash"] = rep.hash;
    j["seed"] = rep.config.seed;
    {
        nlohmann::ordered_json cfg;
        std::stringstream ss(echo_config(rep.config));
        std::string line;
        while (std::getline(ss, line)) {
            const auto eq = line.find('=');
            cfg[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
        }
        j["config"] = cfg;
    }
    nlohmann::ordered_json results = nlohmann::ordered_json::array();
    for (const auto& e : rep.entries) {
        nlohmann::ordered_json r;
        r["method"] = method_name(e.method);
        if (e.result) {
            r["rate"] = e.result->rate;
            r["rate_over_omega0"] = e.result->rate; // default units Omega0 = 1
            if (e.result->rbar)
                r["rbar"] = *e.result->rbar;
            else
                r["rbar"] = nullptr;
            if (e.result->uncertainty) {
                r["lo"] = e.result->uncertainty->lo;
                r["hi"] = e.result->uncertainty->hi;
            } else {
                r["lo"] = nullptr;
                r["hi"] = nullptr;
            }
            r["diagnostics"] = e.result->diagnostics;
            r["error"] = nullptr;
        } else {
            r["rate"] = nullptr;
            r["error"] = e.error;
        }
        results.push_back(r);
    }
    j["results"] = results;
    j["ratios"] = rep.ratios;
    j["warnings"] = rep.warnings;
    return j;
}

inline std::string rates_csv(const ComparisonReport& rep) {
    std::ostringstream os;
    os << "method,rate,rbar,lo,hi\n";
    for (const auto& e : rep.entries) {
        if (!e.result) continue;
        os << method_name(e.method) << ',' << detail::format_double(e.result->rate) << ',';
        if (e.result->rbar) os << detail::format_double(*e.result->rbar);
        os << ',';
        if (e.result->uncertainty) os << detail::format_double(e.result->uncertainty->lo);
        os << ',';
        if (e.result->uncertainty) os << detail::format_double(e.result->uncertainty->hi);
        os << '\n';
    }
    return os.str();
}

inline std::string survival_csv(const EnsembleResult& res) {
    std::ostringstream os;
    os << "t,S,lo95,hi95\n";
    for (const auto& p : res.survival)
        os << detail::format_double(p.t) << ',' << detail::format_double(p.s) << ','
           << detail::format_double(p.lo95) << ',' << detail::format_double(p.hi95) << '\n';
    return os.str();
}

inline std::string passages_csv(const EnsembleResult& res) {
    std::ostringstream os;
    os << "traj_id,seed,escape_time,censored\n";
    for (const auto& r : res.passages)
        os << r.traj_id << ',' << r.seed << ',' << detail::format_double(r.escape_time) << ','
           << (r.censored ? 1 : 0) << '\n';
    return os.str();
}

// Kramers constant-flux profile, normalized to the computed flux.
inline std::string profile_csv(const ExperimentConfig& c, double flux) {
    const WellModel w = well_from_barrier(c.ys);
    std::ostringstream os;
    os << "y,F\n";
    const int npts = 400;
    for (int i = 1; i <= npts; ++i) {
        const double y = c.ys * i / npts;
        const double f = kramers_profile(y * w.zero_point_energy, flux, w, c.gamma);
        os << detail::format_double(y) << ',' << detail::format_double(f) << '\n';
    }
    return os.str();
}

// Writes report.json, rates.csv and the optional CSV side-outputs into the
// configured output directory.
inline void write_point_outputs(const ComparisonReport& rep) {
    if (rep.config.out.empty()) return;
    namespace fs = std::filesystem;
    const fs::path dir(rep.config.out);
    fs::create_directories(dir);
    detail::atomic_write(dir / "report.json", report_to_json(rep).dump(2) + "\n");
    detail::atomic_write(dir / "rates.csv", rates_csv(rep));
    if (rep.config.write_profile) {
        for (const auto& e : rep.entries)
            if (e.method == Method::kramers_quadrature && e.result)
                detail::atomic_write(dir / "profile.csv", profile_csv(rep.config, e.result->rate));
    }
    if (rep.ensemble) {
        detail::atomic_write(dir / "survival.csv", survival_csv(*rep.ensemble));
        detail::atomic_write(dir / "passages.csv", passages_csv(*rep.ensemble));
    }
    if (rep.config.fp_snapshots) {
        const EnergyGrid grid(rep.config.ys, rep.config.grid_cells);
        const DiscreteOperator op = build_operator(grid, rep.config.gamma, 0.5);
        const EnergyDistribution f0 = thermal_distribution(grid, 0.5);
        std::ostringstream snap;
        EvolveOptions eo;
        eo.snapshot_stride = 50;
        eo.snapshot_sink = &snap;
        const double dt = 0.1 / (2.0 * rep.config.gamma);
        evolve(f0, op, dt, 200.0 * dt, eo);
        detail::atomic_write(dir / "fp_evolution.csv", snap.str());
    }
}

struct SweepPoint {
    double ys = 0.0;
    double gamma = 0.0;
    ComparisonReport report;
    bool failed = false;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    bool ratio_monotone = true; // activation/tunnel ratio along a ys axis
    int failures = 0;
};

// Runs the axis points concurrently; per-point outputs land under
// point-specific names and the merged CSV is assembled single-threaded.
inline SweepResult run_sweep(const ExperimentConfig& base) {
    if (base.sweep_axis == SweepAxis::none || base.sweep_values.empty())
        throw ConfigError("sweep requires a non-empty axis (sweep_axis, sweep_values)");
    if (base.sweep_values.size() > 1000) throw GuardError("sweep axis <= 1000 points");
    check_guards(base);

    SweepResult sweep;
    sweep.points.resize(base.sweep_values.size());
    std::atomic<std::size_t> cursor{0};
    const auto worker = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= base.sweep_values.size()) return;
            ExperimentConfig c = base;
            c.out.clear(); // per-point files are written under point names below
            if (base.sweep_axis == SweepAxis::ys)
                c.ys = base.sweep_values[i];
            else
                c.gamma = base.sweep_values[i];
            SweepPoint& pt = sweep.points[i];
            pt.ys = c.ys;
            pt.gamma = c.gamma;
            try {
                pt.report = run_point(c);
                pt.failed = report_has_errors(pt.report);
            } catch (const std::exception& ex) {
                pt.failed = true;
                MethodEntry e;
                e.error = ex.what();
                pt.report.entries.push_back(e);
            }
            if (!base.out.empty()) {
                namespace fs = std::filesystem;
                fs::create_directories(base.out);
                char name[48];
                std::snprintf(name, sizeof(name), "point_%03zu_rates.csv", i);
                detail::atomic_write(fs::path(base.out) / name, rates_csv(pt.report));
            }
        }
    };
    {
        unsigned n = std::thread::hardware_concurrency();
        if (n == 0) n = 2;
        n = std::min<unsigned>(n, sweep.points.size());
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    double prev_ratio = -1.0;
    bool have_prev = false;
    for (const auto& pt : sweep.points) {
        if (pt.failed) {
            ++sweep.failures;
            continue;
        }
        const auto it = pt.report.ratios.find("activation_over_tunnel");
        if (base.sweep_axis == SweepAxis::ys && it != pt.report.ratios.end()) {
            if (have_prev && !(it->second > prev_ratio)) sweep.ratio_monotone = false;
            prev_ratio = it->second;
            have_prev = true;
        }
    }
    return sweep;
}

inline std::string sweep_csv(const SweepResult& sweep) {
    std::ostringstream os;
    os << "ys,gamma,method,rate\n";
    for (const auto& pt : sweep.points) {
        for (const auto& e : pt.report.entries) {
            if (!e.result) continue;
            os << detail::format_double(pt.ys) << ',' << detail::format_double(pt.gamma) << ','
               << method_name(e.method) << ',' << detail::format_double(e.result->rate) << '\n';
        }
    }
    return os.str();
}

inline void write_sweep_outputs(const ExperimentConfig& base, const SweepResult& sweep) {
    if (base.out.empty()) return;
    namespace fs = std::filesystem;
    fs::create_directories(base.out);
    detail::atomic_write(fs::path(base.out) / "sweep.csv", sweep_csv(sweep));
    nlohmann::ordered_json j;
    j["version"] = kVersion;
    j["axis"] = base.sweep_axis == SweepAxis::ys ? "ys" : "gamma";
    j["values"] = base.sweep_values;
    j["activation_over_tunnel_monotone"] = sweep.ratio_monotone;
    j["failures"] = sweep.failures;
    detail::atomic_write(fs::path(base.out) / "sweep_report.json", j.dump(2) + "\n");
}

} // namespace qkramers
