#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include "qkramers/harness.hpp"

using namespace qkramers;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string strip_timestamp(std::string s) {
    return std::regex_replace(s, std::regex("\"timestamp\": \"[^\"]*\""),
                              "\"timestamp\": \"X\"");
}

struct TempDir {
    fs::path path;
    TempDir(const char* name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("config parsing applies defaults and reads keys") {
    const ExperimentConfig c =
        validate_config("ys = 10\ngamma = 0.01\nmethods = asymptotic,perturbative\n");
    CHECK(c.ys == 10.0);
    CHECK(c.gamma == 0.01);
    REQUIRE(c.methods.size() == 2);
    CHECK(c.methods[0] == Method::asymptotic);
    CHECK(c.methods[1] == Method::perturbative);
    CHECK(c.grid_cells == 4000); // default echoed below
    const std::string echo = echo_config(c);
    CHECK(echo.find("grid_cells = 4000") != std::string::npos);
    CHECK(echo.find("cutoff = 50") != std::string::npos);
    CHECK(echo.find("methods = asymptotic,perturbative") != std::string::npos);
}

TEST_CASE("config errors carry line numbers and guard names") {
    // guard violation: gamma beyond the weak-dissipation bound
    try {
        validate_config("gamma = 0.5\n");
        FAIL("expected GuardError");
    } catch (const GuardError& e) {
        CHECK(e.constraint == "gamma/Omega0 <= 0.1");
    }

    // parse error: empty methods
    CHECK_THROWS_AS(validate_config("methods = \n"), ConfigError);
    // parse error: unknown key, with the line number in the message
    try {
        validate_config("ys = 10\nbogus = 1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line == 2);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(validate_config("ys = ten\n"), ConfigError);
    CHECK_THROWS_AS(validate_config("no equals sign\n"), ConfigError);
    CHECK_THROWS_AS(validate_config("methods = warp_drive\n"), ConfigError);

    // eigenvalue methods need ys >= 2
    try {
        validate_config("ys = 1.5\nmethods = perturbative\n");
        FAIL("expected GuardError");
    } catch (const GuardError& e) {
        CHECK(e.constraint == "ys >= 2 for eigenvalue methods");
    }
    // the asymptotic formula alone is fine below ys = 2
    CHECK_NOTHROW(validate_config("ys = 1.5\nmethods = asymptotic\n"));

    // comments and blank lines are accepted
    CHECK_NOTHROW(validate_config("# comment\n\nys = 8 # trailing\n"));
}

TEST_CASE("run_point computes the deterministic suite") {
    ExperimentConfig c = validate_config(
        "ys = 10\ngamma = 0.01\n"
        "methods = asymptotic,perturbative,laguerre_root,kramers_quadrature,tunnel_isolated\n");
    const ComparisonReport rep = run_point(c);
    REQUIRE(rep.entries.size() == 5);
    CHECK(!report_has_errors(rep));
    CHECK(rep.entries[0].result->rate == doctest::Approx(9.080e-6).epsilon(1e-4));
    CHECK(rep.entries[1].result->rate == doctest::Approx(8.034e-6).epsilon(1e-4));
    CHECK(rep.ratios.count("activation_over_tunnel") == 1);
    CHECK(rep.ratios.at("asymptotic/perturbative") == doctest::Approx(1.1302).epsilon(1e-3));

    const std::string csv = rates_csv(rep);
    CHECK(csv.rfind("method,rate,rbar,lo,hi\n", 0) == 0);
    CHECK(csv.find("asymptotic,9.07998") != std::string::npos);
    CHECK(csv.find("perturbative,8.03422") != std::string::npos);

    // every requested method appears exactly once, under its closed name
    int count = 0;
    std::stringstream ss(csv);
    std::string line;
    std::getline(ss, line);
    while (std::getline(ss, line)) {
        const std::string name = line.substr(0, line.find(','));
        CHECK(method_from_name(name).has_value());
        ++count;
    }
    CHECK(count == 5);
}

TEST_CASE("single-method point yields a single CSV row") {
    const ExperimentConfig c = validate_config("ys = 10\ngamma = 0.01\nmethods = asymptotic\n");
    const ComparisonReport rep = run_point(c);
    const std::string csv = rates_csv(rep);
    int rows = 0;
    for (char ch : csv)
        if (ch == '\n') ++rows;
    CHECK(rows == 2); // header + one method
}

TEST_CASE("report files are byte-identical apart from the timestamp") {
    TempDir tmp("qkramers_point_test");
    ExperimentConfig c = validate_config(
        "ys = 8\ngamma = 0.02\nmethods = asymptotic,perturbative,kramers_quadrature\n");
    c.out = tmp.path.string();
    const ComparisonReport ra = run_point(c);
    write_point_outputs(ra);
    const std::string json_first = slurp(tmp.path / "report.json");
    const std::string csv_first = slurp(tmp.path / "rates.csv");
    const ComparisonReport rb = run_point(c);
    write_point_outputs(rb);

    CHECK(strip_timestamp(json_first) == strip_timestamp(slurp(tmp.path / "report.json")));
    CHECK(csv_first == slurp(tmp.path / "rates.csv"));
    CHECK(fs::exists(tmp.path / "profile.csv"));

    // profile has the documented header and vanishes at the separatrix
    const std::string profile = slurp(tmp.path / "profile.csv");
    CHECK(profile.rfind("y,F\n", 0) == 0);
    const auto last_comma = profile.find_last_of(',');
    CHECK(std::abs(std::stod(profile.substr(last_comma + 1))) < 1e-12);
}

TEST_CASE("fp snapshot dump is written on request") {
    TempDir tmp("qkramers_snapshots_test");
    ExperimentConfig c = validate_config(
        "ys = 6\ngamma = 0.02\nmethods = fp_numeric\ngrid_cells = 150\nfp_snapshots = true\n");
    c.out = tmp.path.string();
    const ComparisonReport rep = run_point(c);
    CHECK(!report_has_errors(rep));
    write_point_outputs(rep);
    REQUIRE(fs::exists(tmp.path / "fp_evolution.csv"));
    const std::string snap = slurp(tmp.path / "fp_evolution.csv");
    CHECK(snap.rfind("y,F,t\n", 0) == 0);
    CHECK(snap.find("\n") != std::string::npos);
}

TEST_CASE("numeric failure produces a partial report") {
    ExperimentConfig c = validate_config("ys = 10\ngamma = 0.01\nmethods = asymptotic\n");
    c.methods.push_back(Method::langevin_mc);
    c.ntraj = 1;
    c.tmax = 1e-3; // horizon so short nothing can escape: still a valid result
    c.dt = 0.004;
    const ComparisonReport rep = run_point(c);
    CHECK(rep.entries[0].result);
    // the MC entry completed with an upper bound, not an error
    REQUIRE(rep.entries[1].result);
    CHECK(rep.entries[1].result->diagnostics.count("upper_bound_only") == 1);
}

TEST_CASE("config hash is stable and reflects content") {
    const ExperimentConfig a = validate_config("ys = 10\ngamma = 0.01\n");
    const ExperimentConfig b = validate_config("ys = 10\ngamma = 0.01\n");
    const ExperimentConfig c = validate_config("ys = 12\ngamma = 0.01\n");
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("sweep over ys: ratio grows, single point matches run_point") {
    ExperimentConfig base = validate_config(
        "gamma = 0.01\nmethods = asymptotic,tunnel_isolated\n"
        "sweep_axis = ys\nsweep_values = 6,8,10,12\n");
    const SweepResult sweep = run_sweep(base);
    CHECK(sweep.failures == 0);
    CHECK(sweep.ratio_monotone);
    REQUIRE(sweep.points.size() == 4);

    double prev = 0.0;
    for (const SweepPoint& pt : sweep.points) {
        const double ratio = pt.report.ratios.at("activation_over_tunnel");
        CHECK(ratio > prev);
        prev = ratio;
    }

    const std::string csv = sweep_csv(sweep);
    CHECK(csv.rfind("ys,gamma,method,rate\n", 0) == 0);
    CHECK(csv.find("6,0.01,asymptotic,") != std::string::npos);

    // single-point sweep reproduces run_point rates
    ExperimentConfig single = base;
    single.sweep_values = {10.0};
    const SweepResult s1 = run_sweep(single);
    ExperimentConfig point = base;
    point.ys = 10.0;
    point.sweep_axis = SweepAxis::none;
    point.sweep_values.clear();
    const ComparisonReport rp = run_point(point);
    REQUIRE(s1.points.size() == 1);
    CHECK(s1.points[0].report.entries[0].result->rate ==
          doctest::Approx(rp.entries[0].result->rate).epsilon(1e-15));

    // empty axis is a config error
    ExperimentConfig empty = base;
    empty.sweep_values.clear();
    CHECK_THROWS_AS(run_sweep(empty), ConfigError);
}

TEST_CASE("sweep writes per-point files and the merged CSV") {
    TempDir tmp("qkramers_sweep_test");
    ExperimentConfig base = validate_config(
        "gamma = 0.01\nmethods = asymptotic,tunnel_isolated\n"
        "sweep_axis = ys\nsweep_values = 6,9\n");
    base.out = tmp.path.string();
    const SweepResult sweep = run_sweep(base);
    write_sweep_outputs(base, sweep);
    CHECK(fs::exists(tmp.path / "point_000_rates.csv"));
    CHECK(fs::exists(tmp.path / "point_001_rates.csv"));
    CHECK(fs::exists(tmp.path / "sweep.csv"));
    CHECK(fs::exists(tmp.path / "sweep_report.json"));
    const std::string merged = slurp(tmp.path / "sweep.csv");
    CHECK(merged.find("9,0.01,asymptotic,") != std::string::npos);
}
