// qkramers_cli.cpp — command-line front end: `rate` runs one parameter
// point, `sweep` scans an axis, `check` validates a configuration.
// Exit codes: 0 ok, 1 partial numeric failure, 2 config parse error,
// 3 validity-guard violation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qkramers/harness.hpp"

namespace {

struct CliOverrides {
    std::string config_path;
    double ys = -1.0;
    double gamma = -1.0;
    std::string methods;
    std::string out;
    long long seed = -1;
    int ntraj = -1;
    int grid_cells = -1;
    double cutoff = -1.0;
    double tmax = -1.0;
    std::string axis;
    std::string values;
};

void add_common_flags(CLI::App* app, CliOverrides& o) {
    app->add_option("--config", o.config_path, "configuration file (key = value lines)");
    app->add_option("--ys", o.ys, "dimensionless barrier height eps_s/eps0");
    app->add_option("--gamma", o.gamma, "dissipation gamma/Omega0");
    app->add_option("--methods", o.methods, "comma-separated method list");
    app->add_option("--seed", o.seed, "random seed");
    app->add_option("--out", o.out, "output directory");
    app->add_option("--ntraj", o.ntraj, "Monte Carlo trajectory count");
    app->add_option("--grid-cells", o.grid_cells, "Fokker-Planck grid cells");
    app->add_option("--cutoff", o.cutoff, "bath frequency cutoff (units of Omega0)");
    app->add_option("--tmax", o.tmax, "Monte Carlo escape-clock horizon");
}

// Builds the effective config: file (if any), then CLI overrides, then the
// validity guards.
qkramers::ExperimentConfig load_config(const CliOverrides& o) {
    std::string text;
    if (!o.config_path.empty()) {
        std::ifstream is(o.config_path);
        if (!is) throw qkramers::ConfigError("cannot open config file " + o.config_path);
        std::stringstream ss;
        ss << is.rdbuf();
        text = ss.str();
    }
    std::ostringstream extra;
    if (o.ys >= 0.0) extra << "ys = " << o.ys << "\n";
    if (o.gamma >= 0.0) extra << "gamma = " << o.gamma << "\n";
    if (!o.methods.empty()) extra << "methods = " << o.methods << "\n";
    if (o.seed >= 0) extra << "seed = " << o.seed << "\n";
    if (!o.out.empty()) extra << "out = " << o.out << "\n";
    if (o.ntraj >= 0) extra << "ntraj = " << o.ntraj << "\n";
    if (o.grid_cells >= 0) extra << "grid_cells = " << o.grid_cells << "\n";
    if (o.cutoff >= 0.0) extra << "cutoff = " << o.cutoff << "\n";
    if (o.tmax >= 0.0) extra << "tmax = " << o.tmax << "\n";
    if (!o.axis.empty()) extra << "sweep_axis = " << o.axis << "\n";
    if (!o.values.empty()) extra << "sweep_values = " << o.values << "\n";
    return qkramers::validate_config(text + extra.str());
}

void print_rates(const qkramers::ComparisonReport& rep) {
    for (const auto& e : rep.entries) {
        if (e.result) {
            std::printf("%-20s r = %.6e", qkramers::method_name(e.method), e.result->rate);
            if (e.result->rbar) std::printf("   rbar = %.6e", *e.result->rbar);
            if (e.result->uncertainty)
                std::printf("   95%% [%.3e, %.3e]", e.result->uncertainty->lo,
                            e.result->uncertainty->hi);
            std::printf("\n");
        } else {
            std::printf("%-20s FAILED: %s\n", qkramers::method_name(e.method), e.error.c_str());
        }
    }
    const auto it = rep.ratios.find("activation_over_tunnel");
    if (it != rep.ratios.end())
        std::printf("activation/tunnel ratio = %.6e\n", it->second);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"escape rates of a metastable state coupled to a zero-temperature ohmic bath"};
    app.require_subcommand(1);

    CliOverrides o;
    CLI::App* rate = app.add_subcommand("rate", "run the requested methods on one point");
    add_common_flags(rate, o);
    CLI::App* sweep = app.add_subcommand("sweep", "run the methods along a ys or gamma axis");
    add_common_flags(sweep, o);
    sweep->add_option("--axis", o.axis, "sweep axis: ys or gamma");
    sweep->add_option("--values", o.values, "comma-separated axis values");
    CLI::App* check = app.add_subcommand("check", "validate a configuration and echo it");
    add_common_flags(check, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const qkramers::ExperimentConfig cfg = load_config(o);
        if (check->parsed()) {
            std::printf("%s", qkramers::echo_config(cfg).c_str());
            std::printf("config_hash = %s\n", qkramers::config_hash(cfg).c_str());
            return 0;
        }
        if (rate->parsed()) {
            const qkramers::ComparisonReport rep = qkramers::run_point(cfg);
            qkramers::write_point_outputs(rep);
            print_rates(rep);
            return qkramers::report_has_errors(rep) ? 1 : 0;
        }
        const qkramers::SweepResult res = qkramers::run_sweep(cfg);
        qkramers::write_sweep_outputs(cfg, res);
        std::printf("%s", qkramers::sweep_csv(res).c_str());
        if (cfg.sweep_axis == qkramers::SweepAxis::ys)
            std::printf("# activation/tunnel ratio monotone along ys: %s\n",
                        res.ratio_monotone ? "yes" : "no");
        if (res.failures > 0) {
            std::fprintf(stderr, "%d sweep point(s) failed\n", res.failures);
            return 1;
        }
        return 0;
    } catch (const qkramers::GuardError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const qkramers::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
