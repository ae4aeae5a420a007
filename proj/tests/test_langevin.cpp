#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "qkramers/langevin.hpp"

using namespace qkramers;

TEST_CASE("origin is a fixed point without noise or friction") {
    const WellModel w = well_from_barrier(4.0);
    const BathSpec off = make_bath(0.0, 1.0, 50.0);
    NoisePath silent;
    silent.dt = 0.01;
    silent.samples.assign(20000, 0.0);
    TrajectoryOptions opt;
    opt.dt = 0.01;
    opt.t_max = 100.0;
    const TrajectoryOutcome out = integrate_trajectory(PhasePoint{0.0, 0.0}, silent, w, off, opt);
    CHECK(out.censored);
    CHECK(out.final_state.x == 0.0);
    CHECK(out.final_state.p == 0.0);
}

TEST_CASE("conservative dynamics below the separatrix stays bound") {
    const WellModel w = well_from_barrier(4.0);
    const BathSpec off = make_bath(0.0, 1.0, 50.0);
    const double dt = 0.02;
    const double periods = 1000.0;
    const double t_max = periods * 2.0 * std::numbers::pi;
    NoisePath silent;
    silent.dt = dt;
    silent.samples.assign(static_cast<std::size_t>(t_max / dt) + 2, 0.0);
    TrajectoryOptions opt;
    opt.dt = dt;
    opt.t_max = t_max;
    opt.record_stride = 1000;
    const PhasePoint init{0.8 * w.barrier_position, 0.0};
    const double e0 = total_energy(init, w);
    REQUIRE(e0 < w.barrier_energy);
    const TrajectoryOutcome out = integrate_trajectory(init, silent, w, off, opt);
    CHECK(out.censored); // no escape over 10^3 periods
    for (const auto& [t, eps] : out.energy_series)
        CHECK(eps == doctest::Approx(e0).epsilon(5e-4));
    CHECK(total_energy(out.final_state, w) == doctest::Approx(e0).epsilon(5e-4));
}

TEST_CASE("initial states outside the well are rejected") {
    const WellModel w = well_from_barrier(4.0);
    const BathSpec b = bath_from_gamma(0.05, 1.0, 50.0);
    NoisePath silent;
    silent.dt = 0.01;
    silent.samples.assign(128, 0.0);
    TrajectoryOptions opt;
    opt.dt = 0.01;
    opt.t_max = 1.0;
    CHECK_THROWS_AS(
        integrate_trajectory(PhasePoint{1.5 * w.barrier_position, 0.0}, silent, w, b, opt),
        std::invalid_argument);
    const double p_over = std::sqrt(2.0 * w.mass * w.barrier_energy) * 1.01;
    CHECK_THROWS_AS(integrate_trajectory(PhasePoint{0.0, p_over}, silent, w, b, opt),
                    std::invalid_argument);
}

TEST_CASE("censored-exponential rate estimator") {
    const std::vector<double> four = {1.0, 1.0, 1.0, 1.0};
    const RateResult r = estimate_rate(four, 10.0);
    CHECK(r.rate == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.method == Method::langevin_mc);
    REQUIRE(r.uncertainty);
    CHECK(r.uncertainty->lo < 1.0);
    CHECK(r.uncertainty->hi > 1.0);
    // exact Poisson interval for 4 counts: chi2-based bounds around n/T
    CHECK(r.uncertainty->lo == doctest::Approx(1.0899 / 4.0).epsilon(1e-3));
    CHECK(r.uncertainty->hi == doctest::Approx(10.2416 / 4.0).epsilon(1e-3));

    // all censored: one-sided upper bound 3/T at 95%
    const std::vector<double> censored(100, 10.0);
    const RateResult c = estimate_rate(censored, 10.0);
    CHECK(c.rate == 0.0);
    CHECK(c.diagnostics.at("upper_bound_only") == 1.0);
    CHECK(c.uncertainty->hi == doctest::Approx(-std::log(0.05) / 1000.0).epsilon(1e-10));
    CHECK(c.uncertainty->hi == doctest::Approx(3.0 / 1000.0).epsilon(0.01));

    // invariance under time rescaling
    std::vector<double> times = {0.3, 2.0, 5.0, 10.0, 10.0};
    const RateResult a = estimate_rate(times, 10.0);
    std::vector<double> scaled;
    for (double t : times) scaled.push_back(7.0 * t);
    const RateResult b = estimate_rate(scaled, 70.0);
    CHECK(b.rate == doctest::Approx(a.rate / 7.0).epsilon(1e-12));
    CHECK(b.uncertainty->lo == doctest::Approx(a.uncertainty->lo / 7.0).epsilon(1e-10));
    CHECK(b.uncertainty->hi == doctest::Approx(a.uncertainty->hi / 7.0).epsilon(1e-10));

    CHECK_THROWS_AS(estimate_rate(std::vector<double>{}, 1.0), std::invalid_argument);
}

TEST_CASE("ensembles are deterministic and mergeable") {
    EnsembleConfig cfg;
    cfg.well = well_from_barrier(3.0);
    cfg.bath = bath_from_gamma(0.05, 1.0, 20.0);
    cfg.ntraj = 60;
    cfg.t_max = 150.0;
    cfg.seed = 314;
    cfg.threads = 2;

    const EnsembleResult a = ensemble_run(cfg);
    const EnsembleResult b = ensemble_run(cfg);
    REQUIRE(a.passages.size() == b.passages.size());
    for (std::size_t i = 0; i < a.passages.size(); ++i) {
        CHECK(a.passages[i].traj_id == b.passages[i].traj_id);
        CHECK(a.passages[i].escape_time == b.passages[i].escape_time);
        CHECK(a.passages[i].censored == b.passages[i].censored);
    }

    // disjoint id ranges concatenate to the combined ensemble
    EnsembleConfig lo = cfg, hi = cfg, all = cfg;
    lo.ntraj = 30;
    hi.ntraj = 30;
    hi.traj_id_offset = 30;
    all.ntraj = 60;
    const EnsembleResult rl = ensemble_run(lo);
    const EnsembleResult rh = ensemble_run(hi);
    const EnsembleResult ra = ensemble_run(all);
    REQUIRE(rl.passages.size() + rh.passages.size() == ra.passages.size());
    std::vector<double> merged;
    for (const auto& r : rl.passages) merged.push_back(r.escape_time);
    for (const auto& r : rh.passages) merged.push_back(r.escape_time);
    for (std::size_t i = 0; i < merged.size(); ++i)
        CHECK(merged[i] == ra.passages[i].escape_time);
}

TEST_CASE("harmonic test mode equilibrates at the zero-point energy") {
    // moderate cutoff keeps the ultraviolet momentum dressing small; the
    // remaining bias is the recorded cutoff caveat
    EnsembleConfig cfg;
    cfg.well = well_from_barrier(4.0);
    cfg.bath = bath_from_gamma(0.05, 1.0, 4.0);
    cfg.mode = WellMode::harmonic_test;
    cfg.criterion = EscapeCriterion::none;
    cfg.ntraj = 24;
    cfg.t_max = 4000.0;
    cfg.seed = 2718;
    cfg.threads = 2;
    const EnsembleResult res = ensemble_run(cfg);
    const double eps0 = cfg.well.zero_point_energy;
    CHECK(res.mean_energy == doctest::Approx(eps0).epsilon(0.10));
    // fluctuation-dissipation-like consistency of the two quadratures
    const double x2_scaled = res.mean_x2 * cfg.well.mass * cfg.well.omega0 * cfg.well.omega0;
    const double p2_scaled = res.mean_p2 / cfg.well.mass;
    CHECK(x2_scaled == doctest::Approx(eps0).epsilon(0.10));
    CHECK(p2_scaled == doctest::Approx(eps0).epsilon(0.10));
}

TEST_CASE("survival curve tracks the fitted exponential") {
    EnsembleConfig cfg;
    cfg.well = well_from_barrier(3.0);
    cfg.bath = bath_from_gamma(0.05, 1.0, 20.0);
    cfg.ntraj = 400;
    cfg.t_max = 250.0;
    cfg.seed = 1618;
    cfg.threads = 2;
    const EnsembleResult res = ensemble_run(cfg);
    REQUIRE(res.escapes > 100);
    int misses = 0;
    int used = 0;
    for (const SurvivalPoint& p : res.survival) {
        const double model = std::exp(-res.rate.rate * p.t);
        ++used;
        if (model < p.lo95 || model > p.hi95) ++misses;
    }
    // pointwise 95% band: tolerate a small miss fraction from correlation
    CHECK(misses <= used / 10);
    CHECK(res.survival.front().s == doctest::Approx(1.0));
    for (std::size_t i = 1; i < res.survival.size(); ++i)
        CHECK(res.survival[i].s <= res.survival[i - 1].s + 1e-12);
}
