// langevin.hpp — colored-noise Langevin Monte Carlo: spectral synthesis of
// the zero-temperature ohmic noise, semi-implicit trajectory integration,
// first-passage detection and censored-exponential rate estimation.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qkramers/bath.hpp"
#include "qkramers/fft.hpp"
#include "qkramers/model.hpp"
#include "qkramers/rates.hpp"
#include "qkramers/rng.hpp"

namespace qkramers {

// One realization of the stationary Gaussian noise with two-sided spectrum
// hbar*eta*|omega| restricted to |omega| <= cutoff, on a uniform time grid.
struct NoisePath {
    double dt = 0.0;
    std::vector<double> samples;
    std::uint64_t seed = 0;
    double cutoff = 0.0;

    double operator[](std::size_t k) const { return samples[k]; }
    std::size_t size() const { return samples.size(); }
};

// Frequency-domain synthesis: independent complex Gaussians with Hermitian
// symmetry, variance fixed by the target spectral density and the discrete
// transform normalization, then an inverse FFT. The sequence is generated
// circulant-exactly on the next power of two and truncated to length nt.
inline NoisePath synthesize_noise(std::size_t nt, double dt, const BathSpec& bath, double hbar,
                                  std::uint64_t seed) {
    if (nt < 2 || nt % 2 != 0)
        throw std::invalid_argument("synthesize_noise: sample count must be even and >= 2");
    if (!(dt > 0.0))
        throw std::invalid_argument("synthesize_noise: dt must be positive");
    if (dt > std::numbers::pi / bath.cutoff * (1.0 + 1e-12))
        throw std::invalid_argument("synthesize_noise: dt violates the Nyquist bound pi/cutoff");
    NoisePath path;
    path.dt = dt;
    path.seed = seed;
    path.cutoff = bath.cutoff;
    path.samples.assign(nt, 0.0);
    if (bath.eta == 0.0) return path;

    const std::size_t m = detail::next_pow2(nt);
    std::vector<std::complex<double>> tones(m, {0.0, 0.0});
    Rng rng(seed);
    const double dw = 2.0 * std::numbers::pi / (static_cast<double>(m) * dt);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::size_t k = 1; k < m / 2; ++k) {
        const double w = k * dw;
        const double g1 = rng.normal();
        const double g2 = rng.normal();
        const double s = hbar * noise_spectrum(w, bath, hbar);
        if (s == 0.0) continue;
        const double amp = std::sqrt(static_cast<double>(m) * s / dt) * inv_sqrt2;
        tones[k] = {amp * g1, amp * g2};
        tones[m - k] = std::conj(tones[k]);
    }
    {
        const double w_nyq = std::numbers::pi / dt;
        const double s = hbar * noise_spectrum(w_nyq, bath, hbar);
        const double g = rng.normal();
        if (s != 0.0) tones[m / 2] = {std::sqrt(static_cast<double>(m) * s / dt) * g, 0.0};
    }
    detail::fft_radix2(tones, +1);
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < nt; ++k) path.samples[k] = tones[k].real() * scale;
    return path;
}

// One-sided periodogram P_j = dt |DFT_j|^2 / Nt, j = 0..Nt/2; its ensemble
// mean estimates the two-sided spectral density.
inline std::vector<double> periodogram(const NoisePath& path) {
    const std::size_t n = path.samples.size();
    if (!detail::is_pow2(n))
        throw std::invalid_argument("periodogram: sample count must be a power of two");
    std::vector<std::complex<double>> a(n);
    for (std::size_t k = 0; k < n; ++k) a[k] = {path.samples[k], 0.0};
    detail::fft_radix2(a, -1);
    std::vector<double> p(n / 2 + 1);
    for (std::size_t j = 0; j <= n / 2; ++j)
        p[j] = path.dt * std::norm(a[j]) / static_cast<double>(n);
    return p;
}

// Lazily generated noise stream: fixed-length circulant segments with seeds
// derived from (base seed, trajectory id, segment index). Keeps memory
// bounded and every trajectory reproducible in isolation.
class SegmentedNoise {
  public:
    SegmentedNoise(const BathSpec& bath, double hbar, double dt, std::uint64_t base_seed,
                   std::uint64_t traj_id, std::size_t segment_samples = std::size_t{1} << 16)
        : bath_(bath), hbar_(hbar), dt_(dt), base_seed_(base_seed), traj_id_(traj_id),
          segment_samples_(detail::next_pow2(segment_samples)) {}

    double operator[](std::size_t k) const {
        const std::size_t seg = k / segment_samples_;
        if (seg != cached_segment_ || segment_.samples.empty()) {
            segment_ = synthesize_noise(segment_samples_, dt_, bath_, hbar_,
                                        derive_seed(base_seed_, traj_id_, seg + 1));
            cached_segment_ = seg;
        }
        return segment_[k - seg * segment_samples_];
    }

    std::uint64_t first_segment_seed() const { return derive_seed(base_seed_, traj_id_, 1); }

  private:
    BathSpec bath_;
    double hbar_;
    double dt_;
    std::uint64_t base_seed_;
    std::uint64_t traj_id_;
    std::size_t segment_samples_;
    mutable NoisePath segment_;
    mutable std::size_t cached_segment_ = static_cast<std::size_t>(-1);
};

enum class WellMode { cubic, harmonic_test };

enum class EscapeCriterion {
    position,         // x >= x_s (default for the cubic well)
    energy,           // instantaneous eps >= eps_s (harmonic test mode)
    averaged_energy,  // trailing-window mean of eps >= eps_s (diagnostic)
    none,             // no absorbing surface; equilibrium statistics only
};

inline double default_timestep(const WellModel& w, const BathSpec& b) {
    return std::min(0.02 / w.omega0, 0.2 / b.cutoff);
}

struct TrajectoryOptions {
    double dt = 0.0;
    double t_max = 0.0;        // total simulated time, burn-in included
    double burn_in = 0.0;      // escape clock starts here
    WellMode mode = WellMode::cubic;
    EscapeCriterion criterion = EscapeCriterion::position;
    int averaging_window_steps = 0; // averaged_energy window; 0: one period
    int record_stride = 0;     // energy bookkeeping stride; 0 disables
    std::uint64_t traj_id = 0; // label for failure reports
};

struct TrajectoryOutcome {
    std::optional<double> escape_time; // on the post-burn-in clock
    bool censored = false;
    bool escaped_during_burnin = false;
    double elapsed = 0.0;
    PhasePoint final_state;
    double mean_energy = 0.0; // time average after burn-in
    double mean_x2 = 0.0;
    double mean_p2 = 0.0;
    std::optional<double> first_energy_crossing; // diagnostic: instantaneous eps >= eps_s
    std::vector<std::pair<double, double>> energy_series;
};

namespace detail {

template <class Noise>
TrajectoryOutcome integrate_trajectory_impl(PhasePoint init, const Noise& noise,
                                            std::size_t max_noise_index, const WellModel& w,
                                            const BathSpec& bath, const TrajectoryOptions& opt) {
    if (!(opt.dt > 0.0) || !(opt.t_max > 0.0))
        throw std::invalid_argument("integrate_trajectory: dt and t_max must be positive");
    const bool harmonic = opt.mode == WellMode::harmonic_test;
    const double eps_init = harmonic ? harmonic_energy(init, w) : total_energy(init, w);
    if (!(eps_init < w.barrier_energy) || (!harmonic && !(init.x < w.barrier_position)))
        throw std::invalid_argument("integrate_trajectory: initial state not inside the well");

    const double dt = opt.dt;
    const double inv_fric = 1.0 / (1.0 + bath.gamma * dt);
    const double half_dt = 0.5 * dt;
    const double mw2 = w.mass * w.omega0 * w.omega0;
    const double half_lambda = 0.5 * w.cubic_coupling;
    const double inv_mass = 1.0 / w.mass;

    std::size_t steps = static_cast<std::size_t>(opt.t_max / dt);
    if (steps + 1 > max_noise_index) steps = max_noise_index > 0 ? max_noise_index - 1 : 0;

    // trailing energy average for the harmonic absorbing surface
    const std::size_t period_steps =
        opt.averaging_window_steps > 0
            ? static_cast<std::size_t>(opt.averaging_window_steps)
            : std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(
                                           2.0 * std::numbers::pi / (w.omega0 * dt))));
    std::vector<double> window;
    double window_sum = 0.0;
    std::size_t window_pos = 0;
    if (opt.criterion == EscapeCriterion::averaged_energy) window.assign(period_steps, 0.0);

    TrajectoryOutcome out;
    double x = init.x;
    double p = init.p;
    double f_curr = (harmonic ? -mw2 * x : -mw2 * x + half_lambda * x * x) + noise[0];
    double energy_sum = 0.0, x2_sum = 0.0, p2_sum = 0.0;
    std::size_t stat_samples = 0;

    for (std::size_t k = 0; k < steps; ++k) {
        const double p_half = (p + half_dt * f_curr) * inv_fric;
        x += dt * p_half * inv_mass;
        const double f_next = (harmonic ? -mw2 * x : -mw2 * x + half_lambda * x * x) + noise[k + 1];
        p = (p_half + half_dt * f_next) * inv_fric;
        f_curr = f_next;
        const double t = (k + 1) * dt;

        if (!std::isfinite(x) || !std::isfinite(p))
            throw NumericFailure("integrate_trajectory: non-finite state in trajectory " +
                                 std::to_string(opt.traj_id));

        const double eps = harmonic ? 0.5 * (p * p * inv_mass + mw2 * x * x)
                                    : 0.5 * p * p * inv_mass + potential(x, w);
        const bool clock_running = t > opt.burn_in;

        if (clock_running) {
            energy_sum += eps;
            x2_sum += x * x;
            p2_sum += p * p;
            ++stat_samples;
            if (!out.first_energy_crossing && eps >= w.barrier_energy)
                out.first_energy_crossing = t - opt.burn_in;
            if (opt.record_stride > 0 && (k + 1) % static_cast<std::size_t>(opt.record_stride) == 0)
                out.energy_series.emplace_back(t, eps);
        }

        bool escaped = false;
        switch (opt.criterion) {
            case EscapeCriterion::position:
                escaped = x >= w.barrier_position;
                break;
            case EscapeCriterion::energy:
                escaped = eps >= w.barrier_energy;
                break;
            case EscapeCriterion::averaged_energy: {
                window_sum += eps - window[window_pos];
                window[window_pos] = eps;
                window_pos = (window_pos + 1) % period_steps;
                escaped = (k + 1 >= period_steps) &&
                          window_sum / static_cast<double>(period_steps) >= w.barrier_energy;
                break;
            }
            case EscapeCriterion::none:
                break;
        }
        if (escaped) {
            out.elapsed = t;
            out.final_state = PhasePoint{x, p};
            if (clock_running)
                out.escape_time = t - opt.burn_in;
            else
                out.escaped_during_burnin = true;
            if (stat_samples > 0) {
                out.mean_energy = energy_sum / stat_samples;
                out.mean_x2 = x2_sum / stat_samples;
                out.mean_p2 = p2_sum / stat_samples;
            }
            return out;
        }
    }
    out.elapsed = steps * dt;
    out.censored = true;
    out.final_state = PhasePoint{x, p};
    if (stat_samples > 0) {
        out.mean_energy = energy_sum / stat_samples;
        out.mean_x2 = x2_sum / stat_samples;
        out.mean_p2 = p2_sum / stat_samples;
    }
    return out;
}

} // namespace detail

// Semi-implicit integration of
//   dx/dt = p/M,  dp/dt = -M Omega0^2 x + (lambda/2) x^2 - (eta/M) p + xi(t):
// velocity-Verlet half-kicks with the friction term taken implicitly, so the
// scheme is stable for any gamma*dt and reduces to plain Verlet at eta = 0.
inline TrajectoryOutcome integrate_trajectory(const PhasePoint& init, const NoisePath& noise,
                                              const WellModel& w, const BathSpec& bath,
                                              TrajectoryOptions opt) {
    if (opt.dt == 0.0) opt.dt = noise.dt;
    if (std::abs(opt.dt - noise.dt) > 1e-12 * noise.dt)
        throw std::invalid_argument("integrate_trajectory: dt must match the noise grid");
    return detail::integrate_trajectory_impl(init, noise, noise.size(), w, bath, opt);
}

inline TrajectoryOutcome integrate_trajectory(const PhasePoint& init, const SegmentedNoise& noise,
                                              const WellModel& w, const BathSpec& bath,
                                              const TrajectoryOptions& opt) {
    return detail::integrate_trajectory_impl(init, noise, static_cast<std::size_t>(-1), w, bath,
                                             opt);
}

namespace detail {

// Chi-square quantile via bisection on the regularized incomplete gamma.
inline double chi2_quantile(double prob, double dof) {
    double hi = dof + 10.0 * std::sqrt(dof) + 10.0;
    while (gammp(0.5 * dof, 0.5 * hi) < prob) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (gammp(0.5 * dof, 0.5 * mid) < prob)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-12 * std::max(hi, 1.0)) break;
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

// Censored-exponential maximum likelihood: r = N_escaped / sum_i min(t_i,
// t_max), with an exact Poisson 95% interval on the escape count. Censored
// observations are encoded as t_i >= t_max. With zero escapes only the
// one-sided 95% upper bound is returned, flagged in the diagnostics.
inline RateResult estimate_rate(std::span<const double> first_passage_times, double t_max) {
    if (first_passage_times.empty())
        throw std::invalid_argument("estimate_rate: no observations");
    if (!(t_max > 0.0)) throw std::invalid_argument("estimate_rate: t_max must be positive");
    double exposure = 0.0;
    std::size_t escapes = 0;
    for (double t : first_passage_times) {
        if (t < 0.0) throw std::invalid_argument("estimate_rate: negative passage time");
        if (t < t_max) {
            exposure += t;
            ++escapes;
        } else {
            exposure += t_max;
        }
    }
    RateResult r;
    r.method = Method::langevin_mc;
    r.diagnostics["escapes"] = static_cast<double>(escapes);
    r.diagnostics["censored"] = static_cast<double>(first_passage_times.size() - escapes);
    r.diagnostics["exposure"] = exposure;
    if (escapes == 0) {
        r.rate = 0.0;
        r.uncertainty = Uncertainty{0.0, -std::log(0.05) / exposure};
        r.diagnostics["upper_bound_only"] = 1.0;
        return r;
    }
    r.rate = static_cast<double>(escapes) / exposure;
    const double lo = 0.5 * detail::chi2_quantile(0.025, 2.0 * static_cast<double>(escapes));
    const double hi = 0.5 * detail::chi2_quantile(0.975, 2.0 * static_cast<double>(escapes) + 2.0);
    r.uncertainty = Uncertainty{lo / exposure, hi / exposure};
    return r;
}

struct FirstPassageRecord {
    std::uint64_t traj_id = 0;
    std::uint64_t seed = 0;
    double escape_time = 0.0; // post-burn-in clock; == horizon when censored
    bool censored = false;
};

struct SurvivalPoint {
    double t = 0.0;
    double s = 1.0;
    double lo95 = 1.0;
    double hi95 = 1.0;
};

struct EnsembleConfig {
    WellModel well;
    BathSpec bath;
    double hbar = 1.0;
    int ntraj = 1000;
    double dt = 0.0;       // 0: default_timestep rule
    double t_max = 0.0;    // post-burn-in horizon for the escape clock
    double burn_in = -1.0; // <0: default 3/gamma
    std::uint64_t seed = 1;
    std::uint64_t traj_id_offset = 0;
    WellMode mode = WellMode::cubic;
    std::optional<EscapeCriterion> criterion; // default depends on mode
    int averaging_window_steps = 0;
    int record_stride = 0;
    int threads = 0;                 // 0: hardware concurrency
    std::size_t segment_samples = 0; // 0: resolution rule (see ensemble_run)
};

struct EnsembleResult {
    std::vector<FirstPassageRecord> passages; // burn-in escapees excluded
    std::vector<SurvivalPoint> survival;
    RateResult rate;
    int burnin_escapes = 0;
    int escapes = 0;
    int censored = 0;
    double mean_energy = 0.0; // trajectory-averaged post-burn-in mean
    double mean_x2 = 0.0;
    double mean_p2 = 0.0;
    double horizon = 0.0;
};

// Runs ntraj mutually independent trajectories on a thread pool; every
// trajectory consumes its own derived random stream, so the result does not
// depend on scheduling, and ensembles with disjoint id ranges concatenate
// exactly.
inline EnsembleResult ensemble_run(const EnsembleConfig& cfg) {
    if (cfg.ntraj < 1) throw std::invalid_argument("ensemble_run: need at least one trajectory");
    if (!(cfg.t_max > 0.0)) throw std::invalid_argument("ensemble_run: t_max must be positive");
    const double dt = cfg.dt > 0.0 ? cfg.dt : default_timestep(cfg.well, cfg.bath);
    const double burn_in = cfg.burn_in >= 0.0
                               ? cfg.burn_in
                               : (cfg.bath.gamma > 0.0 ? 3.0 / cfg.bath.gamma : 0.0);
    const EscapeCriterion criterion = cfg.criterion.value_or(
        cfg.mode == WellMode::harmonic_test ? EscapeCriterion::energy
                                            : EscapeCriterion::position);

    // The synthesized spectrum is a tone comb with spacing 2*pi/(segment
    // samples * dt); the comb must resolve the resonance width gamma or the
    // oscillator starves between tones. Segments are sized for
    // gamma/spacing >= 40, within memory bounds.
    std::size_t segment_samples = cfg.segment_samples;
    if (segment_samples == 0) {
        const double target_time =
            cfg.bath.gamma > 0.0 ? 40.0 * 2.0 * std::numbers::pi / cfg.bath.gamma : 0.0;
        const double want = target_time / dt;
        segment_samples = std::size_t{1} << 16;
        while (segment_samples < want && segment_samples < (std::size_t{1} << 22))
            segment_samples <<= 1;
    }

    const double sigma_x =
        std::sqrt(cfg.well.zero_point_energy / (cfg.well.mass * cfg.well.omega0 * cfg.well.omega0));
    const double sigma_p = std::sqrt(cfg.well.mass * cfg.well.zero_point_energy);

    std::vector<TrajectoryOutcome> outcomes(cfg.ntraj);
    std::vector<std::uint64_t> noise_seeds(cfg.ntraj);
    std::atomic<int> cursor{0};
    std::atomic<bool> failed{false};
    std::string failure_message;
    std::mutex failure_mutex;

    const auto worker = [&]() {
        for (;;) {
            const int i = cursor.fetch_add(1);
            if (i >= cfg.ntraj || failed.load()) return;
            try {
                const std::uint64_t traj_id = cfg.traj_id_offset + static_cast<std::uint64_t>(i);
                Rng init_rng(derive_seed(cfg.seed, traj_id, 0));
                PhasePoint init;
                for (int attempt = 0;; ++attempt) {
                    init.x = sigma_x * init_rng.normal();
                    init.p = sigma_p * init_rng.normal();
                    const bool harmonic = cfg.mode == WellMode::harmonic_test;
                    const double eps = harmonic ? harmonic_energy(init, cfg.well)
                                                : total_energy(init, cfg.well);
                    const bool inside = eps < cfg.well.barrier_energy &&
                                        (harmonic || init.x < cfg.well.barrier_position);
                    if (inside) break;
                    if (attempt > 1000)
                        throw NumericFailure("ensemble_run: cannot sample initial state");
                }
                SegmentedNoise noise(cfg.bath, cfg.hbar, dt, cfg.seed, traj_id,
                                     segment_samples);
                TrajectoryOptions opt;
                opt.dt = dt;
                opt.t_max = burn_in + cfg.t_max;
                opt.burn_in = burn_in;
                opt.mode = cfg.mode;
                opt.criterion = criterion;
                opt.averaging_window_steps = cfg.averaging_window_steps;
                opt.record_stride = cfg.record_stride;
                opt.traj_id = traj_id;
                outcomes[i] = integrate_trajectory(init, noise, cfg.well, cfg.bath, opt);
                noise_seeds[i] = noise.first_segment_seed();
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failed.store(true);
                failure_message = e.what();
                return;
            }
        }
    };

    int nthreads = cfg.threads > 0 ? cfg.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min(nthreads, cfg.ntraj));
    {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) throw NumericFailure("ensemble_run: " + failure_message);

    EnsembleResult res;
    res.horizon = cfg.t_max;
    std::vector<double> times;
    std::vector<double> energy_cross_times;
    times.reserve(cfg.ntraj);
    double esum = 0.0, x2sum = 0.0, p2sum = 0.0;
    int stat_count = 0;
    for (int i = 0; i < cfg.ntraj; ++i) {
        const TrajectoryOutcome& o = outcomes[i];
        if (o.escaped_during_burnin) {
            ++res.burnin_escapes;
            continue;
        }
        FirstPassageRecord rec;
        rec.traj_id = cfg.traj_id_offset + static_cast<std::uint64_t>(i);
        rec.seed = noise_seeds[i];
        rec.censored = !o.escape_time.has_value();
        rec.escape_time = o.escape_time.value_or(cfg.t_max);
        res.passages.push_back(rec);
        times.push_back(rec.censored ? cfg.t_max : rec.escape_time);
        // diagnostic: first instantaneous energy crossing, censored at the
        // trajectory's own clock end
        const double clock_end = rec.censored ? cfg.t_max : rec.escape_time;
        energy_cross_times.push_back(o.first_energy_crossing
                                         ? std::min(*o.first_energy_crossing, clock_end)
                                         : clock_end);
        if (o.mean_energy > 0.0) {
            esum += o.mean_energy;
            x2sum += o.mean_x2;
            p2sum += o.mean_p2;
            ++stat_count;
        }
    }
    if (res.passages.empty())
        throw NumericFailure("ensemble_run: every trajectory escaped during burn-in");
    std::sort(res.passages.begin(), res.passages.end(),
              [](const FirstPassageRecord& a, const FirstPassageRecord& b) {
                  return a.traj_id < b.traj_id;
              });
    for (const auto& rec : res.passages) {
        if (rec.censored)
            ++res.censored;
        else
            ++res.escapes;
    }
    if (stat_count > 0) {
        res.mean_energy = esum / stat_count;
        res.mean_x2 = x2sum / stat_count;
        res.mean_p2 = p2sum / stat_count;
    }
    res.rate = estimate_rate(times, cfg.t_max);
    res.rate.diagnostics["burnin_escapes"] = static_cast<double>(res.burnin_escapes);
    res.rate.diagnostics["ntraj"] = static_cast<double>(cfg.ntraj);
    {
        // discrepancy between the position and instantaneous-energy escape
        // readings, reported as a rate
        double exposure = 0.0;
        std::size_t crossings = 0;
        std::size_t k = 0;
        for (int i = 0; i < cfg.ntraj; ++i) {
            const TrajectoryOutcome& o = outcomes[i];
            if (o.escaped_during_burnin) continue;
            const double clock_end =
                res.passages[k].censored ? cfg.t_max : res.passages[k].escape_time;
            if (o.first_energy_crossing && *o.first_energy_crossing <= clock_end) ++crossings;
            exposure += energy_cross_times[k];
            ++k;
        }
        if (exposure > 0.0)
            res.rate.diagnostics["energy_crossing_rate"] =
                static_cast<double>(crossings) / exposure;
    }

    const int npoints = 200;
    const double n = static_cast<double>(res.passages.size());
    res.survival.resize(npoints + 1);
    for (int k = 0; k <= npoints; ++k) {
        const double t = cfg.t_max * k / npoints;
        double alive = 0.0;
        for (const auto& rec : res.passages)
            if (rec.censored || rec.escape_time > t) alive += 1.0;
        const double s = alive / n;
        const double se = std::sqrt(std::max(s * (1.0 - s) / n, 0.0));
        res.survival[k] = SurvivalPoint{t, s, std::max(0.0, s - 1.96 * se),
                                        std::min(1.0, s + 1.96 * se)};
    }
    return res;
}

} // namespace qkramers
