// rates.hpp — escape-rate computations: perturbative lowest eigenvalue,
// Laguerre-root eigenvalue, Kramers constant-flux quadrature, asymptotic
// rate, and the instanton tunneling rates used for comparison.

#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkramers/model.hpp"
#include "qkramers/quadrature.hpp"
#include "qkramers/special.hpp"

namespace qkramers {

struct NumericFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Method {
    asymptotic,
    perturbative,
    laguerre_root,
    kramers_quadrature,
    fp_numeric,
    langevin_mc,
    tunnel_isolated,
    tunnel_env,
};

inline const char* method_name(Method m) {
    switch (m) {
        case Method::asymptotic: return "asymptotic";
        case Method::perturbative: return "perturbative";
        case Method::laguerre_root: return "laguerre_root";
        case Method::kramers_quadrature: return "kramers_quadrature";
        case Method::fp_numeric: return "fp_numeric";
        case Method::langevin_mc: return "langevin_mc";
        case Method::tunnel_isolated: return "tunnel_isolated";
        case Method::tunnel_env: return "tunnel_env";
    }
    return "unknown";
}

inline std::optional<Method> method_from_name(const std::string& s) {
    for (Method m : {Method::asymptotic, Method::perturbative, Method::laguerre_root,
                     Method::kramers_quadrature, Method::fp_numeric, Method::langevin_mc,
                     Method::tunnel_isolated, Method::tunnel_env})
        if (s == method_name(m)) return m;
    return std::nullopt;
}

// 95% interval; carried only by statistical estimates.
struct Uncertainty {
    double lo = 0.0;
    double hi = 0.0;
};

struct RateResult {
    double rate = 0.0;                       // 1/time
    std::optional<double> rbar;              // r/(2*gamma) where meaningful
    Method method = Method::asymptotic;
    std::map<std::string, double> diagnostics;
    std::optional<Uncertainty> uncertainty;  // present iff method is statistical
};

// Smallest positive root of L_nu(y_s) = 0 searched on (0, 1]; for a finite
// barrier this is a small perturbation of the infinite-barrier eigenvalue 0,
// and L_1(y_s) = 1 - y_s < 0 guarantees a sign change for y_s >= 2.
inline double lowest_eigenvalue(double barrier_ratio) {
    if (!(barrier_ratio >= 2.0))
        throw std::invalid_argument("lowest_eigenvalue: requires y_s >= 2");
    double lo = 0.0;             // L_{0+} = 1 > 0
    double hi = 1.0;
    double flo = 1.0;
    double fhi = laguerre_eval(hi, barrier_ratio);
    if (!(flo > 0.0 && fhi < 0.0))
        throw NumericFailure("lowest_eigenvalue: no sign change on (0, 1]");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = laguerre_eval(mid, barrier_ratio);
        if (fm > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
        if ((hi - lo) < 1e-10 * hi) break;
    }
    // secant polish inside the bracket
    double root = (lo * fhi - hi * flo) / (fhi - flo);
    if (!(root > lo && root < hi)) root = 0.5 * (lo + hi);
    return root;
}

// r = 2 gamma / (Ei(y_s) - ln y_s - euler_gamma), the O(rbar) perturbative
// solution of the boundary condition.
inline RateResult rate_perturbative(double barrier_ratio, double gamma) {
    if (!(barrier_ratio >= 2.0))
        throw std::invalid_argument("rate_perturbative: requires y_s >= 2");
    if (!(gamma > 0.0))
        throw std::invalid_argument("rate_perturbative: requires gamma > 0");
    const double denom = expint_ei(barrier_ratio) - std::log(barrier_ratio) - euler_gamma;
    RateResult r;
    r.method = Method::perturbative;
    r.rate = 2.0 * gamma / denom;
    r.rbar = 1.0 / denom;
    r.diagnostics["denominator"] = denom;
    return r;
}

inline RateResult rate_laguerre_root(double barrier_ratio, double gamma) {
    if (!(gamma > 0.0))
        throw std::invalid_argument("rate_laguerre_root: requires gamma > 0");
    const double rbar = lowest_eigenvalue(barrier_ratio);
    RateResult r;
    r.method = Method::laguerre_root;
    r.rate = 2.0 * gamma * rbar;
    r.rbar = rbar;
    r.diagnostics["boundary_residual"] = laguerre_eval(rbar, barrier_ratio);
    return r;
}

// r = 2 gamma y_s e^{-y_s}: the large-barrier form of the perturbative rate.
inline RateResult rate_asymptotic(double barrier_ratio, double gamma) {
    if (!(barrier_ratio > 0.0))
        throw std::invalid_argument("rate_asymptotic: requires y_s > 0");
    if (gamma < 0.0)
        throw std::invalid_argument("rate_asymptotic: requires gamma >= 0");
    RateResult r;
    r.method = Method::asymptotic;
    r.rate = 2.0 * gamma * barrier_ratio * std::exp(-barrier_ratio);
    r.rbar = barrier_ratio * std::exp(-barrier_ratio);
    return r;
}

// Constant-flux profile F(eps) = Phi0/(2 gamma eps0) e^{-eps/eps0}
// [Ei(eps_s/eps0) - Ei(eps/eps0)]; vanishes at the separatrix and diverges
// logarithmically at eps -> 0 (flux injection point).
inline double kramers_profile(double eps, double flux, const WellModel& w, double gamma) {
    if (eps == 0.0)
        throw std::domain_error(
            "kramers_profile: logarithmic singularity at eps = 0; value defined for eps > 0 only");
    if (!(eps > 0.0) || !(eps <= w.barrier_energy))
        throw std::invalid_argument("kramers_profile: requires 0 < eps <= eps_s");
    if (!(gamma > 0.0))
        throw std::invalid_argument("kramers_profile: requires gamma > 0");
    const double y = eps / w.zero_point_energy;
    const double ys = w.barrier_ratio;
    const double bracket = (y == ys) ? 0.0 : expint_ei(ys) - expint_ei(y);
    return flux / (2.0 * gamma * w.zero_point_energy) * std::exp(-y) * bracket;
}

// Flux fixed by unit normalization of the constant-flux profile:
//   Phi0 = 2 gamma / int_0^{y_s} e^{-y} [Ei(y_s) - Ei(y)] dy,
// evaluated by adaptive quadrature. Analytically the integral equals
// Ei(y_s) - ln y_s - euler_gamma, so this must agree with the perturbative
// rate; the saddle-point flux 2 gamma y_s e^{-y_s} is reported as a
// diagnostic.
inline RateResult kramers_flux(double barrier_ratio, double gamma) {
    if (!(barrier_ratio >= 2.0))
        throw std::invalid_argument("kramers_flux: requires y_s >= 2");
    if (!(gamma > 0.0))
        throw std::invalid_argument("kramers_flux: requires gamma > 0");
    const double ys = barrier_ratio;
    const double ei_ys = expint_ei(ys);
    const auto integrand = [&](double y) {
        return y <= 0.0 ? 0.0 : std::exp(-y) * (ei_ys - expint_ei(y));
    };
    // The integrand has an integrable log singularity at y = 0; the
    // substitution y = a t^2 flattens it for the quadrature.
    const double a = std::min(1.0, 0.5 * ys);
    const double scale = ei_ys; // magnitude of the full integral
    double integral;
    try {
        const auto inner = [&](double t) {
            const double y = a * t * t;
            return y == 0.0 ? 0.0 : 2.0 * a * t * std::exp(-y) * (ei_ys - expint_ei(y));
        };
        integral = adaptive_simpson(inner, 0.0, 1.0, 1e-9 * scale) +
                   adaptive_simpson(integrand, a, ys, 1e-9 * scale);
    } catch (const QuadratureFailure& e) {
        throw NumericFailure(std::string("kramers_flux: ") + e.what());
    }
    if (!(integral > 0.0))
        throw NumericFailure("kramers_flux: normalization integral not positive");
    RateResult r;
    r.method = Method::kramers_quadrature;
    r.rate = 2.0 * gamma / integral;
    r.rbar = 1.0 / integral;
    r.diagnostics["normalization_integral"] = integral;
    r.diagnostics["closed_form_flux"] = 2.0 * gamma * ys * std::exp(-ys);
    return r;
}

// Lowest decay mode in closed form, f(y) = norm * e^{-y} L_rbar(y), with
// unit norm under the weighted product (f, g) = int_0^{y_s} e^{y} f g dy.
struct ModeFunction {
    double rbar = 0.0;
    double norm = 1.0;
    double barrier_ratio = 0.0;

    double value(double y) const { return norm * std::exp(-y) * laguerre_eval(rbar, y); }
};

inline ModeFunction make_lowest_mode(double barrier_ratio) {
    ModeFunction m;
    m.barrier_ratio = barrier_ratio;
    m.rbar = lowest_eigenvalue(barrier_ratio);
    const auto w2 = [&](double y) {
        const double l = laguerre_eval(m.rbar, y);
        return std::exp(-y) * l * l;
    };
    const double norm2 = adaptive_simpson(w2, 0.0, barrier_ratio, 1e-12);
    m.norm = 1.0 / std::sqrt(norm2);
    return m;
}

namespace detail {

// Composite Simpson when the node count allows it, trapezoid otherwise.
inline double grid_integral(std::span<const double> values, double h) {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    if (n % 2 == 1) {
        double s = values[0] + values[n - 1];
        for (std::size_t i = 1; i + 1 < n; ++i) s += values[i] * (i % 2 == 1 ? 4.0 : 2.0);
        return s * h / 3.0;
    }
    double s = 0.5 * (values[0] + values[n - 1]);
    for (std::size_t i = 1; i + 1 < n; ++i) s += values[i];
    return s * h;
}

// Raw overlap integral N int_0^{y_s} L_rbar(y) f(y) dy on a uniform node
// grid spanning [0, y_s]; no precondition checks.
inline double mode_overlap(std::span<const double> f_init, const ModeFunction& mode) {
    if (f_init.size() < 2)
        throw std::invalid_argument("mode_overlap: need at least two grid nodes");
    const double h = mode.barrier_ratio / static_cast<double>(f_init.size() - 1);
    std::vector<double> prod(f_init.size());
    for (std::size_t i = 0; i < f_init.size(); ++i)
        prod[i] = laguerre_eval(mode.rbar, i * h) * f_init[i];
    return mode.norm * grid_integral(prod, h);
}

} // namespace detail

// Overlap coefficient c_r of an initial energy distribution with the lowest
// mode. f_init is sampled on uniform nodes over [0, eps_s] (in y units) and
// must integrate to one.
inline double mode_amplitude(std::span<const double> f_init, double rbar, double barrier_ratio) {
    if (f_init.size() < 2)
        throw std::invalid_argument("mode_amplitude: need at least two grid nodes");
    const double h = barrier_ratio / static_cast<double>(f_init.size() - 1);
    const double mass = detail::grid_integral(f_init, h);
    if (std::abs(mass - 1.0) > 1e-6)
        throw std::invalid_argument("mode_amplitude: initial distribution must be normalized");
    ModeFunction mode;
    mode.barrier_ratio = barrier_ratio;
    mode.rbar = rbar;
    const auto w2 = [&](double y) {
        const double l = laguerre_eval(rbar, y);
        return std::exp(-y) * l * l;
    };
    mode.norm = 1.0 / std::sqrt(adaptive_simpson(w2, 0.0, barrier_ratio, 1e-12));
    return detail::mode_overlap(f_init, mode);
}

inline double survival(double t, double rate) {
    if (t < 0.0) throw std::invalid_argument("survival: requires t >= 0");
    if (rate < 0.0) throw std::invalid_argument("survival: requires rate >= 0");
    return std::exp(-rate * t);
}

// Instanton tunneling rate of the isolated system,
// r_t ~ Omega0 sqrt(y_s) e^{-(18/5) y_s}. Order-of-magnitude prefactor.
inline RateResult tunneling_rate_isolated(double barrier_ratio, double omega0) {
    if (barrier_ratio < 0.0)
        throw std::invalid_argument("tunneling_rate_isolated: requires y_s >= 0");
    RateResult r;
    r.method = Method::tunnel_isolated;
    r.rate = omega0 * std::sqrt(barrier_ratio) * std::exp(-3.6 * barrier_ratio);
    r.diagnostics["order_of_magnitude"] = 1.0;
    r.diagnostics["exponent"] = -3.6 * barrier_ratio;
    return r;
}

inline constexpr double tunneling_env_coefficient() {
    // 54 zeta(3)/pi^3 = 2.09348169855750714...
    constexpr double pi3 = 31.00627668029982017547631506710; // pi^3
    return 54.0 * zeta_3 / pi3;
}

// Environment-modified tunneling rate: the ohmic coupling adds
// (54 zeta(3)/pi^3)(gamma/Omega0) to the exponent slope.
inline RateResult tunneling_rate_env(double barrier_ratio, double gamma_over_omega0,
                                     double omega0) {
    if (barrier_ratio < 0.0)
        throw std::invalid_argument("tunneling_rate_env: requires y_s >= 0");
    if (gamma_over_omega0 < 0.0)
        throw std::invalid_argument("tunneling_rate_env: requires gamma/Omega0 >= 0");
    const double slope = 3.6 + tunneling_env_coefficient() * gamma_over_omega0;
    RateResult r;
    r.method = Method::tunnel_env;
    r.rate = omega0 * std::sqrt(barrier_ratio) * std::exp(-slope * barrier_ratio);
    r.diagnostics["order_of_magnitude"] = 1.0;
    r.diagnostics["exponent"] = -slope * barrier_ratio;
    r.diagnostics["env_coefficient"] = tunneling_env_coefficient();
    return r;
}

struct RateComparison {
    std::vector<RateResult> rates;
    double activation_over_tunnel = 0.0; // asymptotic rate / isolated tunneling rate
};

// All deterministic rates at one parameter point, plus the ratio of the
// activation-like rate to the isolated tunneling rate.
inline RateComparison rate_compare(double barrier_ratio, double gamma, double omega0) {
    RateComparison out;
    out.rates.push_back(rate_asymptotic(barrier_ratio, gamma));
    out.rates.push_back(rate_perturbative(barrier_ratio, gamma));
    out.rates.push_back(rate_laguerre_root(barrier_ratio, gamma));
    out.rates.push_back(kramers_flux(barrier_ratio, gamma));
    out.rates.push_back(tunneling_rate_isolated(barrier_ratio, omega0));
    out.rates.push_back(tunneling_rate_env(barrier_ratio, gamma / omega0, omega0));
    out.activation_over_tunnel = out.rates[0].rate / out.rates[4].rate;
    return out;
}

} // namespace qkramers
