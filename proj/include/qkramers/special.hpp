// special.hpp — special functions: exponential integral Ei, Laguerre
// functions of real order, regularized incomplete gamma.

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qkramers {

inline constexpr double euler_gamma = 0.577215664901532860606512090082;
inline constexpr double zeta_3 = 1.202056903159594285399738162; // Apery's constant

namespace detail {

// Power series Ei(y) = euler_gamma + ln y + sum_{k>=1} y^k/(k*k!).
// All terms are positive for y > 0, so there is no cancellation.
inline double ei_series(double y) {
    double sum = 0.0;
    double term = 1.0;
    for (int k = 1; k < 400; ++k) {
        term *= y / k;
        const double add = term / k;
        sum += add;
        if (add < sum * 1e-17) break;
    }
    return euler_gamma + std::log(y) + sum;
}

// Asymptotic expansion Ei(y) ~ e^y/y * sum_k k!/y^k, truncated at the
// smallest term. For y >= 40 the smallest term is below 1e-16 relative.
inline double ei_asymptotic(double y) {
    double sum = 1.0;
    double term = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double next = term * k / y;
        if (next >= term) break; // divergent tail reached
        term = next;
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return std::exp(y) / y * sum;
}

} // namespace detail

// Exponential integral Ei(y) = PV int_{-inf}^{y} e^u/u du for y > 0.
// Series below the switch point y = 40, asymptotic expansion above; both
// regimes meet the 1e-10 relative target on [1e-6, 700].
inline double expint_ei(double y) {
    if (!(y > 0.0))
        throw std::domain_error("expint_ei: argument must be positive");
    if (y > 709.0)
        throw std::range_error("expint_ei: argument too large, e^y overflows");
    constexpr double kSwitch = 40.0;
    return y < kSwitch ? detail::ei_series(y) : detail::ei_asymptotic(y);
}

// Laguerre function L_nu(y) of real (generally non-integer) order,
//   L_nu(y) = sum_{k>=0} [(-nu)(1-nu)...(k-1-nu)] y^k / (k!)^2,
// evaluated with compensated summation. Reduces to the Laguerre polynomials
// for nonnegative integer nu (the product terminates exactly).
inline double laguerre_eval(double nu, double y) {
    if (y < 0.0)
        throw std::domain_error("laguerre_eval: argument must be nonnegative");
    if (nu < 0.0)
        throw std::domain_error("laguerre_eval: order must be nonnegative");
    if (y > 400.0)
        throw std::range_error("laguerre_eval: argument above series overflow guard (400)");

    double sum = 1.0;
    double comp = 0.0; // Kahan compensation
    double term = 1.0;
    for (int k = 0; k < 5000; ++k) {
        term *= (k - nu) * y / ((k + 1.0) * (k + 1.0));
        if (term == 0.0) break; // integer order: exact polynomial
        const double t = sum + (term - comp);
        comp = (t - sum) - (term - comp);
        sum = t;
        if (k > y && std::abs(term) < std::abs(sum) * 1e-17) break;
    }
    return sum;
}

namespace detail {

// Regularized lower incomplete gamma P(a, x); series for x < a+1 and
// Lentz continued fraction for the complement otherwise.
inline double gammp(double a, double x) {
    if (!(a > 0.0) || x < 0.0)
        throw std::domain_error("gammp: requires a > 0 and x >= 0");
    if (x == 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int n = 0; n < 1000; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-16)
                return sum * std::exp(-x + a * std::log(x) - lg);
        }
        throw std::runtime_error("gammp: series failed to converge");
    }
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16)
            return 1.0 - std::exp(-x + a * std::log(x) - lg) * h;
    }
    throw std::runtime_error("gammp: continued fraction failed to converge");
}

} // namespace detail

} // namespace qkramers
