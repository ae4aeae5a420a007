// quadrature.hpp — adaptive Simpson integration.

#pragma once

#include <cmath>
#include <stdexcept>

namespace qkramers {

struct QuadratureFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

template <class F>
double adaptive_simpson_step(const F& f, double a, double b, double fa, double fm, double fb,
                             double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol || (b - a) < 1e-14 * std::abs(m))
        return left + right + delta / 15.0;
    if (depth <= 0)
        throw QuadratureFailure("adaptive_simpson: refinement depth exhausted");
    return adaptive_simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

// Integrates f over [a, b] to the requested tolerance (interpreted as an
// absolute tolerance; callers with a scale estimate pass rel*scale).
template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol, int max_depth = 48) {
    if (!(b > a)) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

} // namespace qkramers
