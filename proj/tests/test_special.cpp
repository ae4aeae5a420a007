#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qkramers/special.hpp"

using namespace qkramers;

TEST_CASE("expint_ei against the extended-precision series") {
    for (double y : {1e-6, 1e-4, 0.01, 0.5, 1.0, 2.0, 5.0, 10.0, 15.0, 25.0, 39.9, 40.1,
                     60.0, 120.0, 400.0, 700.0}) {
        const double ref = static_cast<double>(oracles::ei_series(static_cast<long double>(y)));
        CHECK(expint_ei(y) == doctest::Approx(ref).epsilon(1e-10));
    }
    CHECK(expint_ei(1.0) == doctest::Approx(1.8951178163559368).epsilon(1e-12));
    CHECK(expint_ei(10.0) == doctest::Approx(2492.2289762418778).epsilon(1e-12));
}

TEST_CASE("expint_ei small-argument expansion") {
    const double y = 1e-4;
    const double lead = expint_ei(y) - std::log(y) - euler_gamma;
    CHECK(lead == doctest::Approx(y).epsilon(1e-6));
}

TEST_CASE("expint_ei domain") {
    CHECK_THROWS_AS(expint_ei(0.0), std::domain_error);
    CHECK_THROWS_AS(expint_ei(-1.0), std::domain_error);
    CHECK_THROWS_AS(expint_ei(720.0), std::range_error);
}

TEST_CASE("laguerre_eval matches the integer polynomials") {
    // L_0..L_5 coefficients from the Rodrigues formula
    const auto L2 = [](double y) { return 1.0 - 2.0 * y + y * y / 2.0; };
    const auto L3 = [](double y) {
        return 1.0 - 3.0 * y + 1.5 * y * y - y * y * y / 6.0;
    };
    const auto L4 = [](double y) {
        return 1.0 - 4.0 * y + 3.0 * y * y - (2.0 / 3.0) * y * y * y + y * y * y * y / 24.0;
    };
    const auto L5 = [](double y) {
        return 1.0 - 5.0 * y + 5.0 * y * y - (5.0 / 3.0) * y * y * y +
               (5.0 / 24.0) * y * y * y * y - y * y * y * y * y / 120.0;
    };
    for (int i = 0; i <= 40; ++i) {
        const double y = 0.5 * i;
        const double scale = std::max({1.0, std::abs(L4(y)), std::abs(L5(y))});
        CHECK(laguerre_eval(0.0, y) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(laguerre_eval(1.0, y) == doctest::Approx(1.0 - y).epsilon(1e-13).scale(1.0 + y));
        CHECK(laguerre_eval(2.0, y) == doctest::Approx(L2(y)).epsilon(1e-12).scale(scale));
        CHECK(laguerre_eval(3.0, y) == doctest::Approx(L3(y)).epsilon(1e-12).scale(scale));
        CHECK(laguerre_eval(4.0, y) == doctest::Approx(L4(y)).epsilon(1e-12).scale(scale));
        CHECK(laguerre_eval(5.0, y) == doctest::Approx(L5(y)).epsilon(1e-12).scale(scale));
    }
    CHECK(laguerre_eval(1.0, 2.0) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("laguerre_eval near-zero order expansion") {
    // L_nu(y) = 1 + nu (ln y + euler_gamma - Ei(y)) + O(nu^2)
    const double nu = 1e-4;
    const double y = 5.0;
    const double lin = 1.0 + nu * (std::log(y) + euler_gamma - expint_ei(y));
    CHECK(laguerre_eval(nu, y) == doctest::Approx(0.996200729661927).epsilon(1e-9));
    CHECK(laguerre_eval(nu, y) == doctest::Approx(lin).epsilon(1e-6));
}

TEST_CASE("laguerre_eval against the ODE route") {
    for (double nu : {0.05, 0.33, 0.7}) {
        for (double y : {0.5, 2.0, 6.0, 12.0}) {
            const double ref = oracles::laguerre_ode(nu, y);
            CHECK(laguerre_eval(nu, y) == doctest::Approx(ref).epsilon(1e-7).scale(1.0));
        }
    }
}

TEST_CASE("laguerre_eval domain and range guards") {
    CHECK_THROWS_AS(laguerre_eval(0.5, -1.0), std::domain_error);
    CHECK_THROWS_AS(laguerre_eval(-0.5, 1.0), std::domain_error);
    CHECK_THROWS_AS(laguerre_eval(0.5, 401.0), std::range_error);
    CHECK_NOTHROW(laguerre_eval(0.5, 399.0));
}

TEST_CASE("regularized incomplete gamma") {
    // P(1, x) = 1 - e^{-x}
    for (double x : {0.1, 1.0, 3.0, 10.0})
        CHECK(detail::gammp(1.0, x) == doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-12));
    // P(a, a) tends to 1/2 for large a
    CHECK(detail::gammp(500.0, 500.0) == doctest::Approx(0.5).epsilon(0.02));
    CHECK(detail::gammp(2.0, 0.0) == 0.0);
    CHECK_THROWS_AS(detail::gammp(0.0, 1.0), std::domain_error);
}

TEST_CASE("zeta(3) constant") {
    CHECK(zeta_3 == doctest::Approx(oracles::zeta3()).epsilon(1e-12));
}
