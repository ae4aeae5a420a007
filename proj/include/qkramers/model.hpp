// model.hpp — cubic metastable well: potential, derived constants, harmonic
// orbits and the action-angle / Fourier representation used by every method.

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace qkramers {

// Particle of mass M in V(x) = (1/2) M Omega0^2 x^2 - (lambda/6) x^3.
// The barrier top sits at x_s = 2 M Omega0^2 / lambda with height
// eps_s = V(x_s) = 2 M^3 Omega0^6 / (3 lambda^2); eps0 = hbar Omega0 / 2
// is the zero-point energy scale that plays the role of kT here.
struct WellModel {
    double mass = 1.0;            // M
    double omega0 = 1.0;          // small-oscillation frequency
    double cubic_coupling = 1.0;  // lambda
    double hbar = 1.0;

    // derived
    double barrier_position = 0.0;   // x_s
    double barrier_energy = 0.0;     // eps_s
    double zero_point_energy = 0.0;  // eps0 = hbar*omega0/2
    double barrier_ratio = 0.0;      // y_s = eps_s/eps0
};

struct PhasePoint {
    double x = 0.0;
    double p = 0.0;
};

struct ActionAngle {
    double theta = 0.0;  // in [0, 2*pi)
    double action = 0.0; // j >= 0
};

// Fourier table of the orbit, x(theta,j) = sum_n e^{i n theta} x_n(j).
// Coefficients are real and even in n for the orbits used here, so only
// n >= 0 is stored; coeff[n] = x_n = x_{-n}.
struct FourierTable {
    std::vector<double> coeff;

    double at(int n) const {
        const std::size_t k = static_cast<std::size_t>(n < 0 ? -n : n);
        return k < coeff.size() ? coeff[k] : 0.0;
    }
    int max_index() const { return static_cast<int>(coeff.size()) - 1; }
};

inline WellModel derive_well(double mass, double omega0, double cubic_coupling, double hbar) {
    if (!(mass > 0.0) || !(omega0 > 0.0) || !(cubic_coupling > 0.0) || !(hbar > 0.0))
        throw std::invalid_argument("derive_well: all parameters must be strictly positive");
    WellModel w;
    w.mass = mass;
    w.omega0 = omega0;
    w.cubic_coupling = cubic_coupling;
    w.hbar = hbar;
    w.barrier_position = 2.0 * mass * omega0 * omega0 / cubic_coupling;
    w.barrier_energy = 2.0 * std::pow(mass, 3) * std::pow(omega0, 6) / (3.0 * cubic_coupling * cubic_coupling);
    w.zero_point_energy = 0.5 * hbar * omega0;
    w.barrier_ratio = w.barrier_energy / w.zero_point_energy;
    return w;
}

// Convenience constructor in the default unit system M = Omega0 = hbar = 1:
// experiments are parameterized by the dimensionless barrier y_s alone, and
// lambda = sqrt(4/(3 y_s)) reproduces it.
inline WellModel well_from_barrier(double barrier_ratio) {
    if (!(barrier_ratio > 0.0))
        throw std::invalid_argument("well_from_barrier: barrier ratio must be positive");
    return derive_well(1.0, 1.0, std::sqrt(4.0 / (3.0 * barrier_ratio)), 1.0);
}

inline double potential(double x, const WellModel& w) {
    return 0.5 * w.mass * w.omega0 * w.omega0 * x * x - w.cubic_coupling / 6.0 * x * x * x;
}

inline double force(double x, const WellModel& w) {
    return -w.mass * w.omega0 * w.omega0 * x + 0.5 * w.cubic_coupling * x * x;
}

inline double kinetic_energy(const PhasePoint& s, const WellModel& w) {
    return 0.5 * s.p * s.p / w.mass;
}

inline double total_energy(const PhasePoint& s, const WellModel& w) {
    return kinetic_energy(s, w) + potential(s.x, w);
}

// Energy of the quadratic part only; this is the energy variable of the
// angle-averaged description, eps = p^2/2M + (1/2) M Omega0^2 x^2.
inline double harmonic_energy(const PhasePoint& s, const WellModel& w) {
    return 0.5 * s.p * s.p / w.mass + 0.5 * w.mass * w.omega0 * w.omega0 * s.x * s.x;
}

// Free harmonic evolution by dt (nonlinear term dropped); exact rotation in
// phase space, conserves harmonic_energy.
inline PhasePoint harmonic_orbit(const PhasePoint& s, double dt, const WellModel& w) {
    const double c = std::cos(w.omega0 * dt);
    const double sn = std::sin(w.omega0 * dt);
    const double mo = w.mass * w.omega0;
    return PhasePoint{s.x * c + s.p / mo * sn, s.p * c - mo * s.x * sn};
}

// Harmonic action-angle chart: j = eps/Omega0 and
// e^{i theta} = (M Omega0 x - i p)/sqrt((M Omega0 x)^2 + p^2).
// theta is reported as 0 at the fixed point j = 0.
inline ActionAngle to_action_angle(const PhasePoint& s, const WellModel& w) {
    const double mo = w.mass * w.omega0;
    const double j = harmonic_energy(s, w) / w.omega0;
    if (j == 0.0) return ActionAngle{0.0, 0.0};
    double theta = std::atan2(-s.p, mo * s.x);
    if (theta < 0.0) theta += 2.0 * std::numbers::pi;
    if (theta >= 2.0 * std::numbers::pi) theta = 0.0;
    return ActionAngle{theta, j};
}

inline PhasePoint from_action_angle(const ActionAngle& aa, const WellModel& w) {
    const double mo = w.mass * w.omega0;
    const double amp = std::sqrt(2.0 * aa.action / mo);
    return PhasePoint{amp * std::cos(aa.theta), -mo * amp * std::sin(aa.theta)};
}

// Fourier coefficients of the harmonic orbit: x_{+-1} = (1/2) sqrt(2j/(M Omega0)),
// all higher harmonics vanish in this approximation.
inline FourierTable fourier_coeffs_harmonic(double action, const WellModel& w) {
    if (action < 0.0)
        throw std::domain_error("fourier_coeffs_harmonic: action must be nonnegative");
    FourierTable t;
    t.coeff = {0.0, 0.5 * std::sqrt(2.0 * action / (w.mass * w.omega0))};
    return t;
}

} // namespace qkramers
