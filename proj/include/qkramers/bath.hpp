// bath.hpp — ohmic environment: spectral density, noise spectrum, resonant
// coefficients and the angle-averaged drift/diffusion coefficients.

#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "qkramers/model.hpp"

namespace qkramers {

// Ohmic bath I(omega) = eta*omega with a sharp regularizing cutoff.
// gamma = eta/(2M) is the dissipation frequency; kT = 0 is the case of
// interest, finite kT enters only the classical cross-checks.
struct BathSpec {
    double eta = 0.02;    // friction coefficient
    double gamma = 0.01;  // eta / (2M)
    double cutoff = 50.0; // omega_c
    double kT = 0.0;
};

inline BathSpec make_bath(double eta, double mass, double cutoff = 50.0, double kT = 0.0) {
    if (eta < 0.0) throw std::invalid_argument("make_bath: eta must be nonnegative");
    if (!(cutoff > 0.0)) throw std::invalid_argument("make_bath: cutoff must be positive");
    if (kT < 0.0) throw std::invalid_argument("make_bath: kT must be nonnegative");
    if (!(mass > 0.0)) throw std::invalid_argument("make_bath: mass must be positive");
    return BathSpec{eta, eta / (2.0 * mass), cutoff, kT};
}

inline BathSpec bath_from_gamma(double gamma, double mass = 1.0, double cutoff = 50.0, double kT = 0.0) {
    if (gamma < 0.0) throw std::invalid_argument("bath_from_gamma: gamma must be nonnegative");
    return make_bath(2.0 * mass * gamma, mass, cutoff, kT);
}

// Averaged drift and diffusion coefficients of the action-space equation.
struct AveragedCoeffs {
    double drift = 0.0;     // Dbar
    double diffusion = 0.0; // Nbar
};

// Resonant parts of the mode coefficients: the Fourier transforms of the
// kernels evaluated on the orbit harmonics. The drift weight is the real
// coefficient of D~(n Omega) = i*eta*n*Omega (convention: the leading i is
// carried by the averaging formula, not stored here).
struct ResonantCoeffs {
    double drift = 0.0; // eta * n * Omega, sign of n retained
    double noise = 0.0; // eta * |n| * Omega
};

inline double spectral_density(double omega, const BathSpec& b) {
    if (omega < 0.0)
        throw std::domain_error("spectral_density: frequency must be nonnegative");
    return omega <= b.cutoff ? b.eta * omega : 0.0;
}

// Two-sided noise spectrum N~(omega). At kT = 0 this is eta*|omega|; at
// finite temperature eta*omega*coth(hbar*omega/2kT), whose omega -> 0 limit
// 2*eta*kT/hbar is taken analytically. Even in omega, zero beyond cutoff.
inline double noise_spectrum(double omega, const BathSpec& b, double hbar = 1.0) {
    const double w = std::abs(omega);
    if (w > b.cutoff) return 0.0;
    if (b.kT == 0.0) return b.eta * w;
    const double u = 0.5 * hbar * w / b.kT;
    if (u < 1e-8) return 2.0 * b.eta * b.kT / hbar;
    return b.eta * w / std::tanh(u);
}

inline ResonantCoeffs resonant_coeffs(int n, double orbit_frequency, const BathSpec& b) {
    if (!(orbit_frequency > 0.0))
        throw std::invalid_argument("resonant_coeffs: orbit frequency must be positive");
    if (n == 0) return ResonantCoeffs{0.0, 0.0};
    const double w = std::abs(n) * orbit_frequency;
    if (w > b.cutoff) return ResonantCoeffs{0.0, 0.0};
    return ResonantCoeffs{b.eta * n * orbit_frequency, b.eta * w};
}

// Angle-averaged coefficients for the zero-temperature ohmic case:
//   Dbar = 2 eta Omega sum_{n>=0} |x_n|^2 n^2,
//   Nbar =   eta Omega sum_{n>=0} |x_n|^2 n^3.
// For the single-harmonic table this reduces to Dbar = 2*gamma*j and
// Nbar = gamma*j.
inline AveragedCoeffs averaged_coeffs(const FourierTable& table, double orbit_frequency,
                                      const BathSpec& b) {
    if (!(orbit_frequency > 0.0))
        throw std::invalid_argument("averaged_coeffs: orbit frequency must be positive");
    AveragedCoeffs out;
    for (int n = 0; n <= table.max_index(); ++n) {
        const double xn = table.at(n);
        if (!std::isfinite(xn))
            throw std::invalid_argument("averaged_coeffs: table entries must be finite");
        if (n * orbit_frequency > b.cutoff) continue;
        const double w = xn * xn * n * n;
        out.drift += 2.0 * b.eta * orbit_frequency * w;
        out.diffusion += b.eta * orbit_frequency * w * n;
    }
    return out;
}

// Target autocovariance of the zero-temperature noise on a uniform time
// grid: C(tau) = int_{-wc}^{wc} (dw/2pi) hbar*eta*|w| e^{-i w tau}
//             = (hbar*eta/pi) [ (cos(wc*tau) - 1)/tau^2 + wc*sin(wc*tau)/tau ].
// Used to verify synthesized noise, not to generate it. The closed form
// covers the zero-temperature case only.
inline std::vector<double> noise_kernel_sampled(std::span<const double> t_grid, const BathSpec& b,
                                                double hbar) {
    if (b.kT != 0.0)
        throw std::invalid_argument("noise_kernel_sampled: closed form requires kT = 0");
    if (t_grid.size() >= 3) {
        const double h0 = t_grid[1] - t_grid[0];
        for (std::size_t i = 2; i < t_grid.size(); ++i) {
            const double h = t_grid[i] - t_grid[i - 1];
            if (std::abs(h - h0) > 1e-9 * std::max(std::abs(h0), 1.0))
                throw std::invalid_argument("noise_kernel_sampled: grid must be uniform");
        }
    }
    const double wc = b.cutoff;
    const double scale = hbar * b.eta / std::numbers::pi;
    std::vector<double> out;
    out.reserve(t_grid.size());
    for (const double tau : t_grid) {
        const double u = wc * tau;
        if (std::abs(u) < 1e-4) {
            // C(tau) = (hbar*eta/pi) wc^2 [1/2 - u^2/8 + u^4/144 - ...]
            out.push_back(scale * wc * wc * (0.5 - u * u / 8.0 + u * u * u * u / 144.0));
        } else {
            out.push_back(scale * ((std::cos(u) - 1.0) / (tau * tau) + wc * std::sin(u) / tau));
        }
    }
    return out;
}

} // namespace qkramers
