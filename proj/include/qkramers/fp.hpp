// fp.hpp — finite-volume discretization of the angle-averaged Fokker-Planck
// equation in energy space, implicit time evolution with an exact mass
// ledger, and eigenvalue extraction for the decay rate.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkramers/rates.hpp"

namespace qkramers {

// Uniform cell grid on [0, y_s] in the dimensionless energy y = eps/eps0.
struct EnergyGrid {
    double barrier_ratio = 0.0; // y_s
    int cells = 0;

    EnergyGrid() = default;
    EnergyGrid(double ys, int nc) : barrier_ratio(ys), cells(nc) {
        if (!(ys > 0.0)) throw std::invalid_argument("EnergyGrid: y_s must be positive");
        if (nc < 100) throw std::invalid_argument("EnergyGrid: need at least 100 cells");
    }

    double spacing() const { return barrier_ratio / cells; }
    double center(int i) const { return (i + 0.5) * spacing(); }
    double edge(int k) const { return k * spacing(); }
};

enum class OuterBoundary { absorbing, reflecting };

// Tridiagonal finite-volume operator for
//   dF/dt = 2 gamma d/dy ( y dF/dy + y F ),
// with exponentially fitted face fluxes so that e^{-y} is stationary to
// machine precision. The face at y = 0 carries no flux (the coefficient
// vanishes), the face at y_s is absorbing (F = 0 on the face) or reflecting
// in the test variant. Symmetrized by the weight e^{y/2}.
struct DiscreteOperator {
    EnergyGrid grid;
    double gamma = 0.0;
    double eps0 = 1.0;
    OuterBoundary boundary = OuterBoundary::absorbing;

    std::vector<double> diag;   // dF_i/dt coefficient of F_i
    std::vector<double> lower;  // coefficient of F_{i-1}
    std::vector<double> upper;  // coefficient of F_{i+1}
    std::vector<double> symoff; // off-diagonal of the symmetrized matrix

    // action out = A F
    void apply(std::span<const double> f, std::span<double> out) const {
        const int n = grid.cells;
        for (int i = 0; i < n; ++i) {
            double v = diag[i] * f[i];
            if (i > 0) v += lower[i] * f[i - 1];
            if (i + 1 < n) v += upper[i] * f[i + 1];
            out[i] = v;
        }
    }

    // Outgoing probability flux through the separatrix face (per unit time)
    // for the distribution F (density per unit eps).
    double outflux(std::span<const double> f) const {
        if (boundary == OuterBoundary::reflecting) return 0.0;
        const double h = grid.spacing();
        return eps0 * 4.0 * gamma * grid.barrier_ratio / h * std::exp(-0.5 * h) * f[grid.cells - 1];
    }
};

inline DiscreteOperator build_operator(const EnergyGrid& grid, double gamma, double eps0,
                                       OuterBoundary boundary = OuterBoundary::absorbing) {
    if (grid.cells < 100) throw std::invalid_argument("build_operator: degenerate grid");
    if (gamma < 0.0) throw std::invalid_argument("build_operator: gamma must be nonnegative");
    if (!(eps0 > 0.0)) throw std::invalid_argument("build_operator: eps0 must be positive");
    const int n = grid.cells;
    const double h = grid.spacing();
    const double ep = std::exp(0.5 * h);
    const double em = std::exp(-0.5 * h);
    DiscreteOperator op;
    op.grid = grid;
    op.gamma = gamma;
    op.eps0 = eps0;
    op.boundary = boundary;
    op.diag.assign(n, 0.0);
    op.lower.assign(n, 0.0);
    op.upper.assign(n, 0.0);
    op.symoff.assign(n > 1 ? n - 1 : 0, 0.0);
    const double c = 2.0 * gamma / (h * h);
    for (int i = 0; i < n; ++i) {
        const double y_left = grid.edge(i);
        const double y_right = grid.edge(i + 1);
        if (i > 0) {
            op.lower[i] = c * y_left * em;
            op.diag[i] -= c * y_left * ep;
        }
        if (i + 1 < n) {
            op.upper[i] = c * y_right * ep;
            op.diag[i] -= c * y_right * em;
            op.symoff[i] = c * y_right;
        } else if (boundary == OuterBoundary::absorbing) {
            // Dirichlet value on the face itself, half-cell gradient.
            op.diag[i] -= 2.0 * c * y_right * em;
        }
    }
    return op;
}

// Cell-averaged energy distribution (density per unit eps) plus the ledger
// of probability that has left through the separatrix.
struct EnergyDistribution {
    EnergyGrid grid;
    double eps0 = 1.0;
    std::vector<double> values;
    double escaped = 0.0;

    double mass() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s * eps0 * grid.spacing();
    }
};

// F proportional to e^{-y}, normalized to unit mass on the grid.
inline EnergyDistribution thermal_distribution(const EnergyGrid& grid, double eps0) {
    EnergyDistribution d;
    d.grid = grid;
    d.eps0 = eps0;
    d.values.resize(grid.cells);
    double s = 0.0;
    for (int i = 0; i < grid.cells; ++i) {
        d.values[i] = std::exp(-grid.center(i));
        s += d.values[i];
    }
    const double scale = 1.0 / (s * eps0 * grid.spacing());
    for (double& v : d.values) v *= scale;
    return d;
}

namespace detail {

// Solves the tridiagonal system in place; rhs is overwritten by the solution.
inline void thomas_solve(std::span<const double> lo, std::span<const double> di,
                         std::span<const double> up, std::span<double> rhs) {
    const std::size_t n = di.size();
    std::vector<double> cp(n);
    double piv = di[0];
    if (piv == 0.0) throw NumericFailure("thomas_solve: zero pivot");
    cp[0] = up[0] / piv;
    rhs[0] /= piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = di[i] - lo[i] * cp[i - 1];
        if (piv == 0.0) throw NumericFailure("thomas_solve: zero pivot");
        cp[i] = (i + 1 < n ? up[i] : 0.0) / piv;
        rhs[i] = (rhs[i] - lo[i] * rhs[i - 1]) / piv;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= cp[i] * rhs[i + 1];
}

// Number of eigenvalues of the symmetric tridiagonal (d, e) below x,
// by the Sturm/LDL^T sign count.
inline int sturm_count_below(std::span<const double> d, std::span<const double> e, double x) {
    int count = 0;
    double q = d[0] - x;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < d.size(); ++i) {
        double denom = q;
        if (std::abs(denom) < 1e-300) denom = denom < 0.0 ? -1e-300 : 1e-300;
        q = d[i] - x - e[i - 1] * e[i - 1] / denom;
        if (q < 0.0) ++count;
    }
    return count;
}

} // namespace detail

struct EvolveResult {
    std::vector<double> times;
    std::vector<double> mass;          // probability remaining in the well
    std::vector<double> escaped;       // cumulative probability past the separatrix
    std::vector<double> boundary_flux; // instantaneous outgoing flux
    EnergyDistribution state;          // final distribution with escaped ledger
};

struct EvolveOptions {
    int snapshot_stride = 0;     // 0 disables snapshots
    std::ostream* snapshot_sink = nullptr;
};

inline void write_snapshot(std::ostream& os, const EnergyDistribution& d, double t,
                           bool header = false) {
    if (header) os << "y,F,t\n";
    for (int i = 0; i < d.grid.cells; ++i)
        os << d.grid.center(i) << ',' << d.values[i] << ',' << t << '\n';
}

// Backward-Euler evolution; unconditionally stable and positivity
// preserving, with an exact mass ledger: mass(t) + escaped(t) equals the
// initial mass up to solver roundoff at every step.
inline EvolveResult evolve(const EnergyDistribution& f0, const DiscreteOperator& op, double dt,
                           double t_end, const EvolveOptions& opts = {}) {
    if (!(dt > 0.0)) throw std::invalid_argument("evolve: dt must be positive");
    if (f0.grid.cells != op.grid.cells)
        throw std::invalid_argument("evolve: distribution and operator grids differ");
    const int n = op.grid.cells;
    std::vector<double> lo(n), di(n), up(n);
    for (int i = 0; i < n; ++i) {
        lo[i] = -dt * op.lower[i];
        di[i] = 1.0 - dt * op.diag[i];
        up[i] = -dt * op.upper[i];
    }
    EvolveResult out;
    out.state = f0;
    const double m0 = f0.mass() + f0.escaped;
    double t = 0.0;
    out.times.push_back(0.0);
    out.mass.push_back(f0.mass());
    out.escaped.push_back(f0.escaped);
    out.boundary_flux.push_back(op.outflux(f0.values));
    if (opts.snapshot_sink) write_snapshot(*opts.snapshot_sink, out.state, 0.0, true);
    const std::size_t steps = static_cast<std::size_t>(std::ceil(t_end / dt));
    for (std::size_t s = 1; s <= steps; ++s) {
        const double before = out.state.mass();
        detail::thomas_solve(lo, di, up, out.state.values);
        const double after = out.state.mass();
        out.state.escaped += before - after;
        t = s * dt;
        out.times.push_back(t);
        out.mass.push_back(after);
        out.escaped.push_back(out.state.escaped);
        out.boundary_flux.push_back(op.outflux(out.state.values));
        if (after > before * (1.0 + 1e-12))
            throw NumericFailure("evolve: mass increased, scheme unstable");
        if (std::abs(after + out.state.escaped - m0) > 1e-8 * std::max(m0, 1.0))
            throw NumericFailure("evolve: mass ledger violated");
        if (opts.snapshot_stride > 0 && opts.snapshot_sink && s % opts.snapshot_stride == 0)
            write_snapshot(*opts.snapshot_sink, out.state, t);
    }
    return out;
}

// Least-squares slope of log(mass) over the trailing window; the late-time
// decay rate once the fast modes have died out.
inline double fitted_decay_rate(const EvolveResult& r, double window_fraction = 0.5) {
    const std::size_t n = r.times.size();
    const std::size_t i0 = static_cast<std::size_t>(n * (1.0 - window_fraction));
    double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
    std::size_t m = 0;
    for (std::size_t i = i0; i < n; ++i) {
        if (!(r.mass[i] > 0.0)) continue;
        const double lt = std::log(r.mass[i]);
        st += r.times[i];
        sl += lt;
        stt += r.times[i] * r.times[i];
        stl += r.times[i] * lt;
        ++m;
    }
    if (m < 2) throw NumericFailure("fitted_decay_rate: not enough samples");
    const double denom = m * stt - st * st;
    if (denom == 0.0) throw NumericFailure("fitted_decay_rate: degenerate fit");
    return -(m * stl - st * sl) / denom;
}

struct LowestMode {
    double rate = 0.0;          // physical decay rate (2*gamma included)
    EnergyDistribution mode;    // nonnegative eigenvector, unit mass
};

// Smallest decay eigenvalue and its eigenvector by inverse power iteration
// on the symmetrized tridiagonal matrix.
inline LowestMode lowest_mode(const DiscreteOperator& op, int max_iter = 500) {
    const int n = op.grid.cells;
    std::vector<double> d(n), e(op.symoff);
    for (int i = 0; i < n; ++i) d[i] = -op.diag[i]; // -S is SPD for the absorbing operator
    std::vector<double> lo(n), up(n);
    for (int i = 0; i < n; ++i) {
        lo[i] = i > 0 ? -e[i - 1] : 0.0;
        up[i] = i + 1 < n ? -e[i] : 0.0;
    }
    std::vector<double> v(n), w(n);
    {
        double nrm = 0.0;
        for (int i = 0; i < n; ++i) {
            v[i] = std::exp(-0.5 * op.grid.center(i));
            nrm += v[i] * v[i];
        }
        nrm = std::sqrt(nrm);
        for (double& x : v) x /= nrm;
    }
    double lambda = 0.0;
    double lambda_prev = -1.0;
    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
        w = v;
        detail::thomas_solve(lo, d, up, w); // w = (-S)^{-1} v
        double dot = 0.0, nrm2 = 0.0;
        for (int i = 0; i < n; ++i) {
            dot += v[i] * w[i];
            nrm2 += w[i] * w[i];
        }
        if (!(nrm2 > 0.0)) throw NumericFailure("lowest_mode: iteration collapsed");
        // Rayleigh quotient at w uses (-S) w = v, so no cancellation enters:
        // lambda = w^T (-S) w / w^T w = w^T v / w^T w.
        lambda = dot / nrm2;
        const double nrm = std::sqrt(nrm2);
        for (int i = 0; i < n; ++i) v[i] = w[i] / nrm;
        if (it > 0 && std::abs(lambda - lambda_prev) <= 1e-12 * std::abs(lambda)) {
            converged = true;
            break;
        }
        lambda_prev = lambda;
    }
    if (!converged) throw NumericFailure("lowest_mode: inverse iteration did not converge");
    LowestMode out;
    out.rate = lambda;
    out.mode.grid = op.grid;
    out.mode.eps0 = op.eps0;
    out.mode.values.resize(n);
    double sign = 0.0;
    for (double x : v) sign += x;
    const double flip = sign < 0.0 ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i)
        out.mode.values[i] = flip * v[i] * std::exp(-0.5 * op.grid.center(i));
    const double m = out.mode.mass();
    if (m > 0.0)
        for (double& x : out.mode.values) x /= m;
    return out;
}

// k smallest decay eigenvalues by Sturm-sequence bisection on the
// symmetrized matrix; handles the reflecting variant whose lowest
// eigenvalue is zero.
inline std::vector<double> spectrum_smallest(const DiscreteOperator& op, int k) {
    const int n = op.grid.cells;
    if (k < 1 || k > n) throw std::invalid_argument("spectrum_smallest: bad mode count");
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) d[i] = -op.diag[i];
    const std::vector<double>& e = op.symoff;
    double hi0 = 0.0;
    for (int i = 0; i < n; ++i) {
        double g = d[i];
        if (i > 0) g += std::abs(e[i - 1]);
        if (i + 1 < n) g += std::abs(e[i]);
        hi0 = std::max(hi0, g);
    }
    std::vector<double> out(k);
    for (int j = 1; j <= k; ++j) {
        double lo = -1e-12 * hi0 - 1e-300;
        double hi = hi0;
        for (int it = 0; it < 120; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (detail::sturm_count_below(d, e, mid) >= j)
                hi = mid;
            else
                lo = mid;
            if (hi - lo <= 1e-14 * std::max(std::abs(hi), 1.0)) break;
        }
        out[j - 1] = 0.5 * (lo + hi);
    }
    return out;
}

// Instantaneous outgoing flux; dividing by the current mass gives the
// instantaneous escape rate.
inline double flux_at_separatrix(const EnergyDistribution& f, const DiscreteOperator& op) {
    if (f.grid.cells != op.grid.cells)
        throw std::invalid_argument("flux_at_separatrix: grid mismatch");
    return op.outflux(f.values);
}

} // namespace qkramers
