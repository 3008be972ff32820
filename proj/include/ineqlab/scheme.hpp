#ifndef INEQLAB_SCHEME_HPP
#define INEQLAB_SCHEME_HPP

// Semi-implicit time discretization of
//   d_t u + div[ u^n grad( u^(alpha-1) Lap u^alpha ) ] = 0,   zero-flux BCs,
// as a chain of coupled elliptic pairs per step: a linear equation for the
// flux potential F and a nonlinear one for the new density rho,
//
//   (rho - f_prev)/tau = -div[ (rho+tau)^n grad F ] + tau F
//   -Lap rho^alpha + tau rho^p = -coupling(rho) F + tau ,
//
// with coupling rho^(1-eps)/(rho^(alpha-eps)+tau) in the general variant and
// rho^(1-alpha) in the alpha<1 variant. Each step runs damped Newton on the
// stacked (rho, F) unknowns with a banded Jacobian; an alternation sweep is
// retried once if Newton diverges. Positivity is preserved by the line
// search, never by clamping.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "linsolve.hpp"

namespace ineqlab {

struct NewtonOptions {
    int max_iter = 40;
    double tol = 1e-11;        // l2 norm of the scaled stacked residual
    double damping_min = 1e-9; // smallest admissible line-search factor
};

enum class SchemeVariant { general, alpha_lt_1 };

struct SchemeParams {
    double alpha = 1.0;
    double n = 1.0;       // mobility exponent
    double epsilon = 0.0; // regularization exponent, [0, 1)
    double p = 3.0;       // confinement exponent, > max(dim/2, 2)
    double tau = 1e-3;
    SchemeVariant variant = SchemeVariant::general;
    NewtonOptions newton;

    // Growth threshold for the mobility hypothesis; the dim = 4 case admits
    // any value in (0,1), fixed here to 1/2.
    static double sigma(int dim) {
        if (dim < 4) return 1.0;
        if (dim > 4) return 4.0 / dim;
        return 0.5;
    }

    static SchemeParams thin_film(double mobility = 1.0, double tau_ = 1e-3) {
        SchemeParams p;
        p.alpha = 1.0;
        p.n = mobility;
        p.epsilon = 0.0;
        p.variant = SchemeVariant::general;
        p.tau = tau_;
        return p;
    }

    static SchemeParams quantum_drift_diffusion(double tau_ = 1e-3) {
        SchemeParams p;
        p.alpha = 0.5;
        p.n = 1.0;
        p.epsilon = 0.0;
        p.variant = SchemeVariant::alpha_lt_1;
        p.tau = tau_;
        return p;
    }

    void validate(int dim) const {
        if (!(alpha > 0.0)) throw DomainError("scheme: alpha must be positive");
        if (!(tau > 0.0 && tau < 1.0)) throw DomainError("scheme: tau must lie in (0,1)");
        if (!(epsilon >= 0.0 && epsilon < 1.0))
            throw DomainError("scheme: epsilon must lie in [0,1)");
        if (!(p > std::max(dim / 2.0, 2.0)))
            throw DomainError("scheme: p must exceed max(dim/2, 2)");
        if (variant == SchemeVariant::alpha_lt_1 && !(alpha < 1.0))
            throw DomainError("scheme: alpha<1 variant needs alpha in (0,1)");
        if (variant == SchemeVariant::general && !(alpha >= 1.0))
            throw DomainError("scheme: general variant needs alpha >= 1");
        if (newton.max_iter < 1 || !(newton.tol > 0.0) || !(newton.damping_min > 0.0))
            throw DomainError("scheme: malformed Newton options");
    }
};

namespace scheme_detail {

inline double coupling(double rho, const SchemeParams& p) {
    if (p.variant == SchemeVariant::alpha_lt_1) return std::pow(rho, 1.0 - p.alpha);
    return std::pow(rho, 1.0 - p.epsilon) / (std::pow(rho, p.alpha - p.epsilon) + p.tau);
}

inline double coupling_deriv(double rho, const SchemeParams& p) {
    if (p.variant == SchemeVariant::alpha_lt_1)
        return (1.0 - p.alpha) * std::pow(rho, -p.alpha);
    const double num = std::pow(rho, 1.0 - p.epsilon);
    const double den = std::pow(rho, p.alpha - p.epsilon) + p.tau;
    const double dnum = (1.0 - p.epsilon) * std::pow(rho, -p.epsilon);
    const double dden = (p.alpha - p.epsilon) * std::pow(rho, p.alpha - p.epsilon - 1.0);
    return (dnum * den - num * dden) / (den * den);
}

// Iterate faces of the grid; fn(node_minus, node_plus, axis, boundary_minus,
// boundary_plus). 1D grids have nx-1 faces; 2D grids have both axis families.
template <class Fn>
inline void for_each_face(const Grid& g, Fn&& fn) {
    const int nx = g.points[0];
    const int ny = g.dim == 2 ? g.points[1] : 1;
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix + 1 < nx; ++ix)
            fn(g.index(ix, iy), g.index(ix + 1, iy), 0, ix == 0, ix + 2 == nx);
    if (g.dim == 2)
        for (int iy = 0; iy + 1 < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix)
                fn(g.index(ix, iy), g.index(ix, iy + 1), 1, iy == 0, iy + 2 == ny);
}

} // namespace scheme_detail

// -div[(rho+tau)^n grad F] + tau F with face-averaged mobility and mirrored
// boundary faces (the weighted operator is symmetric positive definite).
inline Field apply_flux_operator(const Field& rho, const Field& F, const SchemeParams& p) {
    const Grid& g = rho.grid;
    Field out = make_field(g);
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = p.tau * F.values[i];
    scheme_detail::for_each_face(g, [&](std::size_t m, std::size_t q, int axis,
                                        bool bd_m, bool bd_p) {
        const double h = g.spacing(axis);
        const double a = std::pow(0.5 * (rho.values[m] + rho.values[q]) + p.tau, p.n);
        const double flux = a * (F.values[q] - F.values[m]) / (h * h);
        out.values[m] -= flux * (bd_m ? 2.0 : 1.0);
        out.values[q] += flux * (bd_p ? 2.0 : 1.0);
    });
    return out;
}

// Linear elliptic solve for the flux potential given the density:
//   -div[(rho+tau)^n grad F] + tau F = (rho - f_prev)/tau .
// Direct tridiagonal in 1D; preconditioned CG on the weighted
// symmetrization in 2D, to relative residual 1e-12.
inline Field solve_flux(const Field& rho, const Field& f_prev, const SchemeParams& p) {
    const Grid& g = rho.grid;
    const std::size_t m = g.size();
    std::vector<double> rhs(m);
    for (std::size_t i = 0; i < m; ++i)
        rhs[i] = (rho.values[i] - f_prev.values[i]) / p.tau;

    if (g.dim == 1) {
        const int nx = g.points[0];
        const double ih2 = 1.0 / (g.spacing(0) * g.spacing(0));
        std::vector<double> lower(nx, 0.0), diag(nx, p.tau), upper(nx, 0.0);
        for (int i = 0; i + 1 < nx; ++i) {
            const double a =
                std::pow(0.5 * (rho.values[i] + rho.values[i + 1]) + p.tau, p.n) * ih2;
            const double wl = (i == 0) ? 2.0 : 1.0;
            const double wr = (i + 2 == nx) ? 2.0 : 1.0;
            diag[i] += wl * a;
            upper[i] -= wl * a;
            diag[i + 1] += wr * a;
            lower[i + 1] -= wr * a;
        }
        Field F = make_field(g);
        F.values = tridiagonal_solve(std::move(lower), std::move(diag), std::move(upper),
                                     std::move(rhs));
        return F;
    }

    // Weighted symmetrization W*A (trapezoid weights) keeps CG applicable.
    std::vector<double> wts(m);
    for (int iy = 0; iy < g.points[1]; ++iy)
        for (int ix = 0; ix < g.points[0]; ++ix)
            wts[g.index(ix, iy)] = node_weight(g, ix, iy);
    std::vector<double> diag(m);
    for (std::size_t i = 0; i < m; ++i) diag[i] = wts[i] * p.tau;
    scheme_detail::for_each_face(g, [&](std::size_t mm, std::size_t q, int axis,
                                        bool bd_m, bool bd_p) {
        const double h = g.spacing(axis);
        const double a =
            std::pow(0.5 * (rho.values[mm] + rho.values[q]) + p.tau, p.n) / (h * h);
        diag[mm] += wts[mm] * a * (bd_m ? 2.0 : 1.0);
        diag[q] += wts[q] * a * (bd_p ? 2.0 : 1.0);
    });
    std::vector<double> inv_diag(m), wrhs(m);
    for (std::size_t i = 0; i < m; ++i) {
        inv_diag[i] = 1.0 / diag[i];
        wrhs[i] = wts[i] * rhs[i];
    }
    Field F = make_field(g);
    auto apply = [&](const std::vector<double>& x) {
        Field xf = make_field(g);
        xf.values = x;
        Field ax = apply_flux_operator(rho, xf, p);
        for (std::size_t i = 0; i < m; ++i) ax.values[i] *= wts[i];
        return ax.values;
    };
    F.values = cg_solve(apply, wrhs, inv_diag, 1e-12, static_cast<int>(10 * m) + 200);
    return F;
}

// Nodal residual of the density equation,
//   -Lap rho^alpha + tau rho^p + coupling(rho) F - tau .
inline Field density_residual(const Field& rho, const Field& F, const SchemeParams& p) {
    if (!(min_value(rho) > 0.0))
        throw PositivityError("density_residual: nonpositive density node");
    Field lap = laplacian(power_field(rho, p.alpha));
    Field out = make_field(rho.grid);
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double r = rho.values[i];
        out.values[i] = -lap.values[i] + p.tau * std::pow(r, p.p) +
                        scheme_detail::coupling(r, p) * F.values[i] - p.tau;
    }
    return out;
}

// Flux potential expressed from the density equation alone (used as the
// Newton initial guess and as a convergence cross-check):
//   general:  F = (rho^(alpha-1) + tau rho^(eps-1)) (Lap rho^alpha - tau rho^p + tau)
//   alpha<1:  F = rho^(alpha-1) (Lap rho^alpha - tau rho^p + tau)
inline Field explicit_flux(const Field& rho, const SchemeParams& p) {
    if (!(min_value(rho) > 0.0))
        throw PositivityError("explicit_flux: nonpositive density node");
    Field lap = laplacian(power_field(rho, p.alpha));
    Field out = make_field(rho.grid);
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double r = rho.values[i];
        const double core = lap.values[i] - p.tau * std::pow(r, p.p) + p.tau;
        double factor = std::pow(r, p.alpha - 1.0);
        if (p.variant == SchemeVariant::general)
            factor += p.tau * std::pow(r, p.epsilon - 1.0);
        out.values[i] = factor * core;
    }
    return out;
}

// Scaled stacked residual, interleaved as (rho_0, F_0, rho_1, F_1, ...):
// density rows carry the density equation, flux rows carry tau * (flux
// equation) so both blocks live on comparable scales. Evaluated in extended
// precision: the density rows subtract O(1/h^2) Laplacian terms whose
// double-precision cancellation floor would sit above the Newton tolerance
// on fine grids.
inline std::vector<double> stacked_residual(const Field& rho, const Field& F,
                                            const Field& f_prev, const SchemeParams& p) {
    if (!(min_value(rho) > 0.0))
        throw PositivityError("stacked_residual: nonpositive density node");
    const Grid& g = rho.grid;
    const std::size_t m = g.size();
    const int nx = g.points[0];
    const int ny = g.dim == 2 ? g.points[1] : 1;
    const long double tau = p.tau;

    std::vector<long double> pa(m);
    for (std::size_t i = 0; i < m; ++i)
        pa[i] = std::pow(static_cast<long double>(rho.values[i]),
                         static_cast<long double>(p.alpha));

    std::vector<double> r(2 * m);
    std::vector<long double> af(m);
    for (std::size_t i = 0; i < m; ++i)
        af[i] = tau * static_cast<long double>(F.values[i]);
    scheme_detail::for_each_face(g, [&](std::size_t mm, std::size_t q, int axis,
                                        bool bd_m, bool bd_p) {
        const long double h2 =
            static_cast<long double>(g.spacing(axis)) * g.spacing(axis);
        const long double a =
            std::pow(0.5L * (rho.values[mm] + rho.values[q]) + tau,
                     static_cast<long double>(p.n));
        const long double flux =
            a * (static_cast<long double>(F.values[q]) - F.values[mm]) / h2;
        af[mm] -= flux * (bd_m ? 2.0L : 1.0L);
        af[q] += flux * (bd_p ? 2.0L : 1.0L);
    });

    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const std::size_t i = g.index(ix, iy);
            long double lap = 0.0L;
            {
                const long double h2 =
                    static_cast<long double>(g.spacing(0)) * g.spacing(0);
                const int lo = detail::reflect(ix - 1, nx);
                const int hi = detail::reflect(ix + 1, nx);
                lap += (pa[g.index(lo, iy)] - 2.0L * pa[i] + pa[g.index(hi, iy)]) / h2;
            }
            if (g.dim == 2) {
                const long double h2 =
                    static_cast<long double>(g.spacing(1)) * g.spacing(1);
                const int lo = detail::reflect(iy - 1, ny);
                const int hi = detail::reflect(iy + 1, ny);
                lap += (pa[g.index(ix, lo)] - 2.0L * pa[i] + pa[g.index(ix, hi)]) / h2;
            }
            const long double rv = rho.values[i];
            long double coup;
            if (p.variant == SchemeVariant::alpha_lt_1)
                coup = std::pow(rv, static_cast<long double>(1.0 - p.alpha));
            else
                coup = std::pow(rv, static_cast<long double>(1.0 - p.epsilon)) /
                       (std::pow(rv, static_cast<long double>(p.alpha - p.epsilon)) + tau);
            const long double dres = -lap + tau * std::pow(rv, (long double)p.p) +
                                     coup * static_cast<long double>(F.values[i]) - tau;
            r[2 * i] = static_cast<double>(dres);
            r[2 * i + 1] = static_cast<double>(
                tau * af[i] -
                (static_cast<long double>(rho.values[i]) - f_prev.values[i]));
        }
    }
    return r;
}

inline BandMatrix stacked_jacobian(const Field& rho, const Field& F, const SchemeParams& p) {
    const Grid& g = rho.grid;
    const std::size_t m = g.size();
    const int band = g.dim == 1 ? 3 : 2 * g.points[0] + 1;
    BandMatrix J(static_cast<int>(2 * m), band, band);

    // Density rows: diagonal part, then the -Lap rho^alpha stencil below.
    for (std::size_t i = 0; i < m; ++i) {
        const double r = rho.values[i];
        J.add(static_cast<int>(2 * i), static_cast<int>(2 * i),
              p.tau * p.p * std::pow(r, p.p - 1.0) +
                  scheme_detail::coupling_deriv(r, p) * F.values[i]);
        J.add(static_cast<int>(2 * i), static_cast<int>(2 * i + 1),
              scheme_detail::coupling(r, p));
        // Flux rows: time-coupling diagonal and the tau*tau F mass term.
        J.add(static_cast<int>(2 * i + 1), static_cast<int>(2 * i), -1.0);
        J.add(static_cast<int>(2 * i + 1), static_cast<int>(2 * i + 1), p.tau * p.tau);
    }

    // -Lap(rho^alpha): second-difference stencil with mirrored boundary,
    // chain rule through alpha * rho^(alpha-1) at the source node.
    const int nx = g.points[0];
    const int ny = g.dim == 2 ? g.points[1] : 1;
    auto dpow = [&](std::size_t j) { return p.alpha * std::pow(rho.values[j], p.alpha - 1.0); };
    for (int axis = 0; axis < g.dim; ++axis) {
        const double ih2 = 1.0 / (g.spacing(axis) * g.spacing(axis));
        const int n = g.points[axis];
        for (int iy = 0; iy < ny; ++iy) {
            for (int ix = 0; ix < nx; ++ix) {
                const int i = axis == 0 ? ix : iy;
                const int lo = detail::reflect(i - 1, n);
                const int hi = detail::reflect(i + 1, n);
                const std::size_t k = g.index(ix, iy);
                const std::size_t kl = axis == 0 ? g.index(lo, iy) : g.index(ix, lo);
                const std::size_t kh = axis == 0 ? g.index(hi, iy) : g.index(ix, hi);
                const int row = static_cast<int>(2 * k);
                J.add(row, static_cast<int>(2 * k), 2.0 * ih2 * dpow(k));
                J.add(row, static_cast<int>(2 * kl), -ih2 * dpow(kl));
                J.add(row, static_cast<int>(2 * kh), -ih2 * dpow(kh));
            }
        }
    }

    // Flux rows, face by face: tau * d/dF and tau * d/drho of the
    // divergence term. Face flux = a(mid)(F_q - F_m)/h^2.
    scheme_detail::for_each_face(g, [&](std::size_t mm, std::size_t q, int axis,
                                        bool bd_m, bool bd_p) {
        const double h = g.spacing(axis);
        const double ih2 = 1.0 / (h * h);
        const double mid = 0.5 * (rho.values[mm] + rho.values[q]) + p.tau;
        const double a = std::pow(mid, p.n);
        const double da = 0.5 * p.n * std::pow(mid, p.n - 1.0);
        const double dF = (F.values[q] - F.values[mm]) * ih2;
        const double wm = bd_m ? 2.0 : 1.0;
        const double wp = bd_p ? 2.0 : 1.0;
        const int row_m = static_cast<int>(2 * mm + 1);
        const int row_q = static_cast<int>(2 * q + 1);
        // d/dF: node m gets -wm*flux, node q gets +wp*flux.
        J.add(row_m, static_cast<int>(2 * q + 1), -p.tau * wm * a * ih2);
        J.add(row_m, static_cast<int>(2 * mm + 1), p.tau * wm * a * ih2);
        J.add(row_q, static_cast<int>(2 * mm + 1), -p.tau * wp * a * ih2);
        J.add(row_q, static_cast<int>(2 * q + 1), p.tau * wp * a * ih2);
        // d/drho through the face mobility (same sensitivity to both ends).
        J.add(row_m, static_cast<int>(2 * mm), -p.tau * wm * da * dF);
        J.add(row_m, static_cast<int>(2 * q), -p.tau * wm * da * dF);
        J.add(row_q, static_cast<int>(2 * mm), p.tau * wp * da * dF);
        J.add(row_q, static_cast<int>(2 * q), p.tau * wp * da * dF);
    });
    return J;
}

struct StepState {
    Field rho;
    Field flux_potential;
    int newton_iters = 0;
    double residual_norm = 0.0;
    double min_rho = 0.0;
};

namespace scheme_detail {

inline double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Smallest residual norm the density rows can express: one ulp of a stored
// density value moves its row by ~eps * 2 alpha rho^alpha / h^2, so no
// tolerance below that level is achievable no matter how the iteration is
// run. The stopping rule takes the max of the user tolerance and this.
inline double representability_floor(const Field& rho, const SchemeParams& p) {
    const Grid& g = rho.grid;
    double sum_ih2 = 0.0;
    for (int axis = 0; axis < g.dim; ++axis)
        sum_ih2 += 2.0 / (g.spacing(axis) * g.spacing(axis));
    double amp = 0.0;
    for (double v : rho.values) amp = std::max(amp, std::pow(v, p.alpha));
    return 0.5 * std::numeric_limits<double>::epsilon() * p.alpha * amp * sum_ih2 *
           std::sqrt(2.0 * static_cast<double>(rho.size()));
}

inline StepState newton_solve(const Field& f_prev, Field rho, Field F,
                              const SchemeParams& p) {
    const std::size_t m = rho.size();
    const double tol = std::max(p.newton.tol, representability_floor(rho, p));
    std::vector<double> r = stacked_residual(rho, F, f_prev, p);
    double rnorm = norm2(r);
    std::vector<double> history{rnorm};
    int iters = 0;
    while (rnorm > tol) {
        if (iters >= p.newton.max_iter)
            throw NewtonDivergence("newton: iteration budget exhausted", rho.values,
                                   F.values, history);
        BandMatrix J = stacked_jacobian(rho, F, p);
        std::vector<double> rhs(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) rhs[i] = -r[i];
        BandLU lu(J);
        std::vector<double> delta = lu.solve_refined(J, rhs);

        double t = 1.0;
        bool accepted = false;
        bool positivity_blocked = false;
        while (t >= p.newton.damping_min) {
            Field rho_t = rho, F_t = F;
            double mn = 1e300;
            for (std::size_t i = 0; i < m; ++i) {
                rho_t.values[i] += t * delta[2 * i];
                F_t.values[i] += t * delta[2 * i + 1];
                mn = std::min(mn, rho_t.values[i]);
            }
            if (!(mn > positivity_floor)) {
                positivity_blocked = true;
                t *= 0.5;
                continue;
            }
            positivity_blocked = false;
            std::vector<double> r_t = stacked_residual(rho_t, F_t, f_prev, p);
            const double rn_t = norm2(r_t);
            if (rn_t < rnorm) { // NaN-safe: comparison fails on NaN
                rho = std::move(rho_t);
                F = std::move(F_t);
                r = std::move(r_t);
                rnorm = rn_t;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            if (positivity_blocked)
                throw PositivityBreach("newton: no damping keeps the density positive");
            throw NewtonDivergence("newton: line search stalled", rho.values, F.values,
                                   history);
        }
        ++iters;
        history.push_back(rnorm);
    }
    StepState s;
    s.min_rho = min_value(rho);
    s.rho = std::move(rho);
    s.flux_potential = std::move(F);
    s.newton_iters = iters;
    s.residual_norm = rnorm;
    return s;
}

// One alternation sweep: refresh F by the linear solve, then relax rho
// node by node on the density equation (scalar Newton, neighbors lagged).
inline void alternation_sweep(const Field& f_prev, Field& rho, Field& F,
                              const SchemeParams& p) {
    F = solve_flux(rho, f_prev, p);
    const Grid& g = rho.grid;
    Field pw = power_field(rho, p.alpha);
    const int nx = g.points[0];
    const int ny = g.dim == 2 ? g.points[1] : 1;
    auto local_lap = [&](int ix, int iy) {
        double lap = 0.0;
        const double ihx2 = 1.0 / (g.spacing(0) * g.spacing(0));
        const double c = pw.values[g.index(ix, iy)];
        lap += (pw.values[g.index(detail::reflect(ix - 1, nx), iy)] - 2.0 * c +
                pw.values[g.index(detail::reflect(ix + 1, nx), iy)]) *
               ihx2;
        if (g.dim == 2) {
            const double ihy2 = 1.0 / (g.spacing(1) * g.spacing(1));
            lap += (pw.values[g.index(ix, detail::reflect(iy - 1, ny))] - 2.0 * c +
                    pw.values[g.index(ix, detail::reflect(iy + 1, ny))]) *
                   ihy2;
        }
        return lap;
    };
    double diag2 = 2.0 / (g.spacing(0) * g.spacing(0));
    if (g.dim == 2) diag2 += 2.0 / (g.spacing(1) * g.spacing(1));
    for (int pass = 0; pass < 3; ++pass) {
        for (int iy = 0; iy < ny; ++iy) {
            for (int ix = 0; ix < nx; ++ix) {
                const std::size_t i = g.index(ix, iy);
                for (int it = 0; it < 6; ++it) {
                    const double r = rho.values[i];
                    const double res = -local_lap(ix, iy) + p.tau * std::pow(r, p.p) +
                                       coupling(r, p) * F.values[i] - p.tau;
                    const double d = diag2 * p.alpha * std::pow(r, p.alpha - 1.0) +
                                     p.tau * p.p * std::pow(r, p.p - 1.0) +
                                     coupling_deriv(r, p) * F.values[i];
                    if (!(std::abs(d) > 0.0)) break;
                    double delta = -res / d;
                    double t = 1.0;
                    while (r + t * delta <= positivity_floor && t > 1e-8) t *= 0.5;
                    if (r + t * delta <= positivity_floor) break;
                    rho.values[i] = r + t * delta;
                    pw.values[i] = std::pow(rho.values[i], p.alpha);
                    if (std::abs(t * delta) < 1e-14 * std::max(1.0, std::abs(r))) break;
                }
            }
        }
    }
}

} // namespace scheme_detail

// One implicit step from f_prev. Newton starts from (f_prev,
// explicit_flux(f_prev)); on divergence one alternation sweep reseeds it.
inline StepState step(const Field& f_prev, const SchemeParams& p) {
    p.validate(f_prev.grid.dim);
    Field rho0 = f_prev;
    Field F0 = explicit_flux(f_prev, p);
    try {
        return scheme_detail::newton_solve(f_prev, rho0, F0, p);
    } catch (const NewtonDivergence& nd) {
        Field rho = f_prev;
        bool usable = nd.rho.size() == f_prev.size();
        if (usable)
            for (double v : nd.rho)
                if (!(std::isfinite(v) && v > 0.0)) { usable = false; break; }
        if (usable) rho.values = nd.rho;
        Field F = make_field(f_prev.grid);
        scheme_detail::alternation_sweep(f_prev, rho, F, p);
        return scheme_detail::newton_solve(f_prev, rho, F, p);
    } catch (const PositivityBreach&) {
        Field rho = f_prev;
        Field F = make_field(f_prev.grid);
        scheme_detail::alternation_sweep(f_prev, rho, F, p);
        return scheme_detail::newton_solve(f_prev, rho, F, p);
    }
}

struct Trajectory {
    Field u0;
    SchemeParams params;
    std::vector<StepState> states;
    bool failed = false;
    std::string failure_note;
    bool tau_warning = false; // tau >= 0.1 is flagged, not rejected

    int steps() const { return static_cast<int>(states.size()); }
    double time_of(int k) const { return params.tau * k; }

    // Piecewise-constant interpolant: value rho_k on (t_{k-1}, t_k], u0 at 0.
    const Field& u_bar(double t) const {
        if (t <= 0.0 || states.empty()) return u0;
        int k = static_cast<int>(std::ceil(t / params.tau - 1e-12));
        k = std::clamp(k, 1, steps());
        return states[k - 1].rho;
    }

    // Piecewise-linear interpolant in time.
    Field u_tilde(double t) const {
        if (t <= 0.0 || states.empty()) return u0;
        const double s = std::min(t / params.tau, static_cast<double>(steps()));
        const int k = std::min(static_cast<int>(std::ceil(s - 1e-12)), steps());
        const Field& lo = k >= 2 ? states[k - 2].rho : u0;
        const Field& hi = states[k - 1].rho;
        const double w = s - (k - 1);
        Field out = make_field(u0.grid);
        for (std::size_t i = 0; i < out.size(); ++i)
            out.values[i] = (1.0 - w) * lo.values[i] + w * hi.values[i];
        return out;
    }
};

// March `steps` implicit steps from u0. Newton failures abort the march and
// return the partial trajectory flagged as failed; precondition violations
// throw.
inline Trajectory run(const Field& u0, const SchemeParams& p, int steps_count) {
    p.validate(u0.grid.dim);
    if (!(min_value(u0) > 0.0))
        throw PositivityError("run: initial datum must be strictly positive");
    if (steps_count < 1) throw DomainError("run: need at least one step");
    Trajectory traj;
    traj.u0 = u0;
    traj.params = p;
    traj.tau_warning = p.tau >= 0.1;
    traj.states.reserve(steps_count);
    const Field* prev = &u0;
    for (int k = 0; k < steps_count; ++k) {
        try {
            traj.states.push_back(step(*prev, p));
        } catch (const NewtonDivergence& e) {
            traj.failed = true;
            traj.failure_note = std::string("step ") + std::to_string(k + 1) + ": " + e.what();
            break;
        } catch (const PositivityBreach& e) {
            traj.failed = true;
            traj.failure_note = std::string("step ") + std::to_string(k + 1) + ": " + e.what();
            break;
        }
        prev = &traj.states.back().rho;
    }
    return traj;
}

// Horizon form: j steps of size tau = T/j.
inline Trajectory run(const Field& u0, SchemeParams p, double T, int j) {
    if (!(T > 0.0) || j < 1) throw DomainError("run: need T > 0 and j >= 1");
    p.tau = T / j;
    return run(u0, p, j);
}

} // namespace ineqlab

#endif
