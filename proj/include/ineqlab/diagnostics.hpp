#ifndef INEQLAB_DIAGNOSTICS_HPP
#define INEQLAB_DIAGNOSTICS_HPP

// Post-processing over trajectories: entropy functionals, mobility
// primitives used as test functions in the a priori estimates, the
// dissipation identity split, and the weak-form residual of the solution
// definition. Everything here is read-only over immutable trajectories.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "scheme.hpp"

namespace ineqlab {

// Entropy integral for mobility exponent n:
//   G(s) = s (n > 1), s^(2-n) (n < 1), s ln s - s (n = 1),
// with s ln s continued by 0 at the positivity floor. Exponents within 1e-9
// of 1 snap to the logarithmic branch.
inline double entropy_integral(const Field& u, double n) {
    Field gval = make_field(u.grid);
    if (std::abs(n - 1.0) <= 1e-9) {
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double s = u.values[i];
            const double slns = s > positivity_floor ? s * std::log(s) : 0.0;
            gval.values[i] = slns - s;
        }
    } else if (n > 1.0) {
        gval.values = u.values;
    } else {
        for (std::size_t i = 0; i < u.size(); ++i)
            gval.values[i] = std::pow(std::max(u.values[i], 0.0), 2.0 - n);
    }
    return integrate(gval);
}

// Primitive of the inverse shifted mobility,
//   K(r) = int_1^r (s + tau)^(-n) ds,
// in closed form.
inline double mobility_primitive(double r, double n, double tau) {
    if (std::abs(n - 1.0) <= 1e-9) return std::log((r + tau) / (1.0 + tau));
    return (std::pow(r + tau, 1.0 - n) - std::pow(1.0 + tau, 1.0 - n)) / (1.0 - n);
}

namespace diag_detail {

// Adaptive Simpson on [a, b] with absolute tolerance; depth-limited.
template <class Fn>
inline double simpson_rec(const Fn& f, double a, double b, double fa, double fm, double fb,
                          double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class Fn>
inline double adaptive_simpson(const Fn& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 60);
}

} // namespace diag_detail

// Weighted primitive int_1^r s t^(s-1) (t + tau)^(-n) dt, evaluated after the
// substitution y = t^s so the integrand stays bounded down to r = 0. Closed
// forms cover s = 1 (reduces to the plain primitive) and n = 0.
inline double power_mobility_primitive(double r, double s, double n, double tau) {
    if (!(s > 0.0)) throw DomainError("power_mobility_primitive: exponent must be positive");
    if (!(r >= 0.0)) throw DomainError("power_mobility_primitive: lower limit is r >= 0");
    if (std::abs(s - 1.0) <= 1e-12) return mobility_primitive(r, n, tau);
    if (n == 0.0) return std::pow(r, s) - 1.0;
    const double ys = std::pow(r, s);
    auto f = [&](double y) { return std::pow(std::pow(y, 1.0 / s) + tau, -n); };
    if (ys >= 1.0) return diag_detail::adaptive_simpson(f, 1.0, ys, 1e-10);
    return -diag_detail::adaptive_simpson(f, ys, 1.0, 1e-10);
}

// Split of integrate(F * laplacian(rho)) into the six terms produced by
// substituting the explicit flux formula. The gradient-square terms are
// evaluated through the face pairing (dirichlet_form), which makes the split
// an algebraic identity of the discretization rather than an O(h^2) one:
//   t1 = int lap(rho) rho^(a-1) lap(rho^a)
//   t2 = tau int lap(rho) rho^(e-1) lap(rho^a)
//   t3 = tau D(rho, rho^(p+a-1))       [continuum (p+a-1) tau int rho^(p+a-2)|grad rho|^2]
//   t4 = tau^2 D(rho, rho^(p+e-1))
//   t5 = -tau D(rho, rho^(a-1))        [continuum -(a-1) tau int rho^(a-2)|grad rho|^2]
//   t6 = -tau^2 D(rho, rho^(e-1))
// The alpha<1 variant drops t2, t4, t6.
struct DissipationSplit {
    std::array<double, 6> terms{};
    double rhs = 0.0;
    double residual = 0.0; // relative gap between the term sum and rhs
};

inline DissipationSplit flux_laplacian_identity(const Field& rho, const Field& F,
                                                const SchemeParams& p) {
    if (!(min_value(rho) > 0.0))
        throw PositivityError("flux_laplacian_identity: nonpositive density node");
    const double tau = p.tau;
    Field lap_rho = laplacian(rho);
    Field lap_pa = laplacian(power_field(rho, p.alpha));
    DissipationSplit out;

    Field prod = make_field(rho.grid);
    for (std::size_t i = 0; i < rho.size(); ++i)
        prod.values[i] = lap_rho.values[i] * std::pow(rho.values[i], p.alpha - 1.0) *
                         lap_pa.values[i];
    out.terms[0] = integrate(prod);
    out.terms[2] = tau * dirichlet_form(rho, power_field(rho, p.p + p.alpha - 1.0));
    out.terms[4] = -tau * dirichlet_form(rho, power_field(rho, p.alpha - 1.0));

    if (p.variant == SchemeVariant::general) {
        for (std::size_t i = 0; i < rho.size(); ++i)
            prod.values[i] = lap_rho.values[i] *
                             std::pow(rho.values[i], p.epsilon - 1.0) * lap_pa.values[i];
        out.terms[1] = tau * integrate(prod);
        out.terms[3] =
            tau * tau * dirichlet_form(rho, power_field(rho, p.p + p.epsilon - 1.0));
        out.terms[5] =
            -tau * tau * dirichlet_form(rho, power_field(rho, p.epsilon - 1.0));
    }

    for (std::size_t i = 0; i < rho.size(); ++i)
        prod.values[i] = F.values[i] * lap_rho.values[i];
    out.rhs = integrate(prod);

    double lhs = 0.0, scale = 0.0;
    for (double t : out.terms) {
        lhs += t;
        scale += std::abs(t);
    }
    out.residual = std::abs(lhs - out.rhs) / std::max({scale, std::abs(out.rhs), 1e-300});
    return out;
}

// Per-step record of the a priori estimate quantities. Index 0 is the
// initial datum; index k >= 1 is the state after k steps. The six estimate
// terms are the cumulative space-time integrals including their tau
// prefactors:
//   [0] iint (lap u^a)^2                  (equals dissipation_cum)
//   [1] tau   iint (lap u^((a+e)/2))^2
//   [2] tau   iint u^(p+a-2) |grad u|^2
//   [3] tau^2 iint u^(p+e-2) |grad u|^2
//   [4] tau   iint u^(a-2)   |grad u|^2
//   [5] tau^2 iint u^(e-2)   |grad u|^2
struct EntropyReport {
    std::vector<double> time;
    std::vector<double> entropy;
    std::vector<double> mass;
    std::vector<double> min_density;
    std::vector<double> dissipation_step; // tau * int (lap rho_k^a)^2, 0 at k=0
    std::vector<double> dissipation_cum;
    std::array<std::vector<double>, 6> estimate_cum;
    double max_entropy = 0.0;
};

inline EntropyReport entropy_dissipation_report(const Trajectory& traj) {
    const SchemeParams& p = traj.params;
    const double tau = p.tau;
    const int j = traj.steps();
    EntropyReport rep;
    auto reserve = [&](std::vector<double>& v) { v.reserve(j + 1); };
    reserve(rep.time);
    reserve(rep.entropy);
    reserve(rep.mass);
    reserve(rep.min_density);
    reserve(rep.dissipation_step);
    reserve(rep.dissipation_cum);
    for (auto& v : rep.estimate_cum) reserve(v);

    rep.time.push_back(0.0);
    rep.entropy.push_back(entropy_integral(traj.u0, p.n));
    rep.mass.push_back(integrate(traj.u0));
    rep.min_density.push_back(min_value(traj.u0));
    rep.dissipation_step.push_back(0.0);
    rep.dissipation_cum.push_back(0.0);
    for (auto& v : rep.estimate_cum) v.push_back(0.0);

    std::array<double, 6> acc{};
    auto grad_weighted = [&](const Field& rho, const Field& grad2, double expo) {
        double s = 0.0;
        const Grid& g = rho.grid;
        const int nx = g.points[0];
        const int ny = g.dim == 2 ? g.points[1] : 1;
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) {
                const std::size_t i = g.index(ix, iy);
                s += node_weight(g, ix, iy) * std::pow(rho.values[i], expo) *
                     grad2.values[i];
            }
        return s;
    };
    for (int k = 1; k <= j; ++k) {
        const Field& rho = traj.states[k - 1].rho;
        Field lap_pa = laplacian(power_field(rho, p.alpha));
        Field lap_mid = laplacian(power_field(rho, 0.5 * (p.alpha + p.epsilon)));
        Field grad2 = gradient_squared(rho);
        Field sq = make_field(rho.grid);
        for (std::size_t i = 0; i < rho.size(); ++i)
            sq.values[i] = lap_pa.values[i] * lap_pa.values[i];
        const double e1 = integrate(sq);
        for (std::size_t i = 0; i < rho.size(); ++i)
            sq.values[i] = lap_mid.values[i] * lap_mid.values[i];
        const double e2 = integrate(sq);

        acc[0] += tau * e1;
        acc[1] += tau * tau * e2;
        acc[2] += tau * tau * grad_weighted(rho, grad2, p.p + p.alpha - 2.0);
        acc[3] += tau * tau * tau * grad_weighted(rho, grad2, p.p + p.epsilon - 2.0);
        acc[4] += tau * tau * grad_weighted(rho, grad2, p.alpha - 2.0);
        acc[5] += tau * tau * tau * grad_weighted(rho, grad2, p.epsilon - 2.0);

        rep.time.push_back(tau * k);
        rep.entropy.push_back(entropy_integral(rho, p.n));
        rep.mass.push_back(integrate(rho));
        rep.min_density.push_back(traj.states[k - 1].min_rho);
        rep.dissipation_step.push_back(tau * e1);
        rep.dissipation_cum.push_back(acc[0]);
        for (int t = 0; t < 6; ++t) rep.estimate_cum[t].push_back(acc[t]);
    }
    rep.max_entropy = *std::max_element(rep.entropy.begin(), rep.entropy.end());
    return rep;
}

// Space-time test function with xi(., T) = 0 and zero boundary normal
// derivative; value and time derivative supplied analytically, spatial
// derivatives taken by the grid operators.
struct SpaceTimeTest {
    std::function<double(double, double, double)> value; // (x, y, t)
    std::function<double(double, double, double)> dt;
};

// Residual of the weak-solution pairing on the piecewise-constant
// interpolant:
//   -iint u dxi/dt - int u0 xi(.,0)
//   + iint [ (2n/a) u^(n+a/2-1) grad(u^(a/2)).grad(xi) lap(u^a)
//            + u^(a+n-1) lap(u^a) lap(xi) ] ,
// time integrals by midpoint sampling of xi on each step interval.
inline double weak_form_residual(const Trajectory& traj, const SpaceTimeTest& xi) {
    const Grid& g = traj.u0.grid;
    const SchemeParams& p = traj.params;
    const double tau = p.tau;
    const int j = traj.steps();
    auto sample = [&](const std::function<double(double, double, double)>& fn, double t) {
        Field out = make_field(g);
        const int nx = g.points[0];
        const int ny = g.dim == 2 ? g.points[1] : 1;
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix)
                out.values[g.index(ix, iy)] =
                    fn(g.coord(ix, 0), g.dim == 2 ? g.coord(iy, 1) : 0.0, t);
        return out;
    };

    double acc = 0.0;
    Field xi0 = sample(xi.value, 0.0);
    Field prod = make_field(g);
    for (std::size_t i = 0; i < prod.size(); ++i)
        prod.values[i] = traj.u0.values[i] * xi0.values[i];
    acc -= integrate(prod);

    for (int k = 1; k <= j; ++k) {
        const Field& rho = traj.states[k - 1].rho;
        const double tmid = (k - 0.5) * tau;
        Field xim = sample(xi.value, tmid);
        Field xit = sample(xi.dt, tmid);
        Field lap_pa = laplacian(power_field(rho, p.alpha));
        Field half = power_field(rho, 0.5 * p.alpha);
        Field lap_xi = laplacian(xim);
        Field gdot = make_field(g);
        for (int axis = 0; axis < g.dim; ++axis) {
            Field gh = gradient_component(half, axis);
            Field gx = gradient_component(xim, axis);
            for (std::size_t i = 0; i < gdot.size(); ++i)
                gdot.values[i] += gh.values[i] * gx.values[i];
        }
        for (std::size_t i = 0; i < prod.size(); ++i) {
            const double r = rho.values[i];
            const double transport = (2.0 * p.n / p.alpha) *
                                     std::pow(r, p.n + 0.5 * p.alpha - 1.0) *
                                     gdot.values[i] * lap_pa.values[i];
            const double diffusion =
                std::pow(r, p.alpha + p.n - 1.0) * lap_pa.values[i] * lap_xi.values[i];
            prod.values[i] = -r * xit.values[i] + transport + diffusion;
        }
        acc += tau * integrate(prod);
    }
    return std::abs(acc);
}

// Largest relative violation of the per-step mass identity
//   int rho_k - int rho_{k-1} = tau^2 int F_k
// over the whole trajectory.
inline double mass_identity_residual(const Trajectory& traj) {
    const double tau = traj.params.tau;
    double worst = 0.0;
    double prev_mass = integrate(traj.u0);
    for (const StepState& s : traj.states) {
        const double mass = integrate(s.rho);
        const double fint = integrate(s.flux_potential);
        const double gap = std::abs((mass - prev_mass) - tau * tau * fint);
        worst = std::max(worst, gap / std::max(std::abs(mass), 1e-300));
        prev_mass = mass;
    }
    return worst;
}

} // namespace ineqlab

#endif
