#include "catch2/catch_amalgamated.hpp"

#include <cmath>

#include "ineqlab/diagnostics.hpp"
#include "ineqlab/rng.hpp"
#include "ineqlab/scheme.hpp"

using namespace ineqlab;

namespace {
constexpr double pi = 3.14159265358979323846;

Field cosine_datum(const Grid& g, double base, double amp) {
    return make_field(g, [=](double x, double y) {
        double v = base + amp * std::cos(pi * x);
        if (g.dim == 2) v = base + amp * std::cos(pi * x) * std::cos(pi * y);
        return v;
    });
}

// Scalar root of the one-step system on constant data: rho solves
//   tau^3 rho^p + c(rho) (rho - u0) - tau^3 u0^0 ... = 0
// with the flux eliminated through F = (rho - u0)/tau^2.
double constant_step_oracle(double u0, const SchemeParams& p) {
    auto g = [&](long double r) -> long double {
        const long double tau = p.tau;
        long double c;
        if (p.variant == SchemeVariant::alpha_lt_1)
            c = std::pow(static_cast<double>(r), 1.0 - p.alpha);
        else
            c = std::pow(static_cast<double>(r), 1.0 - p.epsilon) /
                (std::pow(static_cast<double>(r), p.alpha - p.epsilon) + p.tau);
        return tau * tau * tau * std::pow(static_cast<double>(r), p.p) +
               c * (r - u0) - tau * tau * tau;
    };
    long double lo = u0 - 1.0, hi = u0 + 1.0;
    for (int it = 0; it < 200; ++it) {
        const long double mid = 0.5L * (lo + hi);
        if (g(lo) * g(mid) <= 0.0L)
            hi = mid;
        else
            lo = mid;
    }
    return static_cast<double>(0.5L * (lo + hi));
}
} // namespace

TEST_CASE("parameter validation") {
    Grid g = make_grid_1d(17);
    SchemeParams p = SchemeParams::thin_film();
    CHECK_NOTHROW(p.validate(1));

    SchemeParams bad = p;
    bad.alpha = 0.0;
    CHECK_THROWS_AS(bad.validate(1), DomainError);
    bad = p;
    bad.tau = 1.0;
    CHECK_THROWS_AS(bad.validate(1), DomainError);
    bad = p;
    bad.epsilon = 1.0;
    CHECK_THROWS_AS(bad.validate(1), DomainError);
    bad = p;
    bad.p = 2.0;
    CHECK_THROWS_AS(bad.validate(1), DomainError);
    bad = p;
    bad.alpha = 0.5; // general variant needs alpha >= 1
    CHECK_THROWS_AS(bad.validate(1), DomainError);
    bad = SchemeParams::quantum_drift_diffusion();
    bad.alpha = 1.5; // reduced variant needs alpha < 1
    CHECK_THROWS_AS(bad.validate(1), DomainError);

    SchemeParams qdd = SchemeParams::quantum_drift_diffusion();
    CHECK(qdd.alpha == 0.5);
    CHECK(qdd.variant == SchemeVariant::alpha_lt_1);
    CHECK_NOTHROW(qdd.validate(2));
}

TEST_CASE("mobility growth threshold by dimension") {
    CHECK(SchemeParams::sigma(1) == 1.0);
    CHECK(SchemeParams::sigma(3) == 1.0);
    CHECK(SchemeParams::sigma(4) == 0.5);
    CHECK(SchemeParams::sigma(8) == 0.5);
}

TEST_CASE("constant one is a fixed point of the step map") {
    for (bool qdd : {false, true}) {
        SchemeParams p =
            qdd ? SchemeParams::quantum_drift_diffusion() : SchemeParams::thin_film();
        Grid g = make_grid_1d(33);
        Field u = make_field(g, 1.0);
        Trajectory traj = run(u, p, 64);
        REQUIRE_FALSE(traj.failed);
        double worst = 0.0;
        for (const StepState& s : traj.states)
            for (double v : s.rho.values) worst = std::max(worst, std::abs(v - 1.0));
        CHECK(worst <= 1e-10);
        CHECK(traj.states[0].newton_iters <= 2);
    }
}

TEST_CASE("constant data reproduces the scalar root of the step system") {
    Grid g = make_grid_1d(33);
    Field u = make_field(g, 2.0);
    for (bool qdd : {false, true}) {
        SchemeParams p =
            qdd ? SchemeParams::quantum_drift_diffusion() : SchemeParams::thin_film();
        const double root = constant_step_oracle(2.0, p);
        StepState st = step(u, p);
        double worst = 0.0;
        for (double v : st.rho.values) worst = std::max(worst, std::abs(v - root));
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("constant-state drift scales with the cube of the step size") {
    Grid g = make_grid_1d(33);
    Field u = make_field(g, 2.0);
    auto drift = [&](double tau) {
        SchemeParams p = SchemeParams::thin_film(1.0, tau);
        StepState st = step(u, p);
        double worst = 0.0;
        for (double v : st.rho.values) worst = std::max(worst, std::abs(v - 2.0));
        return worst;
    };
    const double ratio = drift(1e-3) / drift(5e-4);
    CHECK(ratio >= 6.4);
    CHECK(ratio <= 9.6);
}

TEST_CASE("explicit flux on constant data matches the closed form") {
    Grid g = make_grid_1d(21);
    Field u = make_field(g, 2.0);
    SchemeParams p = SchemeParams::thin_film(); // alpha 1, eps 0, p 3, tau 1e-3
    Field F = explicit_flux(u, p);
    // (lap rho - tau rho^3 + tau) / c(rho) with c = rho / (rho + tau)
    const double expect = (-8.0 * p.tau + p.tau) * (2.0 + p.tau) / 2.0;
    for (double v : F.values) CHECK(v == Catch::Approx(expect).epsilon(1e-12));
}

TEST_CASE("explicit flux inverts the density row exactly") {
    Grid g = make_grid_1d(65);
    Field rho = cosine_datum(g, 1.5, 0.4);
    for (bool qdd : {false, true}) {
        SchemeParams p =
            qdd ? SchemeParams::quantum_drift_diffusion() : SchemeParams::thin_film();
        Field F = explicit_flux(rho, p);
        Field r = density_residual(rho, F, p);
        CHECK(max_abs(r) <= 1e-9); // row entries carry 1/h^2 scale
    }
}

TEST_CASE("flux solve reproduces a constant flux potential") {
    SchemeParams p = SchemeParams::thin_film();
    SECTION("1D") {
        Grid g = make_grid_1d(41);
        Field rho = make_field(g, 1.0);
        Field f_prev = make_field(g, 1.0 - p.tau * p.tau);
        Field F = solve_flux(rho, f_prev, p);
        for (double v : F.values) CHECK(v == Catch::Approx(1.0).margin(1e-10));
    }
    SECTION("2D") {
        Grid g = make_grid_2d(17, 17);
        Field rho = make_field(g, 1.0);
        Field f_prev = make_field(g, 1.0 - p.tau * p.tau);
        Field F = solve_flux(rho, f_prev, p);
        for (double v : F.values) CHECK(v == Catch::Approx(1.0).margin(1e-10));
    }
}

TEST_CASE("per-step mass identity holds to solver precision") {
    Grid g = make_grid_1d(65);
    Field u0 = cosine_datum(g, 1.0, 0.5);
    Trajectory traj = run(u0, SchemeParams::thin_film(), 8);
    REQUIRE_FALSE(traj.failed);
    CHECK(mass_identity_residual(traj) <= 1e-10);
}

TEST_CASE("stacked jacobian agrees with finite differences") {
    Grid g = make_grid_1d(9);
    SplitMix64 rng(31);
    for (bool qdd : {false, true}) {
        SchemeParams p =
            qdd ? SchemeParams::quantum_drift_diffusion() : SchemeParams::thin_film();
        for (int trial = 0; trial < 10; ++trial) {
            Field rho = make_field(g), F = make_field(g), f_prev = make_field(g);
            for (std::size_t i = 0; i < rho.size(); ++i) {
                rho.values[i] = rng.uniform(0.5, 2.0);
                F.values[i] = rng.uniform(-1.0, 1.0);
                f_prev.values[i] = rng.uniform(0.5, 2.0);
            }
            BandMatrix J = stacked_jacobian(rho, F, p);
            std::vector<double> base = stacked_residual(rho, F, f_prev, p);
            const int m = static_cast<int>(base.size());
            for (int col = 0; col < m; ++col) {
                const bool is_rho = (col % 2 == 0);
                Field rho2 = rho, F2 = F;
                const double x0 = is_rho ? rho.values[col / 2] : F.values[col / 2];
                const double h = std::max(1e-7, 1e-7 * std::abs(x0));
                if (is_rho)
                    rho2.values[col / 2] += h;
                else
                    F2.values[col / 2] += h;
                std::vector<double> bumped = stacked_residual(rho2, F2, f_prev, p);
                for (int row = 0; row < m; ++row) {
                    const double fd = (bumped[row] - base[row]) / h;
                    const double an = J.get(row, col);
                    const double scale = std::max({std::abs(fd), std::abs(an), 1.0});
                    CHECK(std::abs(fd - an) / scale <= 1e-5);
                }
            }
        }
    }
}

TEST_CASE("large step sizes are flagged but still run") {
    Grid g = make_grid_1d(17);
    Field u = make_field(g, 1.0);
    SchemeParams p = SchemeParams::thin_film(1.0, 0.12);
    Trajectory traj = run(u, p, 2);
    CHECK(traj.tau_warning);
    REQUIRE_FALSE(traj.failed);

    p.tau = 1e-3;
    traj = run(u, p, 2);
    CHECK_FALSE(traj.tau_warning);
}

TEST_CASE("march rejects invalid inputs") {
    Grid g = make_grid_1d(17);
    Field u = make_field(g, 1.0);
    SchemeParams p = SchemeParams::thin_film();
    CHECK_THROWS_AS(run(u, p, 0), DomainError);

    Field zero = u;
    zero.values[3] = 0.0;
    CHECK_THROWS_AS(run(zero, p, 1), PositivityError);

    CHECK_THROWS_AS(run(u, p, -1.0, 4), DomainError);
    Trajectory traj = run(u, p, 0.01, 10);
    CHECK(traj.params.tau == Catch::Approx(1e-3));
    CHECK(traj.steps() == 10);
}

TEST_CASE("trajectory interpolants bracket the states") {
    Grid g = make_grid_1d(17);
    Field u0 = cosine_datum(g, 1.0, 0.3);
    SchemeParams p = SchemeParams::thin_film();
    Trajectory traj = run(u0, p, 4);
    REQUIRE_FALSE(traj.failed);

    CHECK(traj.u_bar(0.0).values[0] == u0.values[0]);
    CHECK(traj.u_bar(0.5 * p.tau).values[0] == traj.states[0].rho.values[0]);
    CHECK(traj.u_bar(4.0 * p.tau).values[0] == traj.states[3].rho.values[0]);

    Field mid = traj.u_tilde(0.5 * p.tau);
    const double expect = 0.5 * (u0.values[0] + traj.states[0].rho.values[0]);
    CHECK(mid.values[0] == Catch::Approx(expect).margin(1e-14));
    Field past_end = traj.u_tilde(10.0);
    CHECK(past_end.values[0] == traj.states[3].rho.values[0]);
}

TEST_CASE("fine grids converge to the stated stopping rule") {
    Grid g = make_grid_1d(257);
    Field u0 = cosine_datum(g, 1.0, 0.5);
    SchemeParams p = SchemeParams::thin_film();
    StepState st = step(u0, p);
    CHECK(st.min_rho > 0.0);
    CHECK(st.residual_norm <=
          std::max(p.newton.tol, scheme_detail::representability_floor(st.rho, p)));
    CHECK(st.newton_iters <= p.newton.max_iter);
}
