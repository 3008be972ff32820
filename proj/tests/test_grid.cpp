#include "catch2/catch_amalgamated.hpp"

#include <cmath>

#include "ineqlab/grid.hpp"

using namespace ineqlab;

namespace {
constexpr double pi = 3.14159265358979323846;

Field cosine_1d(const Grid& g, double base, double amp, int k) {
    return make_field(g, [=](double x, double) { return base + amp * std::cos(k * pi * x); });
}
} // namespace

TEST_CASE("trapezoid quadrature integrates polynomials on the unit interval") {
    Grid g = make_grid_1d(257);
    Field one = make_field(g, 1.0);
    CHECK(integrate(one) == Catch::Approx(1.0).margin(1e-14));

    Field sq = make_field(g, [](double x, double) { return x * x; });
    CHECK(integrate(sq) == Catch::Approx(1.0 / 3.0).margin(2e-5));

    Field lin = make_field(g, [](double x, double) { return 3.0 * x - 1.0; });
    CHECK(integrate(lin) == Catch::Approx(0.5).margin(1e-13));
}

TEST_CASE("node weights tile the 2D box exactly") {
    Grid g = make_grid_2d(17, 33, 1.0, 2.0);
    double area = 0.0;
    for (int iy = 0; iy < g.points[1]; ++iy)
        for (int ix = 0; ix < g.points[0]; ++ix) area += node_weight(g, ix, iy);
    CHECK(area == Catch::Approx(2.0).margin(1e-13));
}

TEST_CASE("mirrored laplacian has zero mean against trapezoid weights") {
    SECTION("1D") {
        Grid g = make_grid_1d(129);
        Field f = make_field(g, [](double x, double) {
            return std::exp(std::sin(2.0 * pi * x)) + x * x;
        });
        CHECK(std::abs(integrate(laplacian(f))) <= 1e-9 * max_abs(laplacian(f)));
    }
    SECTION("2D") {
        Grid g = make_grid_2d(33, 49);
        Field f = make_field(g, [](double x, double y) {
            return std::cos(pi * x) * std::cos(2.0 * pi * y) + 0.3 * x;
        });
        CHECK(std::abs(integrate(laplacian(f))) <= 1e-9 * (max_abs(laplacian(f)) + 1.0));
    }
}

TEST_CASE("laplacian is self-adjoint under the quadrature") {
    Grid g = make_grid_1d(97);
    Field f = cosine_1d(g, 2.0, 0.7, 1);
    Field h = make_field(g, [](double x, double) { return 1.0 + x * x * (1.0 - x); });
    Field lf = laplacian(f);
    Field lh = laplacian(h);
    Field a = make_field(g), b = make_field(g);
    for (std::size_t i = 0; i < f.size(); ++i) {
        a.values[i] = lf.values[i] * h.values[i];
        b.values[i] = f.values[i] * lh.values[i];
    }
    const double lhs = integrate(a), rhs = integrate(b);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(std::abs(lhs), 1.0));
}

TEST_CASE("dirichlet form matches the integrated laplacian pairing to round-off") {
    SECTION("1D") {
        Grid g = make_grid_1d(65);
        Field f = cosine_1d(g, 1.0, 0.4, 2);
        Field h = make_field(g, [](double x, double) { return x * x * x - x; });
        Field lf = laplacian(f);
        Field prod = make_field(g);
        for (std::size_t i = 0; i < f.size(); ++i) prod.values[i] = lf.values[i] * h.values[i];
        CHECK(std::abs(integrate(prod) + dirichlet_form(f, h)) <= 1e-12 * (std::abs(dirichlet_form(f, h)) + 1.0));
    }
    SECTION("2D") {
        Grid g = make_grid_2d(25, 25);
        Field f = make_field(g, [](double x, double y) { return std::cos(pi * x) + 0.5 * std::cos(pi * y); });
        Field h = make_field(g, [](double x, double y) { return 1.0 + x * y * y; });
        Field lf = laplacian(f);
        Field prod = make_field(g);
        for (std::size_t i = 0; i < f.size(); ++i) prod.values[i] = lf.values[i] * h.values[i];
        CHECK(std::abs(integrate(prod) + dirichlet_form(f, h)) <= 1e-12 * (std::abs(dirichlet_form(f, h)) + 1.0));
    }
}

TEST_CASE("laplacian converges at second order on a Neumann-compatible field") {
    auto err = [](int points) {
        Grid g = make_grid_1d(points);
        Field f = cosine_1d(g, 0.0, 1.0, 1);
        Field lf = laplacian(f);
        double worst = 0.0;
        for (int i = 0; i < points; ++i) {
            const double exact = -pi * pi * std::cos(pi * g.coord(i, 0));
            worst = std::max(worst, std::abs(lf.values[i] - exact));
        }
        return worst;
    };
    const double e1 = err(65), e2 = err(129), e3 = err(257);
    CHECK(std::log2(e1 / e2) >= 1.9);
    CHECK(std::log2(e2 / e3) >= 1.9);
}

TEST_CASE("gradient squared matches the analytic derivative away from corners") {
    Grid g = make_grid_1d(257);
    Field f = cosine_1d(g, 0.0, 1.0, 1);
    Field gs = gradient_squared(f);
    double worst = 0.0;
    for (int i = 0; i < g.points[0]; ++i) {
        const double d = pi * std::sin(pi * g.coord(i, 0));
        worst = std::max(worst, std::abs(gs.values[i] - d * d));
    }
    CHECK(worst <= 5e-3);
}

TEST_CASE("1D hessian norm collapses to the squared laplacian") {
    Grid g = make_grid_1d(81);
    Field f = make_field(g, [](double x, double) { return std::cos(pi * x) + x * x; });
    Field hn = hessian_norm_squared(f);
    Field lf = laplacian(f);
    for (std::size_t i = 0; i < f.size(); ++i)
        CHECK(hn.values[i] == Catch::Approx(lf.values[i] * lf.values[i]).margin(1e-12));
}

TEST_CASE("hessian quadratic form contracts gradients against curvature") {
    SECTION("1D: reduces to f'' (g')^2 exactly") {
        Grid g = make_grid_1d(41);
        Field q = make_field(g, [](double x, double) { return std::cos(pi * x) + x * x; });
        Field s = make_field(g, [](double x, double) { return x * x * x - 0.2 * x; });
        Field hb = hessian_bilinear(q, s);
        Field lq = laplacian(q);
        Field sx = gradient_component(s, 0);
        for (std::size_t i = 0; i < q.size(); ++i)
            CHECK(hb.values[i] ==
                  Catch::Approx(lq.values[i] * sx.values[i] * sx.values[i]).margin(1e-12));
    }
    SECTION("2D: trace bound (lap f)^2 <= 2 |Hess f|^2 holds nodewise") {
        Grid g = make_grid_2d(21, 21);
        Field f = make_field(g, [](double x, double y) {
            return std::cos(pi * x) * std::cos(2.0 * pi * y) + x * y;
        });
        Field lf = laplacian(f);
        Field hn = hessian_norm_squared(f);
        for (std::size_t i = 0; i < f.size(); ++i)
            CHECK(lf.values[i] * lf.values[i] <= 2.0 * hn.values[i] + 1e-9);
    }
    SECTION("constant arguments annihilate the form") {
        Grid g = make_grid_2d(9, 9);
        Field q = make_field(g, [](double x, double y) { return x * x + y * y; });
        Field c = make_field(g, 3.0);
        CHECK(max_abs(hessian_bilinear(q, c)) == 0.0);
        CHECK(max_abs(hessian_norm_squared(c)) == 0.0);
    }
}

TEST_CASE("power and log fields enforce strict positivity") {
    Grid g = make_grid_1d(9);
    Field f = make_field(g, 2.0);
    f.values[4] = 0.0;
    CHECK_THROWS_AS(power_field(f, 0.5), PositivityError);
    CHECK_THROWS_AS(log_field(f), PositivityError);
    CHECK_NOTHROW(power_field(f, 2.0)); // integer powers of zero are fine

    Field pos = make_field(g, 3.0);
    Field half = power_field(pos, 0.5);
    CHECK(half.values[0] == Catch::Approx(std::sqrt(3.0)));
}

TEST_CASE("grid indexing round-trips coordinates") {
    Grid g = make_grid_2d(5, 9, 1.0, 2.0);
    CHECK(g.coord(0, 0) == Catch::Approx(0.0));
    CHECK(g.coord(4, 0) == Catch::Approx(1.0));
    CHECK(g.coord(8, 1) == Catch::Approx(2.0));
    CHECK(g.spacing(0) == Catch::Approx(0.25));
    CHECK(g.spacing(1) == Catch::Approx(0.25));
    CHECK(g.index(3, 2) == 2 * 5 + 3);
    CHECK(min_value(make_field(g, -2.5)) == Catch::Approx(-2.5));
}
