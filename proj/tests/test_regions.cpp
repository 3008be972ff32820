#include "catch2/catch_amalgamated.hpp"

#include <cmath>

#include "ineqlab/regions.hpp"
#include "ineqlab/rng.hpp"

using namespace ineqlab;

TEST_CASE("hessian exchange coefficients") {
    auto c = hessian_exchange_coefficients(1.0, 1.0, 2);
    CHECK(c.hessian == Catch::Approx(0.5));
    CHECK(c.laplacian == Catch::Approx(0.25));
    CHECK(c.quartic == Catch::Approx(0.0).margin(1e-15));

    c = hessian_exchange_coefficients(1.0, 0.5, 1);
    CHECK(c.hessian == Catch::Approx(1.0 / 6.0));
    CHECK(c.laplacian == Catch::Approx(1.0 / 12.0));
    CHECK(c.quartic == Catch::Approx(-1.0 / 3.0));

    c = hessian_exchange_coefficients(2.0, 1.0, 2);
    CHECK(c.hessian == Catch::Approx(0.125));
    CHECK(c.laplacian == Catch::Approx(0.0625));
    CHECK(c.quartic == Catch::Approx(-0.25));

    CHECK_THROWS_AS(hessian_exchange_coefficients(0.0, 1.0, 2), DomainError);
}

TEST_CASE("one-dimensional rule") {
    SECTION("nonnegative cross coefficient gives the ceiling constant") {
        auto v = check_one_dim({1.0, 1.0, 1.0, 1});
        REQUIRE(v.certified);
        CHECK(v.constant.value() == Catch::Approx(1.0));
    }
    SECTION("absorbed quartic term, gamma above the band") {
        auto v = check_one_dim({1.0, 1.0, 2.0, 1});
        REQUIRE(v.certified);
        CHECK(v.constant.value() == Catch::Approx(1.0 / 16.0));
    }
    SECTION("absorbed quartic term, gamma below the band") {
        auto v = check_one_dim({1.0, 1.0, 1.2, 1});
        REQUIRE(v.certified);
        CHECK(v.constant.value() == Catch::Approx(0.36 / std::pow(1.2, 4)).epsilon(1e-12));
        CHECK(v.constant.value() == Catch::Approx(0.17361).margin(5e-6));
    }
    SECTION("degenerate point where the absorbed constant hits zero") {
        auto v = check_one_dim({1.0, 1.0, 1.5, 1});
        CHECK_FALSE(v.certified);
        // just off the point both sides certify again
        CHECK(check_one_dim({1.0, 1.0, 1.501, 1}).certified);
        CHECK(check_one_dim({1.0, 1.0, 1.499, 1}).certified);
    }
    SECTION("frozen value used by the minimizer comparisons") {
        auto v = check_one_dim({1.4, 1.0, 1.3, 1});
        REQUIRE(v.certified);
        CHECK(v.constant.value() == Catch::Approx(0.896 / 2.8561).epsilon(1e-12));
    }
    SECTION("symmetric in the first two exponents") {
        auto a = check_one_dim({0.5, 1.0, 0.5, 1});
        auto b = check_one_dim({1.0, 0.5, 0.5, 1});
        REQUIRE(a.certified);
        REQUIRE(b.certified);
        CHECK(a.constant.value() == Catch::Approx(b.constant.value()));
        CHECK(a.constant.value() == Catch::Approx(2.0));
    }
    CHECK_THROWS_AS(check_one_dim({1.0, 1.0, 1.0, 2}), DomainError);
    CHECK_THROWS_AS(check_one_dim({1.0, -1.0, 1.0, 1}), DomainError);
}

TEST_CASE("rule for 2*gamma above the exponent sum") {
    SECTION("window branch") {
        auto v = check_above_midpoint({1.0, 1.0, 1.1, 3});
        REQUIRE(v.certified);
        CHECK(v.constant.value() == Catch::Approx(0.5 / 1.331).epsilon(1e-12));
        CHECK(v.constant.value() == Catch::Approx(0.37566).margin(5e-6));
    }
    SECTION("below both thresholds branch") {
        auto v = check_above_midpoint({1.4, 1.0, 1.3, 2});
        REQUIRE(v.certified);
        CHECK(v.constant.value() == Catch::Approx(0.896 / 2.8561).epsilon(1e-12));
    }
    SECTION("gap between the branches is not certified") {
        auto v = check_above_midpoint({1.0, 1.0, 1.25, 2});
        CHECK_FALSE(v.certified);
    }
    CHECK_THROWS_AS(check_above_midpoint({1.0, 1.0, 1.0, 2}), DomainError);
}

TEST_CASE("midpoint rule") {
    auto same = check_midpoint(1.0, 1.0);
    REQUIRE(same.certified);
    CHECK(same.constant.value() == Catch::Approx(1.0));

    auto v = check_midpoint(1.5, 1.0);
    REQUIRE(v.certified);
    CHECK(v.constant.value() == Catch::Approx(0.6144).epsilon(1e-12));

    CHECK_FALSE(check_midpoint(2.5, 1.0).certified);
    CHECK_FALSE(check_midpoint(1.0, 2.5).certified);
    CHECK_FALSE(check_midpoint(2.0, 1.0).certified); // boundary ratio is excluded
    CHECK_THROWS_AS(check_midpoint(0.0, 1.0), DomainError);

    SECTION("constant tends to 1 as the exponents coincide") {
        double prev_gap = 1.0;
        for (double d : {0.3, 0.1, 0.03, 0.01}) {
            auto w = check_midpoint(1.0 + d, 1.0);
            REQUIRE(w.certified);
            const double gap = std::abs(w.constant.value() - 1.0);
            CHECK(gap < prev_gap);
            prev_gap = gap;
        }
        CHECK(prev_gap < 1e-3);
    }
}

TEST_CASE("rule for 2*gamma below the exponent sum") {
    SECTION("shift parameter and constant, first frozen case") {
        auto v = check_below_midpoint({0.5, 1.0, 0.5, 2});
        REQUIRE(v.certified);
        REQUIRE(v.eta.has_value());
        CHECK(v.eta.value() == Catch::Approx(-0.5).margin(1e-12));
        CHECK(v.constant.value() == Catch::Approx(1.75).epsilon(1e-12));
    }
    SECTION("shift parameter and constant, second frozen case") {
        auto v = check_below_midpoint({1.0, 1.0, 0.9, 2});
        REQUIRE(v.certified);
        CHECK(v.eta.value() == Catch::Approx(-1.1).margin(1e-9));
        CHECK(v.constant.value() == Catch::Approx(7.8 / 6.48).epsilon(1e-9));
    }
    SECTION("continuity near the trivial point") {
        auto v = check_below_midpoint({1.0, 1.0, 0.99, 2});
        REQUIRE(v.certified);
        CHECK(v.constant.value() < 1.0 / (0.99 * 0.99) + 1e-12);
        CHECK(v.constant.value() > 0.9);
    }
    CHECK_THROWS_AS(check_below_midpoint({1.0, 1.0, 0.9, 1}), DomainError);
    CHECK_THROWS_AS(check_below_midpoint({1.0, 1.0, 1.0, 2}), DomainError);
}

TEST_CASE("power-diagonal interval") {
    SECTION("unit exponent is always certified with constant 1") {
        for (int dim = 1; dim <= 8; ++dim) {
            auto v = check_power_diagonal(1.0, dim);
            REQUIRE(v.certified);
            CHECK(v.constant.value() == Catch::Approx(1.0));
        }
    }
    SECTION("interval endpoints") {
        for (int dim = 1; dim <= 6; ++dim) {
            const double lower = (dim - 1.0) * (dim - 1.0) / (2.0 * dim * dim + 1.0);
            CHECK(check_power_diagonal(lower + 1e-6, dim).certified);
            CHECK_FALSE(check_power_diagonal(lower - 1e-6, dim).certified);
            CHECK(check_power_diagonal(1.5 - 1e-6, dim).certified);
            CHECK_FALSE(check_power_diagonal(1.5 + 1e-6, dim).certified);
        }
        CHECK(4.0 / 19.0 == Catch::Approx(4.0 / (2.0 * 9.0 + 1.0)));
        CHECK_FALSE(check_power_diagonal(0.1, 3).certified); // 0.1 < 4/19
        CHECK(check_power_diagonal(0.25, 3).certified);
    }
    SECTION("certified values stay positive across the interval") {
        for (int dim : {1, 2, 4, 6})
            for (double a = 0.55; a < 1.5; a += 0.05) {
                auto v = check_power_diagonal(a, dim);
                if ((dim - 1.0) * (dim - 1.0) / (2.0 * dim * dim + 1.0) < a) {
                    REQUIRE(v.certified);
                    CHECK(v.constant.value() > 0.0);
                }
            }
    }
    CHECK_FALSE(check_power_diagonal(-1.0, 2).certified);
}

TEST_CASE("regularization exponent choice") {
    SECTION("zero shift in low dimension") {
        auto c = choose_epsilon(1.0, 2);
        CHECK(c.epsilon == 0.0);
        CHECK(c.certified);
        for (int dim = 2; dim <= 4; ++dim)
            for (double a = 0.51; a < 2.0; a += 0.01) {
                auto e = choose_epsilon(a, dim);
                CHECK(e.epsilon == 0.0);
                CHECK(e.certified);
            }
    }
    SECTION("frozen high-dimension values") {
        auto c = choose_epsilon(0.6, 6);
        CHECK(c.epsilon == Catch::Approx(9.2 / 22.0).epsilon(1e-12));
        CHECK(c.certified);

        auto z = choose_epsilon(1.9, 5);
        CHECK(z.epsilon == 0.0);
        CHECK(z.certified);
    }
    SECTION("shift stays inside its admissible window") {
        for (int dim = 2; dim <= 12; ++dim)
            for (double a = 0.501; a < 2.0; a += 0.001) {
                auto c = choose_epsilon(a, dim);
                CHECK(c.epsilon >= 0.0);
                CHECK(c.epsilon < (4.0 - a) / 5.0);
                CHECK(c.certified);
            }
    }
    CHECK_THROWS_AS(choose_epsilon(0.5, 2), DomainError);
    CHECK_THROWS_AS(choose_epsilon(2.0, 2), DomainError);
    CHECK_THROWS_AS(choose_epsilon(1.0, 1), DomainError);
}

TEST_CASE("logarithmic functional rule") {
    auto ok = check_log_functional(1.0, 0.1, 2);
    REQUIRE(ok.certified);
    CHECK(ok.eta.value() == Catch::Approx(-0.55).margin(1e-12));
    CHECK_FALSE(ok.constant.has_value()); // existence only

    auto bad = check_log_functional(1.0, 0.4, 2);
    CHECK_FALSE(bad.certified);
    CHECK(bad.eta.value() == Catch::Approx(3.8).margin(1e-9));

    CHECK_THROWS_AS(check_log_functional(1.0, 0.5, 2), DomainError);
    CHECK_THROWS_AS(check_log_functional(1.0, 0.1, 1), DomainError);
}

TEST_CASE("certified constants never exceed the near-constant ceiling") {
    SplitMix64 rng(2024);
    int certified = 0;
    for (int trial = 0; trial < 20000; ++trial) {
        ExponentTriple t;
        t.alpha = rng.uniform(0.1, 3.0);
        t.beta = rng.uniform(0.1, 3.0);
        t.gamma = rng.uniform(0.05, 3.0);
        t.dim = 1 + static_cast<int>(rng.next_below(8));
        auto v = best_region(t);
        if (!v.certified) continue;
        ++certified;
        REQUIRE(v.constant.has_value());
        CHECK(v.constant.value() > 0.0);
        CHECK(v.constant.value() <= t.alpha * t.beta / (t.gamma * t.gamma) + 1e-12);
    }
    CHECK(certified > 1000); // the sample hits the certified region often
}

TEST_CASE("dispatcher") {
    SECTION("flags invalid triples instead of throwing") {
        auto v = best_region({1.0, -1.0, 1.0, 2});
        CHECK(v.rule == CertifyingRule::invalid);
        CHECK_FALSE(v.certified);
        CHECK(best_region({1.0, 1.0, 0.0, 2}).rule == CertifyingRule::invalid);
        CHECK(best_region({1.0, 1.0, 1.0, 0}).rule == CertifyingRule::invalid);
    }
    SECTION("trivial point certified in any dimension") {
        for (int dim : {1, 2, 3, 5}) {
            auto v = best_region({1.0, 1.0, 1.0, dim});
            REQUIRE(v.certified);
            CHECK(v.constant.value() == Catch::Approx(1.0));
        }
    }
    SECTION("symmetric in the first two exponents") {
        SplitMix64 rng(99);
        for (int trial = 0; trial < 200; ++trial) {
            const double a = rng.uniform(0.2, 2.5);
            const double b = rng.uniform(0.2, 2.5);
            const double g = rng.uniform(0.1, 2.5);
            const int dim = 1 + static_cast<int>(rng.next_below(4));
            auto v1 = best_region({a, b, g, dim});
            auto v2 = best_region({b, a, g, dim});
            CHECK(v1.certified == v2.certified);
            if (v1.certified)
                CHECK(v1.constant.value() == Catch::Approx(v2.constant.value()).margin(1e-14));
        }
    }
    SECTION("picks the known frozen constants") {
        auto v = best_region({0.5, 1.0, 0.5, 2});
        REQUIRE(v.certified);
        CHECK(v.constant.value() == Catch::Approx(1.75));
        CHECK(v.rule == CertifyingRule::below_midpoint);
    }
    SECTION("rule names are stable strings") {
        CHECK(std::string(rule_name(CertifyingRule::one_dim)) == "one-dim");
        CHECK(std::string(rule_name(CertifyingRule::invalid)) == "invalid");
    }
    SECTION("total over uniform sweep grids straddling the midpoint") {
        // 2*gamma - alpha - beta and alpha + beta - 2*gamma associate
        // differently, and uniform grids produce points where one rounds to
        // zero and the other does not; the dispatcher must not let a side
        // rule's guard throw on such a point. The first triple below is one
        // of them: sign < 0 under one association, gap == 0 under the other.
        const ExponentTriple crack{0.32063492063492066, 1.0,
                                   0.6603174603174603, 2};
        CHECK_NOTHROW(best_region(crack));
        for (int dim : {1, 2, 3}) {
            for (int iy = 0; iy < 64; ++iy) {
                const double gamma = 1.6 * iy / 63;
                for (int ix = 0; ix < 64; ++ix) {
                    const double alpha = 0.05 + 1.55 * ix / 63;
                    CHECK_NOTHROW(best_region({alpha, 1.0, gamma, dim}));
                }
            }
        }
    }
}
