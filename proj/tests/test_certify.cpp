#include <doctest.h>

#include <cmath>

#include "twistspec/bessel.hpp"
#include "twistspec/certify.hpp"

using namespace twistspec;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("first Bessel J0 zero from the series + Newton pipeline") {
    const double j01 = bessel_j0_first_zero();
    CHECK(j01 == doctest::Approx(2.404825557695773).epsilon(1e-12));
    CHECK(std::abs(bessel_j0(j01)) < 1e-13);
    // Independent cross-check through the standard library Bessel J.
    CHECK(std::abs(std::cyl_bessel_j(0.0, j01)) < 1e-12);
    CHECK(bessel_j0(0.0) == doctest::Approx(1.0));
    CHECK(bessel_j1(0.0) == 0.0);
}

TEST_CASE("quasi-cylindrical window") {
    const double j01 = bessel_j0_first_zero();
    const Thm1Window unit = thm1_window(summary(CrossSection::ellipse({0, 0}, 1, 1)));
    CHECK(unit.mu1 == doctest::Approx(j01 * j01).epsilon(1e-12));
    const Thm1Window half = thm1_window(summary(CrossSection::ellipse({0, 0}, 1, 0.5)));
    CHECK(half.r == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(half.mu1 == doctest::Approx(j01 * j01 / 0.25).epsilon(1e-8));
    CHECK_FALSE(half.claim.empty());

    CHECK_THROWS_AS(
        thm1_window(summary(CrossSection::rectangle({0.5, -0.5}, {1.5, 0.5}))),
        NoOrigin);
}

TEST_CASE("s_n for the named families") {
    CHECK(find_sn(TwistProfile::linear_rate(1.0), 4) == doctest::Approx(4.0));
    CHECK(find_sn(TwistProfile::linear_rate(0.5), 2) == doctest::Approx(4.0));
    CHECK(find_sn(TwistProfile::power_rate(2.0, 2.0), 8) == doctest::Approx(2.0));
    CHECK_THROWS_AS(find_sn(TwistProfile::constant(5.0), 4), NotDiverging);
}

TEST_CASE("s_n for tabulated rates") {
    // Rate rises linearly from 0 at x=0 to 5 at x=1 (mirror on the left)
    // and keeps slope 2 beyond the table. Inside the table the bound is
    // rounded conservatively to the outer knot of any piece that dips to
    // |rate| <= n, so s_3 = s_4 = 1; beyond the table the crossing of
    // the linear extrapolation 5 + 2(x-1) with n = 9 at x = 3 is exact.
    const TwistProfile tab =
        TwistProfile::tabulated({-1.0, 0.0, 1.0}, {5.0, 0.0, 5.0}, 2.0);
    CHECK(find_sn(tab, 3) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(find_sn(tab, 4) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(find_sn(tab, 9) == doctest::Approx(3.0).epsilon(1e-9));

    const TwistProfile flat = TwistProfile::tabulated({0.0, 1.0}, {0.0, 2.0}, 0.0);
    CHECK_THROWS_AS(find_sn(flat, 5), NotDiverging);
}

TEST_CASE("essential lower bound certificate") {
    const CrossSection square = CrossSection::rectangle({0.5, -0.5}, {1.5, 0.5});
    const TwistProfile lin = TwistProfile::linear_rate(1.0);

    const EssentialBound eb = essential_lower_bound(square, lin, 4, {9, 8}, 1e-6);
    CHECK(eb.sn == doctest::Approx(4.0));
    CHECK(eb.bound == 4.0);
    CHECK(eb.ray_verified);
    CHECK(eb.max_observed_segment <= 2.0 * kPi / 4 + 1e-6);
    CHECK(eb.window_lo == doctest::Approx(4.0 + kPi / 4));
    CHECK(eb.window_hi == doctest::Approx(4.0 + 3.0 * kPi / 4));
    CHECK(eb.reports_purely_discrete);

    const EssentialBound big = essential_lower_bound(square, lin, 10, {9, 8}, 1e-6);
    CHECK(big.bound == 25.0);
    CHECK(big.ray_verified);

    // Certificate stability: doubling the sampling keeps the verdict.
    const EssentialBound dense = essential_lower_bound(square, lin, 4, {17, 16}, 1e-6);
    CHECK(dense.ray_verified == eb.ray_verified);
}

TEST_CASE("bound formula is exact") {
    const CrossSection square = CrossSection::rectangle({0.5, -0.5}, {1.5, 0.5});
    const TwistProfile lin = TwistProfile::linear_rate(1.0);
    for (int n : {1, 3, 7, 1000}) {
        const EssentialBound eb = essential_lower_bound(square, lin, n, {3, 4}, 1e-4);
        CHECK(eb.bound == 0.25 * static_cast<double>(n) * static_cast<double>(n));
    }
}

TEST_CASE("hypothesis exclusivity") {
    const CrossSection origin = CrossSection::ellipse({0, 0}, 1, 0.5);
    const CrossSection halfplane = CrossSection::rectangle({0.5, -0.5}, {1.5, 0.5});
    const CrossSection neither = CrossSection::rectangle({-0.5, 1.0}, {0.5, 2.0});
    const TwistProfile lin = TwistProfile::linear_rate(1.0);

    CHECK_NOTHROW(thm1_window(summary(origin)));
    CHECK_THROWS_AS(essential_lower_bound(origin, lin, 2, {3, 4}, 1e-4),
                    HalfPlaneViolated);

    CHECK_THROWS_AS(thm1_window(summary(halfplane)), NoOrigin);
    CHECK_NOTHROW(essential_lower_bound(halfplane, lin, 2, {3, 4}, 1e-4));

    CHECK_THROWS_AS(thm1_window(summary(neither)), NoOrigin);
    CHECK_THROWS_AS(essential_lower_bound(neither, lin, 2, {3, 4}, 1e-4),
                    HalfPlaneViolated);
}

TEST_CASE("gap probe: twist lifts the ground state, no twist does not") {
    const CrossSection square = CrossSection::rectangle({0.5, -0.5}, {1.5, 0.5});
    const std::vector<double> Ls = {2.0, 4.0};

    const auto twisted = poincare_gap_probe(square, TwistProfile::constant(1.0), Ls,
                                            0.2, 0.2, 1e-8, 0);
    REQUIRE(twisted.size() == 2);
    for (const GapPoint& g : twisted) CHECK(g.gap > 0.05);

    // Untwisted control: the gap is the 1D stencil eigenvalue, which
    // decays like (pi / 2L)^2.
    const auto straight = poincare_gap_probe(square, TwistProfile::constant(0.0), Ls,
                                             0.2, 0.2, 1e-8, 0);
    CHECK(straight[1].gap < straight[0].gap);
    CHECK(straight[1].gap < 0.2);
}

TEST_CASE("eigenvalue brackets on a small diverging-twist tube") {
    const CrossSection disc = CrossSection::ellipse({2, 0}, 1, 1);
    const TwistProfile lin = TwistProfile::linear_rate(2.0);  // s_1 = 0.5

    const BracketReport br = bracket_eigenvalues(disc, lin, 0.25, 0.25, 2.0, 1, 3,
                                                 1e-8, 0, 40000, {5, 6});
    CHECK(br.sn == doctest::Approx(0.5));
    CHECK(br.bound == 0.25);
    REQUIRE(br.lower.size() == 3);
    REQUIRE(br.upper.size() == 3);
    for (int j = 0; j < 3; ++j) {
        CHECK(br.lower[static_cast<size_t>(j)] <=
              br.upper[static_cast<size_t>(j)] + 2e-8);
        // Everything here sits far above n^2/4 = 0.25, so no bracket is
        // certified against the exterior bound.
        CHECK_FALSE(static_cast<bool>(br.valid[static_cast<size_t>(j)]));
    }
    CHECK_FALSE(br.note.empty());

    CHECK_THROWS_AS(bracket_eigenvalues(disc, lin, 0.25, 0.25, 0.25, 1, 3, 1e-8, 0),
                    ConfigError);
}
