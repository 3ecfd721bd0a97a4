#include <doctest.h>

#include <cmath>

#include "twistspec/bessel.hpp"
#include "twistspec/eigensolve.hpp"
#include "twistspec/tube.hpp"

using namespace twistspec;

namespace {
constexpr double kPi = 3.14159265358979323846;

double stencil_1d_lambda1(int n1, double h1) {
    return (4.0 / (h1 * h1)) * std::pow(std::sin(kPi / (2.0 * (n1 + 1))), 2);
}
}  // namespace

TEST_CASE("longitudinal grid placement") {
    const LongitudinalGrid g = longitudinal_grid(2.0, 0.5, EndCondition::Dirichlet);
    CHECK(g.n1 == 7);
    CHECK(g.h1() == doctest::Approx(0.5));
    CHECK(g.x1(0) == doctest::Approx(-1.5));
    CHECK(g.x1(6) == doctest::Approx(1.5));
}

TEST_CASE("straight tube separates exactly into 1D plus transverse parts") {
    const CrossSection square = CrossSection::rectangle({0.5, -0.5}, {1.5, 0.5});
    const TransverseGrid tg = build_grid(square, 0.25);
    const TwistProfile straight = TwistProfile::constant(0.0);

    for (int n1 : {5, 9}) {
        const LongitudinalGrid grid = longitudinal_grid(2.0, 4.0 / (n1 + 1),
                                                        EndCondition::Dirichlet);
        REQUIRE(grid.n1 == n1);
        const TubeOperator op = assemble_tube(tg, grid, straight);

        const double mu1 = stencil_1d_lambda1(grid.n1, grid.h1());
        const double e1 = dense_eig(assemble_xsection(tg, 0.0).matrix)[0];
        const double l1 = dense_eig(op.matrix)[0];
        CHECK(std::abs(l1 - (mu1 + e1)) / (mu1 + e1) < 1e-9);
    }
}

TEST_CASE("straight tube is a structural tensor sum") {
    const CrossSection square = CrossSection::rectangle({0.5, -0.5}, {1.5, 0.5});
    const TransverseGrid tg = build_grid(square, 0.25);
    const LongitudinalGrid lg = longitudinal_grid(1.0, 0.4, EndCondition::Dirichlet);
    const TubeOperator op = assemble_tube(tg, lg, TwistProfile::constant(0.0));

    const int np = tg.count(), n1 = lg.n1;
    const double w = 1.0 / (lg.h1() * lg.h1());
    const Eigen::MatrixXd Aperp = assemble_xsection(tg, 0.0).matrix.to_dense();
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(np * n1, np * n1);
    for (int i = 0; i < n1; ++i) {
        expected.block(i * np, i * np, np, np) = Aperp;
        for (int a = 0; a < np; ++a) {
            expected(i * np + a, i * np + a) += 2.0 * w;
            if (i > 0) expected(i * np + a, (i - 1) * np + a) = -w;
            if (i + 1 < n1) expected(i * np + a, (i + 1) * np + a) = -w;
        }
    }
    CHECK((op.matrix.to_dense() - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Neumann ends with no twist ground out at the transverse eigenvalue") {
    const CrossSection square = CrossSection::rectangle({0.5, -0.5}, {1.5, 0.5});
    const TransverseGrid tg = build_grid(square, 0.25);
    const LongitudinalGrid lg = longitudinal_grid(2.0, 0.4, EndCondition::Neumann);
    const TubeOperator op = assemble_tube(tg, lg, TwistProfile::constant(0.0));
    const double e1 = dense_eig(assemble_xsection(tg, 0.0).matrix)[0];
    CHECK(dense_eig(op.matrix)[0] == doctest::Approx(e1).epsilon(1e-12));
}

TEST_CASE("the matrix depends on the twist only through the rate") {
    const CrossSection square = CrossSection::rectangle({0.5, -0.5}, {1.5, 0.5});
    const TransverseGrid tg = build_grid(square, 0.25);
    const LongitudinalGrid lg = longitudinal_grid(2.0, 0.4, EndCondition::Dirichlet);
    const TwistProfile base = TwistProfile::linear_rate(1.0);
    const TubeOperator a = assemble_tube(tg, lg, base);
    const TubeOperator b = assemble_tube(tg, lg, base.with_offset(1.234));
    REQUIRE(a.matrix.values().size() == b.matrix.values().size());
    for (size_t i = 0; i < a.matrix.values().size(); ++i)
        CHECK(a.matrix.values()[i] == b.matrix.values()[i]);
}

TEST_CASE("Neumann cuts lie below Dirichlet cuts") {
    const CrossSection square = CrossSection::rectangle({0.5, -0.5}, {1.5, 0.5});
    const TransverseGrid tg = build_grid(square, 0.25);
    const TwistProfile lin = TwistProfile::linear_rate(1.0);
    const LongitudinalGrid ld = longitudinal_grid(2.0, 0.4, EndCondition::Dirichlet);
    const LongitudinalGrid ln = longitudinal_grid(2.0, 0.4, EndCondition::Neumann);
    const auto dir = dense_eig(assemble_tube(tg, ld, lin).matrix);
    const auto neu = dense_eig(assemble_tube(tg, ln, lin).matrix);
    for (int j = 0; j < 5; ++j)
        CHECK(neu[static_cast<size_t>(j)] <= dir[static_cast<size_t>(j)] + 1e-10);
}

TEST_CASE("Rayleigh quotients dominate the ground eigenvalue") {
    const CrossSection square = CrossSection::rectangle({0.5, -0.5}, {1.5, 0.5});
    const TransverseGrid tg = build_grid(square, 0.25);
    const LongitudinalGrid lg = longitudinal_grid(2.0, 0.4, EndCondition::Dirichlet);
    const TubeOperator op = assemble_tube(tg, lg, TwistProfile::linear_rate(1.0));
    const double l1 = dense_eig(op.matrix)[0];

    detail::Xorshift64Star rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> v(static_cast<size_t>(op.order()));
        for (double& x : v) x = rng.uniform_pm1();
        CHECK(rayleigh_quotient(op, v) >= l1 - 1e-10);
    }
    CHECK_THROWS_AS(
        rayleigh_quotient(op, std::vector<double>(static_cast<size_t>(op.order()), 0.0)),
        ZeroVector);
}

TEST_CASE("cylinder trial mode: shape and hypothesis check") {
    const CrossSection ell = CrossSection::ellipse({0, 0}, 1, 0.5);
    const TransverseGrid tg = build_grid(ell, 0.25);
    const LongitudinalGrid lg = longitudinal_grid(1.0, 0.5, EndCondition::Dirichlet);
    const GeometrySummary geom = summary(ell);
    const auto v = trial_cylinder_mode(tg, lg, geom);
    REQUIRE(v.size() == static_cast<size_t>(tg.count() * lg.n1));

    // Center slice is at x1 = 0 (n1 odd); the axis node carries the peak 1.
    const int center_slice = (lg.n1 - 1) / 2;
    int axis = -1, outside = -1;
    for (int i = 0; i < tg.count(); ++i) {
        if (std::abs(tg.coords[static_cast<size_t>(i)].x) < 1e-12 &&
            std::abs(tg.coords[static_cast<size_t>(i)].y) < 1e-12)
            axis = i;
        if (std::hypot(tg.coords[static_cast<size_t>(i)].x,
                       tg.coords[static_cast<size_t>(i)].y) >= *geom.r)
            outside = i;
    }
    REQUIRE(axis >= 0);
    REQUIRE(outside >= 0);
    CHECK(v[static_cast<size_t>(center_slice * tg.count() + axis)] ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(v[static_cast<size_t>(center_slice * tg.count() + outside)] == 0.0);

    const CrossSection off = CrossSection::rectangle({0.5, -0.5}, {1.5, 0.5});
    CHECK_THROWS_AS(trial_cylinder_mode(tg, lg, summary(off)), NoInradius);
}

TEST_CASE("trial mode Rayleigh quotient tracks the separated value") {
    // Untwisted tube: the quotient approaches mu1 + (pi/(2L))^2 as the
    // grids refine; at this resolution a generous O(h + h1) cap suffices.
    const CrossSection disc = CrossSection::ellipse({0, 0}, 1, 1);
    const double h = 1.0 / 16, L = 4.0, h1 = 1.0 / 8;
    const TransverseGrid tg = build_grid(disc, h);
    const LongitudinalGrid lg = longitudinal_grid(L, h1, EndCondition::Dirichlet);
    const TubeOperator op = assemble_tube(tg, lg, TwistProfile::constant(0.0));
    const GeometrySummary geom = summary(disc);
    const double q = rayleigh_quotient(op, trial_cylinder_mode(tg, lg, geom));
    const double j01 = bessel_j0_first_zero();
    const double separated = j01 * j01 + std::pow(kPi / (2.0 * L), 2);
    CHECK(std::abs(q - separated) < 30.0 * (h + h1));
}
