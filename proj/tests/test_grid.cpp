#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <fstream>

#include "support.hpp"
#include "wgf/field_io.hpp"

using namespace wgf;
using Catch::Approx;
using support::kPi;

TEST_CASE("make_grid validates shape") {
    CHECK_THROWS_AS(make_grid(0, 1, 0, 1, 4, 4), ConfigError);
    CHECK_THROWS_AS(make_grid(0, 1, 0, 1, 9, 19), ConfigError); // cells not square
    CHECK_THROWS_AS(make_grid(1, 0, 0, 1, 9, 9), ConfigError);
    const GridDomain d = make_grid(0, 2, 0, 1, 19, 9);
    CHECK(d.h == Approx(0.1));
    CHECK(d.x(0) == 0.0);
    CHECK(d.x(d.nx + 1) == Approx(2.0));
    CHECK(d.area() == Approx(2.0));
    CHECK(d.perimeter() == Approx(6.0));
}

TEST_CASE("clamped ghost fill reproduces quadratics everywhere") {
    const GridDomain d = make_grid(0, 1, 0, 1, 9, 9);
    auto f = [](double x, double y) { return 0.3 + x - 2 * y + x * x - 0.5 * y * y + 0.25 * x * y; };
    auto fx = [](double x, double y) { return 1 + 2 * x + 0.25 * y; };
    auto fy = [](double x, double y) { return -2 - y + 0.25 * x; };
    const BoundaryData bc = BoundaryData::from_analytic(d, f, fx, fy);
    ScalarField u = fill_covered_nodes(d, f);
    const ScalarField g = apply_clamped_ghosts(u, bc);
    for (int j = -d.ghost; j <= d.ny + 1 + d.ghost; ++j)
        for (int i = -d.ghost; i <= d.nx + 1 + d.ghost; ++i)
            CHECK(g.at(i, j) == Approx(f(d.x(i), d.y(j))).margin(1e-12));
}

TEST_CASE("second ghost layer reproduces quartics along edge normals") {
    const GridDomain d = make_grid(0, 1, 0, 1, 9, 9);
    auto f = [](double x, double y) {
        const double t = y;
        return t * t * t * t + t * t * t + x * x;
    };
    auto fx = [](double x, double) { return 2 * x; };
    auto fy = [](double, double y) { return 4 * y * y * y + 3 * y * y; };
    const BoundaryData bc = BoundaryData::from_analytic(d, f, fx, fy);
    const ScalarField g = apply_clamped_ghosts(fill_covered_nodes(d, f), bc);
    for (int i = 0; i <= d.nx + 1; ++i)
        CHECK(g.at(i, -2) == Approx(f(d.x(i), d.y(-2))).margin(1e-10));
}

TEST_CASE("ghost fill is idempotent and commutes with transposition") {
    const GridDomain d = make_grid(0, 1, 0, 1, 11, 11);
    std::mt19937 rng(2026);
    ScalarField u = support::random_smooth(d, rng, 0.8);
    const BoundaryData bc = BoundaryData::from_field(u);
    const ScalarField g1 = apply_clamped_ghosts(u, bc);
    const ScalarField g2 = apply_clamped_ghosts(g1, bc);
    REQUIRE(g1.v.size() == g2.v.size());
    CHECK(std::memcmp(g1.v.data(), g2.v.data(), g1.v.size() * sizeof(double)) == 0);

    // transpose field and boundary data; the ghost fill must transpose too
    ScalarField ut = ScalarField::undefined(d);
    for (int j = -d.ghost; j <= d.ny + 1 + d.ghost; ++j)
        for (int i = -d.ghost; i <= d.nx + 1 + d.ghost; ++i)
            ut.at(i, j) = u.at(j, i);
    BoundaryData bct;
    bct.left = bc.bottom;
    bct.bottom = bc.left;
    bct.right = bc.top;
    bct.top = bc.right;
    const ScalarField gt = apply_clamped_ghosts(ut, bct);
    bool same = true;
    for (int j = -d.ghost; j <= d.ny + 1 + d.ghost && same; ++j)
        for (int i = -d.ghost; i <= d.nx + 1 + d.ghost; ++i)
            if (gt.at(i, j) != g1.at(j, i)) {
                same = false;
                break;
            }
    CHECK(same);
}

TEST_CASE("compatibility report flags height and slope mismatches") {
    const GridDomain d = make_grid(0, 1, 0, 1, 15, 15);
    std::mt19937 rng(7);
    ScalarField u = support::random_smooth(d, rng, 0.5);
    SECTION("matched trace has zero residuals") {
        const CompatReport r = check_compatibility(u, BoundaryData::from_field(u), 1e-12);
        CHECK(r.height_residual == 0.0);
        CHECK(r.slope_residual == 0.0);
        CHECK(r.height_ok);
        CHECK(r.slope_ok);
    }
    SECTION("zero bc against a sine detects the slope gap") {
        ScalarField s = fill_from_function(d, [](double x, double y) {
            return 0.01 * std::sin(kPi * x) * std::sin(kPi * y);
        });
        const CompatReport r = check_compatibility(s, BoundaryData::zero(d), 1e-8);
        CHECK(r.height_ok); // trace vanishes
        CHECK_FALSE(r.slope_ok);
        CHECK(r.slope_residual > 0.02);
        CHECK(r.slope_residual < 0.04); // about 0.01*pi
    }
}

TEST_CASE("centered stencils differentiate low-degree monomials exactly") {
    const GridDomain d = make_grid(0, 1, 0, 1, 9, 9);
    const ScalarField u = fill_from_function(
        d, [](double x, double y) { return x * x * x * y + y * y * y * y * y; });
    const ScalarField d31 = diff(u, 3, 1);
    const ScalarField d20 = diff(u, 2, 0);
    const ScalarField d04 = diff(u, 0, 4);
    for (int j = 1; j <= d.ny; ++j)
        for (int i = 1; i <= d.nx; ++i) {
            CHECK(d31.at(i, j) == Approx(6.0).margin(1e-9));
            CHECK(d20.at(i, j) == Approx(6 * d.x(i) * d.y(j)).margin(1e-9));
            CHECK(d04.at(i, j) == Approx(120 * d.y(j)).margin(1e-8));
        }
    // outside the stencil's reach the result is NaN, not garbage
    CHECK(std::isnan(diff(u, 4, 0).at(-1, 1)));
    CHECK(std::isfinite(diff(u, 4, 0).at(0, 1)));
    CHECK_THROWS_AS(diff(u, 3, 2), ConfigError);
}

TEST_CASE("diff rejects fields whose ghost margin is unset") {
    const GridDomain d = make_grid(0, 1, 0, 1, 9, 9);
    const ScalarField u = fill_covered_nodes(d, [](double x, double y) { return x + y; });
    // reach-1 stencils live off interior plus boundary ring, so they are fine
    CHECK_NOTHROW(diff(u, 1, 0));
    // a third difference reads the ghost ring and must refuse NaN there
    CHECK_THROWS_AS(diff(u, 3, 0), StateError);
}

TEST_CASE("trapezoid quadrature: exactness and transpose symmetry") {
    const GridDomain d = make_grid(0, 1, 0, 1, 13, 13);
    const double exact = 2.0 + 3.0 / 4.0;
    const ScalarField u =
        fill_covered_nodes(d, [](double x, double y) { return 2 + 3 * x * y; });
    CHECK(trapezoid(u) == Approx(exact).epsilon(1e-14));
    CHECK(l2_norm(fill_covered_nodes(d, [](double, double) { return 1.0; })) ==
          Approx(1.0).epsilon(1e-14));

    std::mt19937 rng(11);
    ScalarField r = support::random_smooth(d, rng, 1.0);
    ScalarField rt = ScalarField::undefined(d);
    for (int j = -d.ghost; j <= d.ny + 1 + d.ghost; ++j)
        for (int i = -d.ghost; i <= d.nx + 1 + d.ghost; ++i)
            rt.at(i, j) = r.at(j, i);
    CHECK(trapezoid(r) == trapezoid(rt)); // bitwise, thanks to canonical summation
}

TEST_CASE("wgf1 snapshots round-trip bit for bit") {
    const GridDomain d = make_grid(0, 2, 0, 1, 19, 9);
    std::mt19937 rng(5);
    ScalarField u = support::random_smooth(d, rng, 1.3);
    u.time = 0.625;
    u.at(3, 4) = -0.0;
    u.at(5, 2) = 5e-324; // denormal survives
    save_field("roundtrip.wgf1", u);
    const ScalarField w = load_field("roundtrip.wgf1");
    CHECK(w.dom.same(d));
    CHECK(w.time == 0.625);
    for (int j = 1; j <= d.ny; ++j)
        for (int i = 1; i <= d.nx; ++i) {
            double a = u.at(i, j), b = w.at(i, j);
            CHECK(std::memcmp(&a, &b, 8) == 0);
        }
    CHECK(std::isnan(w.at(0, 0))); // covered-but-boundary nodes come back unset

    CHECK_THROWS_AS(load_field("does_not_exist.wgf1"), IoError);
    std::ofstream bad("bad.wgf1", std::ios::binary);
    bad << "WGF1junk";
    bad.close();
    CHECK_THROWS_AS(load_field("bad.wgf1"), IoError);
}
