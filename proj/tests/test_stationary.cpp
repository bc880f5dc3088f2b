#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"
#include "wgf/presets.hpp"
#include "wgf/stationary.hpp"

using namespace wgf;
using Catch::Approx;

TEST_CASE("newton with zero boundary data lands on the flat solution") {
    const GridDomain d = make_grid(0, 1, 0, 1, 17, 17);
    const Preset p = preset_bump(d, 0.004);
    const NewtonResult r = newton_stationary(p.u0, p.bc, NewtonConfig{});
    REQUIRE(r.converged);
    CHECK(r.history.back().res_inf <= 1e-9);
    double m = 0;
    for (int j = 1; j <= d.ny; ++j)
        for (int i = 1; i <= d.nx; ++i) m = std::max(m, std::abs(r.u.at(i, j)));
    CHECK(m < 1e-7);

    // the stationary point is a fixed point of the explicit stepper
    const double dt = cfl_dt(d, 0.5);
    const ScalarField s = step_explicit(r.u, p.bc, dt);
    double gap = 0;
    for (int j = 1; j <= d.ny; ++j)
        for (int i = 1; i <= d.nx; ++i) gap = std::max(gap, std::abs(s.at(i, j) - r.u.at(i, j)));
    CHECK(gap <= dt * 1e-9 * 10);
}

TEST_CASE("distinct initial guesses reach the same stationary state") {
    const GridDomain d = make_grid(0, 1, 0, 1, 17, 17);
    const Preset a = preset_bump(d, 0.004);
    const Preset b = preset_tent(d, 0.003);
    const ScalarField ua = newton_stationary(a.u0, a.bc, NewtonConfig{}).u;
    const ScalarField ub = newton_stationary(b.u0, b.bc, NewtonConfig{}).u;
    double gap = 0;
    for (int j = 1; j <= d.ny; ++j)
        for (int i = 1; i <= d.nx; ++i) gap = std::max(gap, std::abs(ua.at(i, j) - ub.at(i, j)));
    CHECK(gap <= 1e-8);
}

TEST_CASE("spherical cap data reproduces the cap") {
    const GridDomain d = make_grid(0, 1, 0, 1, 17, 17);
    const Preset p = preset_cap(d, 2.0);
    const NewtonResult r = newton_stationary(p.u0, p.bc, NewtonConfig{});
    REQUIRE(r.converged);
    CHECK(r.iterations <= 8);
    double gap = 0;
    for (int j = 1; j <= d.ny; ++j)
        for (int i = 1; i <= d.nx; ++i) gap = std::max(gap, std::abs(r.u.at(i, j) - p.u0.at(i, j)));
    CHECK(gap < 0.05);
    CHECK(r.history.back().step_fraction == 1.0);

    // quadratic tail: once the residual is small it collapses fast
    bool contracted = false;
    for (size_t k = 0; k + 1 < r.history.size(); ++k)
        if (r.history[k].res_inf < 1e-2 &&
            r.history[k + 1].res_inf < 0.1 * r.history[k].res_inf)
            contracted = true;
    CHECK(contracted);
}

TEST_CASE("iteration cap raises the non-convergence error") {
    const GridDomain d = make_grid(0, 1, 0, 1, 17, 17);
    const Preset p = preset_cap(d, 2.0);
    NewtonConfig cfg;
    cfg.max_iters = 1;
    CHECK_THROWS_AS(newton_stationary(p.u0, p.bc, cfg), NonConvergenceError);
}

TEST_CASE("stationary residual matches the flow velocity up to the area element") {
    const GridDomain d = make_grid(0, 1, 0, 1, 15, 15);
    std::mt19937 rng(404);
    const ScalarField u = support::random_smooth(d, rng, 0.8);
    const BoundaryData bc = BoundaryData::from_field(u);
    const ScalarField res = residual_stationary(u, bc);
    const ScalarField ug = apply_clamped_ghosts(u, bc);
    const ScalarField v = rhs_geometric(ug);
    const ScalarField q = area_element(ug);
    double scale = 0, gap = 0;
    for (int j = 1; j <= d.ny; ++j)
        for (int i = 1; i <= d.nx; ++i) {
            scale = std::max(scale, std::abs(v.at(i, j)));
            gap = std::max(gap, std::abs(v.at(i, j) + q.at(i, j) * res.at(i, j)));
        }
    REQUIRE(scale > 0);
    CHECK(gap <= 1e-14 * scale);
}

TEST_CASE("solve_stationary is the newton driver") {
    const GridDomain d = make_grid(0, 1, 0, 1, 11, 11);
    const Preset p = preset_bump(d, 0.002);
    const ScalarField a = solve_stationary(p.bc, p.u0, NewtonConfig{});
    const ScalarField b = newton_stationary(p.u0, p.bc, NewtonConfig{}).u;
    for (int j = 1; j <= d.ny; ++j)
        for (int i = 1; i <= d.nx; ++i) CHECK(a.at(i, j) == b.at(i, j));
}
