#pragma once

#include <cmath>
#include <string>

#include "wgf/grid.hpp"

// Canonical initial data: every scenario and acceptance fixture builds its
// fields from these, so experiments stay config-only. Each preset returns the
// analytic nodal fill (ghost band included) together with its own clamped
// trace; callers may still override the bc.

namespace wgf {

struct Preset {
    ScalarField u0;
    BoundaryData bc;
};

namespace detail {

template <class F>
inline ScalarField fill_analytic(const GridDomain& d, F&& f) {
    ScalarField u = ScalarField::undefined(d);
    for (int j = -d.ghost; j <= d.ny + 1 + d.ghost; ++j)
        for (int i = -d.ghost; i <= d.nx + 1 + d.ghost; ++i)
            u.at(i, j) = f(d.x(i), d.y(j));
    return u;
}

} // namespace detail

inline Preset preset_zero(const GridDomain& d) {
    return {detail::fill_analytic(d, [](double, double) { return 0.0; }),
            BoundaryData::zero(d)};
}

inline Preset preset_plane(const GridDomain& d, double a, double b) {
    auto f = [a, b](double x, double y) { return a * x + b * y; };
    return {detail::fill_analytic(d, f),
            BoundaryData::from_analytic(
                d, f, [a](double, double) { return a; },
                [b](double, double) { return b; })};
}

// Smooth compactly supported bump A exp(1 - 1/(1 - r^2/w^2)) on the disc of
// radius w; identically zero outside, so the matching clamped data vanish.
inline Preset preset_bump(const GridDomain& d, double amplitude, double cx, double cy,
                          double width) {
    if (!(width > 0)) throw ConfigError("bump preset: width must be positive");
    if (!(cx - width > d.x0 && cx + width < d.x1 && cy - width > d.y0 && cy + width < d.y1))
        throw ConfigError("bump preset: support disc must lie strictly inside the domain");
    auto f = [=](double x, double y) {
        const double r2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (width * width);
        if (r2 >= 1) return 0.0;
        return amplitude * std::exp(1.0 - 1.0 / (1.0 - r2));
    };
    return {detail::fill_analytic(d, f), BoundaryData::zero(d)};
}

inline Preset preset_bump(const GridDomain& d, double amplitude) {
    return preset_bump(d, amplitude, 0.5 * (d.x0 + d.x1), 0.5 * (d.y0 + d.y1),
                       0.4 * std::min(d.x1 - d.x0, d.y1 - d.y0));
}

// Lipschitz pyramid: merely C^{0,1} data, the rough-initial-condition
// workhorse. Support strictly inside, data zero.
inline Preset preset_tent(const GridDomain& d, double amplitude, double rho) {
    if (!(rho > 0)) throw ConfigError("tent preset: half-width must be positive");
    const double cx = 0.5 * (d.x0 + d.x1), cy = 0.5 * (d.y0 + d.y1);
    if (!(cx - rho > d.x0 && cx + rho < d.x1 && cy - rho > d.y0 && cy + rho < d.y1))
        throw ConfigError("tent preset: support square must lie strictly inside the domain");
    auto f = [=](double x, double y) {
        const double r = std::max(std::abs(x - cx), std::abs(y - cy));
        return amplitude * std::max(0.0, 1.0 - r / rho);
    };
    return {detail::fill_analytic(d, f), BoundaryData::zero(d)};
}

inline Preset preset_tent(const GridDomain& d, double amplitude) {
    return preset_tent(d, amplitude, 0.4 * std::min(d.x1 - d.x0, d.y1 - d.y0));
}

// Downward-opening spherical cap over the whole covered region (H = -2/R,
// K = 1/R^2 exactly); R must clear the ghost corners with 2% margin.
inline Preset preset_cap(const GridDomain& d, double R) {
    const double cx = 0.5 * (d.x0 + d.x1), cy = 0.5 * (d.y0 + d.y1);
    const double ex = 0.5 * (d.x1 - d.x0) + d.ghost * d.h;
    const double ey = 0.5 * (d.y1 - d.y0) + d.ghost * d.h;
    const double rmax = std::sqrt(ex * ex + ey * ey);
    if (!(R >= 1.02 * rmax))
        throw ConfigError("cap preset: radius " + std::to_string(R) +
                          " too small; the ghost corners need R >= " +
                          std::to_string(1.02 * rmax));
    auto f = [=](double x, double y) {
        return std::sqrt(R * R - (x - cx) * (x - cx) - (y - cy) * (y - cy));
    };
    auto fx = [=](double x, double y) { return -(x - cx) / f(x, y); };
    auto fy = [=](double x, double y) { return -(y - cy) / f(x, y); };
    return {detail::fill_analytic(d, f), BoundaryData::from_analytic(d, f, fx, fy)};
}

} // namespace wgf
