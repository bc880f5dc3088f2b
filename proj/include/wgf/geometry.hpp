#pragma once

#include <cmath>

#include "wgf/grid.hpp"

// Geometry of the graph surface (x, y, u(x,y)): area element, curvatures,
// surface functionals, and the surface Laplacian of a scalar along the graph.
//
// All pointwise combinations below group their sums symmetrically in x and y,
// so transposing the input field transposes the output bit for bit. Fields
// returned here are valid on the largest centered band the input supports;
// nodes beyond it hold NaN.

namespace wgf {

namespace detail {

struct GraphDerivs {
    ScalarField ux, uy, uxx, uyy, uxy;
};

inline GraphDerivs graph_derivs(const ScalarField& u) {
    return {diff(u, 1, 0), diff(u, 0, 1), diff(u, 2, 0), diff(u, 0, 2), diff(u, 1, 1)};
}

} // namespace detail

inline double q_of(double ux, double uy) {
    return std::sqrt(1.0 + (ux * ux + uy * uy));
}

inline ScalarField area_element(const ScalarField& u) {
    const auto g = detail::graph_derivs(u);
    ScalarField q = ScalarField::undefined(u.dom);
    q.time = u.time;
    const GridDomain& d = u.dom;
    for (int j = -d.ghost; j <= d.ny + 1 + d.ghost; ++j)
        for (int i = -d.ghost; i <= d.nx + 1 + d.ghost; ++i)
            q.at(i, j) = q_of(g.ux.at(i, j), g.uy.at(i, j));
    return q;
}

// H = Laplacian(u)/Q - grad u . (D2u grad u) / Q^3, the sum of the principal
// curvatures of the graph.
inline ScalarField mean_curvature(const ScalarField& u) {
    const auto g = detail::graph_derivs(u);
    ScalarField H = ScalarField::undefined(u.dom);
    H.time = u.time;
    const GridDomain& d = u.dom;
    for (int j = -d.ghost; j <= d.ny + 1 + d.ghost; ++j) {
        for (int i = -d.ghost; i <= d.nx + 1 + d.ghost; ++i) {
            const double ux = g.ux.at(i, j), uy = g.uy.at(i, j);
            const double uxx = g.uxx.at(i, j), uyy = g.uyy.at(i, j), uxy = g.uxy.at(i, j);
            const double q2 = 1.0 + (ux * ux + uy * uy);
            const double q = std::sqrt(q2);
            const double lap = uxx + uyy;
            const double quad = (ux * ux * uxx + uy * uy * uyy) + 2.0 * (ux * uy) * uxy;
            H.at(i, j) = lap / q - quad / (q2 * q);
        }
    }
    return H;
}

// Same curvature assembled over the common denominator Q^3. Agrees with
// mean_curvature up to roundoff; kept as an independent route for checks.
inline ScalarField mean_curvature_compact(const ScalarField& u) {
    const auto g = detail::graph_derivs(u);
    ScalarField H = ScalarField::undefined(u.dom);
    H.time = u.time;
    const GridDomain& d = u.dom;
    for (int j = -d.ghost; j <= d.ny + 1 + d.ghost; ++j) {
        for (int i = -d.ghost; i <= d.nx + 1 + d.ghost; ++i) {
            const double ux = g.ux.at(i, j), uy = g.uy.at(i, j);
            const double uxx = g.uxx.at(i, j), uyy = g.uyy.at(i, j), uxy = g.uxy.at(i, j);
            const double q2 = 1.0 + (ux * ux + uy * uy);
            const double num = ((1.0 + uy * uy) * uxx + (1.0 + ux * ux) * uyy) -
                               2.0 * (ux * uy) * uxy;
            H.at(i, j) = num / (q2 * std::sqrt(q2));
        }
    }
    return H;
}

inline ScalarField gauss_curvature(const ScalarField& u) {
    const auto g = detail::graph_derivs(u);
    ScalarField K = ScalarField::undefined(u.dom);
    K.time = u.time;
    const GridDomain& d = u.dom;
    for (int j = -d.ghost; j <= d.ny + 1 + d.ghost; ++j) {
        for (int i = -d.ghost; i <= d.nx + 1 + d.ghost; ++i) {
            const double ux = g.ux.at(i, j), uy = g.uy.at(i, j);
            const double q2 = 1.0 + (ux * ux + uy * uy);
            const double det = g.uxx.at(i, j) * g.uyy.at(i, j) -
                               g.uxy.at(i, j) * g.uxy.at(i, j);
            K.at(i, j) = det / (q2 * q2);
        }
    }
    return K;
}

// Surface Laplacian of f along the graph of u, in the two-flux divergence
// form: (1/Q) dx{ (1/Q)[(1+uy^2) fx - ux uy fy] }
//     + (1/Q) dy{ (1/Q)[-ux uy fx + (1+ux^2) fy] }.
// Valid on the interior (and deeper into the band if f supports it).
inline ScalarField laplace_beltrami(const ScalarField& f, const ScalarField& u) {
    require_same_domain(f, u, "laplace_beltrami");
    const GridDomain& d = u.dom;
    const ScalarField fx = diff(f, 1, 0), fy = diff(f, 0, 1);
    const ScalarField ux = diff(u, 1, 0), uy = diff(u, 0, 1);
    ScalarField F1 = ScalarField::undefined(d), F2 = ScalarField::undefined(d);
    for (int j = -d.ghost; j <= d.ny + 1 + d.ghost; ++j) {
        for (int i = -d.ghost; i <= d.nx + 1 + d.ghost; ++i) {
            const double px = ux.at(i, j), py = uy.at(i, j);
            const double gx = fx.at(i, j), gy = fy.at(i, j);
            const double q = q_of(px, py);
            F1.at(i, j) = ((1.0 + py * py) * gx - (px * py) * gy) / q;
            F2.at(i, j) = ((1.0 + px * px) * gy - (px * py) * gx) / q;
        }
    }
    const ScalarField dF1 = diff(F1, 1, 0), dF2 = diff(F2, 0, 1);
    ScalarField out = ScalarField::undefined(d);
    out.time = f.time;
    for (int j = -d.ghost; j <= d.ny + 1 + d.ghost; ++j) {
        for (int i = -d.ghost; i <= d.nx + 1 + d.ghost; ++i) {
            const double q = q_of(ux.at(i, j), uy.at(i, j));
            out.at(i, j) = (dF1.at(i, j) + dF2.at(i, j)) / q;
        }
    }
    for (int j = 1; j <= d.ny; ++j)
        for (int i = 1; i <= d.nx; ++i)
            if (!std::isfinite(out.at(i, j)))
                throw StateError("laplace_beltrami: nonfinite interior value");
    return out;
}

// ---------------------------------------------------------------------------
// Surface functionals (trapezoid over the covered nodes).

inline double willmore_energy(const ScalarField& u) {
    const ScalarField H = mean_curvature(u);
    const ScalarField q = area_element(u);
    return 0.25 * trapezoid_nodes(u.dom, [&](int i, int j) {
        const double hh = H.at(i, j);
        return hh * hh * q.at(i, j);
    });
}

inline double surface_area(const ScalarField& u) {
    const ScalarField q = area_element(u);
    return trapezoid_nodes(u.dom, [&](int i, int j) { return q.at(i, j); });
}

inline double sup_gradient(const ScalarField& u) {
    const ScalarField ux = diff(u, 1, 0), uy = diff(u, 0, 1);
    double m = 0;
    for (int j = 0; j <= u.dom.ny + 1; ++j)
        for (int i = 0; i <= u.dom.nx + 1; ++i)
            m = std::max(m, std::hypot(ux.at(i, j), uy.at(i, j)));
    return m;
}

// Length of the closed polyline through the lifted boundary nodes
// (x, y, u |_boundary), walked counterclockwise.
inline double boundary_curve_length(const ScalarField& u) {
    const GridDomain& d = u.dom;
    double L = 0;
    auto seg = [&](double ua, double ub) { L += std::hypot(d.h, ub - ua); };
    for (int i = 0; i <= d.nx; ++i) seg(u.at(i, 0), u.at(i + 1, 0));
    for (int j = 0; j <= d.ny; ++j) seg(u.at(d.nx + 1, j), u.at(d.nx + 1, j + 1));
    for (int i = d.nx + 1; i >= 1; --i) seg(u.at(i, d.ny + 1), u.at(i - 1, d.ny + 1));
    for (int j = d.ny + 1; j >= 1; --j) seg(u.at(0, j), u.at(0, j - 1));
    return L;
}

// Surface Laplacian of the mean curvature itself, the top-order block of the
// flow. H is available one node into the ghost band, which is exactly the
// extra reach the outer divergence needs.
inline ScalarField laplace_beltrami_H(const ScalarField& u) {
    if (u.dom.nx < 5 || u.dom.ny < 5)
        throw StateError("laplace_beltrami_H: interior too narrow for the nested stencils");
    return laplace_beltrami(mean_curvature(u), u);
}

struct DiameterReport {
    double bound = 0;
    double diam = 0;
};

// Geometric diameter bound for the graph surface,
//   diam <= (16/pi) * ( int |H| dA + (pi/2) * length(boundary curve) ),
// paired with the exact chordal diameter of the lifted node set.
inline DiameterReport diameter_bound(const ScalarField& u) {
    const ScalarField H = mean_curvature(u);
    const ScalarField q = area_element(u);
    const double curv = trapezoid_nodes(u.dom, [&](int i, int j) {
        return std::abs(H.at(i, j)) * q.at(i, j);
    });
    const double pi = 3.14159265358979323846;
    DiameterReport r;
    r.bound = (16.0 / pi) * (curv + 0.5 * pi * boundary_curve_length(u));

    const GridDomain& d = u.dom;
    struct P3 {
        double x, y, z;
    };
    std::vector<P3> pts;
    pts.reserve(static_cast<std::size_t>(d.nx + 2) * (d.ny + 2));
    for (int j = 0; j <= d.ny + 1; ++j)
        for (int i = 0; i <= d.nx + 1; ++i)
            pts.push_back({d.x(i), d.y(j), u.at(i, j)});
    double best = 0;
    for (std::size_t a = 0; a < pts.size(); ++a) {
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
            const double dx = pts[a].x - pts[b].x;
            const double dy = pts[a].y - pts[b].y;
            const double dz = pts[a].z - pts[b].z;
            best = std::max(best, dx * dx + dy * dy + dz * dz);
        }
    }
    r.diam = std::sqrt(best);
    return r;
}

} // namespace wgf
