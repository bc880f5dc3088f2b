#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wgf/errors.hpp"

// Uniform square-cell grid on a rectangle, scalar fields with a two-deep ghost
// margin, centered stencils up to fourth order, and the clamped ghost fill.
//
// Node indexing along x: i = 0 and i = nx+1 are the boundary nodes, 1..nx the
// interior, negative i and i > nx+1 the ghost layers. Same along y. A field
// stores the full (nx+2+2*ghost) x (ny+2+2*ghost) array; nodes that have not
// been populated hold quiet NaN so stale reads are detectable.

namespace wgf {

struct GridDomain {
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    int nx = 0, ny = 0;
    double h = 0;
    int ghost = 2;

    int width() const { return nx + 2 + 2 * ghost; }
    int height() const { return ny + 2 + 2 * ghost; }
    double x(int i) const { return x0 + i * h; }
    double y(int j) const { return y0 + j * h; }
    double area() const { return (x1 - x0) * (y1 - y0); }
    double perimeter() const { return 2 * ((x1 - x0) + (y1 - y0)); }

    bool same(const GridDomain& o) const {
        return x0 == o.x0 && x1 == o.x1 && y0 == o.y0 && y1 == o.y1 &&
               nx == o.nx && ny == o.ny && ghost == o.ghost;
    }
};

inline GridDomain make_grid(double x0, double x1, double y0, double y1,
                            int nx, int ny, int ghost = 2) {
    if (!(x1 > x0) || !(y1 > y0))
        throw ConfigError("make_grid: domain must have positive extent");
    if (nx < 5 || ny < 5)
        throw ConfigError("make_grid: need nx >= 5 and ny >= 5, got nx=" +
                          std::to_string(nx) + " ny=" + std::to_string(ny));
    if (ghost < 2) throw ConfigError("make_grid: ghost width must be >= 2");
    const double hx = (x1 - x0) / (nx + 1);
    const double hy = (y1 - y0) / (ny + 1);
    if (std::abs(hx - hy) > 1e-12 * std::max(hx, hy))
        throw ConfigError("make_grid: cells not square, hx=" + std::to_string(hx) +
                          " hy=" + std::to_string(hy) +
                          "; pick nx, ny matching the aspect ratio");
    GridDomain d;
    d.x0 = x0; d.x1 = x1; d.y0 = y0; d.y1 = y1;
    d.nx = nx; d.ny = ny; d.h = hx; d.ghost = ghost;
    return d;
}

struct ScalarField {
    GridDomain dom;
    std::vector<double> v;
    double time = 0;

    ScalarField() = default;
    explicit ScalarField(const GridDomain& d, double fill)
        : dom(d), v(static_cast<size_t>(d.width()) * d.height(), fill) {}

    static ScalarField undefined(const GridDomain& d) {
        return ScalarField(d, std::numeric_limits<double>::quiet_NaN());
    }
    static ScalarField zeros(const GridDomain& d) { return ScalarField(d, 0.0); }

    double& at(int i, int j) {
        return v[static_cast<size_t>(j + dom.ghost) * dom.width() + (i + dom.ghost)];
    }
    double at(int i, int j) const {
        return v[static_cast<size_t>(j + dom.ghost) * dom.width() + (i + dom.ghost)];
    }
    bool in_array(int i, int j) const {
        return i >= -dom.ghost && i <= dom.nx + 1 + dom.ghost &&
               j >= -dom.ghost && j <= dom.ny + 1 + dom.ghost;
    }
};

inline void require_same_domain(const ScalarField& a, const ScalarField& b,
                                const char* who) {
    if (!a.dom.same(b.dom))
        throw StateError(std::string(who) + ": fields live on different grids");
}

// Fill every node, ghosts included, from an analytic function. Test and preset
// helper; flow states get their ghosts from apply_clamped_ghosts instead.
template <class F>
ScalarField fill_from_function(const GridDomain& d, F&& f) {
    ScalarField u = ScalarField::undefined(d);
    for (int j = -d.ghost; j <= d.ny + 1 + d.ghost; ++j)
        for (int i = -d.ghost; i <= d.nx + 1 + d.ghost; ++i)
            u.at(i, j) = f(d.x(i), d.y(j));
    return u;
}

// Fill interior and boundary nodes only; ghost nodes stay NaN.
template <class F>
ScalarField fill_covered_nodes(const GridDomain& d, F&& f) {
    ScalarField u = ScalarField::undefined(d);
    for (int j = 0; j <= d.ny + 1; ++j)
        for (int i = 0; i <= d.nx + 1; ++i)
            u.at(i, j) = f(d.x(i), d.y(j));
    return u;
}

// ---------------------------------------------------------------------------
// Centered stencils

struct Stencil1D {
    int n = 1;
    int reach = 0;
    int off[5] = {0};
    double w[5] = {1.0};
};

inline Stencil1D stencil_1d(int order, double h) {
    Stencil1D s;
    switch (order) {
    case 0:
        s = {1, 0, {0}, {1.0}};
        break;
    case 1:
        s = {2, 1, {-1, 1}, {-0.5, 0.5}};
        break;
    case 2:
        s = {3, 1, {-1, 0, 1}, {1.0, -2.0, 1.0}};
        break;
    case 3:
        s = {4, 2, {-2, -1, 1, 2}, {-0.5, 1.0, -1.0, 0.5}};
        break;
    case 4:
        s = {5, 2, {-2, -1, 0, 1, 2}, {1.0, -4.0, 6.0, -4.0, 1.0}};
        break;
    default:
        throw ConfigError("stencil_1d: order out of range");
    }
    const double scale = std::pow(h, -order);
    for (int k = 0; k < s.n; ++k) s.w[k] *= scale;
    return s;
}

// Second-order centered difference of d^(bx+by) f / dx^bx dy^by, evaluated at
// every node whose stencil fits inside the array; other nodes stay NaN. Throws
// if any interior value of the result is nonfinite, which is what happens when
// the input's ghost margin was never populated.
inline ScalarField diff(const ScalarField& f, int bx, int by) {
    if (bx < 0 || by < 0 || bx + by > 4)
        throw ConfigError("diff: multi-index order must satisfy |beta| <= 4");
    const GridDomain& d = f.dom;
    const Stencil1D sx = stencil_1d(bx, d.h);
    const Stencil1D sy = stencil_1d(by, d.h);
    ScalarField out = ScalarField::undefined(d);
    out.time = f.time;
    const int ilo = -d.ghost + sx.reach, ihi = d.nx + 1 + d.ghost - sx.reach;
    const int jlo = -d.ghost + sy.reach, jhi = d.ny + 1 + d.ghost - sy.reach;
    for (int j = jlo; j <= jhi; ++j) {
        for (int i = ilo; i <= ihi; ++i) {
            double acc = 0;
            if (bx == by) {
                // equal orders: associate the tensor terms in (a,b)/(b,a)
                // pairs so transposing the field transposes the result to
                // the bit (plain row-then-column accumulation does not)
                for (int b = 0; b < sy.n; ++b) {
                    acc += sy.w[b] * sy.w[b] * f.at(i + sy.off[b], j + sy.off[b]);
                    for (int a = 0; a < b; ++a)
                        acc += sx.w[a] * sy.w[b] *
                               (f.at(i + sx.off[a], j + sy.off[b]) +
                                f.at(i + sx.off[b], j + sy.off[a]));
                }
            } else {
                for (int b = 0; b < sy.n; ++b) {
                    double row = 0;
                    for (int a = 0; a < sx.n; ++a)
                        row += sx.w[a] * f.at(i + sx.off[a], j + sy.off[b]);
                    acc += sy.w[b] * row;
                }
            }
            out.at(i, j) = acc;
        }
    }
    for (int j = 1; j <= d.ny; ++j)
        for (int i = 1; i <= d.nx; ++i)
            if (!std::isfinite(out.at(i, j)))
                throw StateError("diff: nonfinite value within stencil reach of interior node (" +
                                 std::to_string(i) + "," + std::to_string(j) +
                                 "); ghost margin not populated?");
    return out;
}

// ---------------------------------------------------------------------------
// Quadrature over the closed rectangle (composite trapezoid on the node set).
// Terms are summed in sorted order so the result is invariant under symmetries
// of the node layout (x<->y reflection gives bit-identical sums).

namespace detail {
inline double canonical_sum(std::vector<double>& terms) {
    std::sort(terms.begin(), terms.end());
    double s = 0;
    for (double t : terms) s += t;
    return s;
}
} // namespace detail

template <class F>
double trapezoid_nodes(const GridDomain& d, F&& value_at) {
    std::vector<double> terms;
    terms.reserve(static_cast<size_t>(d.nx + 2) * (d.ny + 2));
    const double cell = d.h * d.h;
    for (int j = 0; j <= d.ny + 1; ++j) {
        const double wy = (j == 0 || j == d.ny + 1) ? 0.5 : 1.0;
        for (int i = 0; i <= d.nx + 1; ++i) {
            const double wx = (i == 0 || i == d.nx + 1) ? 0.5 : 1.0;
            const double t = value_at(i, j) * (wx * wy * cell);
            if (!std::isfinite(t))
                throw StateError("trapezoid_nodes: nonfinite integrand");
            terms.push_back(t);
        }
    }
    return detail::canonical_sum(terms);
}

inline double trapezoid(const ScalarField& u) {
    return trapezoid_nodes(u.dom, [&](int i, int j) { return u.at(i, j); });
}

inline double l2_norm(const ScalarField& u) {
    return std::sqrt(trapezoid_nodes(u.dom, [&](int i, int j) {
        const double a = u.at(i, j);
        return a * a;
    }));
}

inline double max_abs_interior(const ScalarField& u) {
    double m = 0;
    for (int j = 1; j <= u.dom.ny; ++j)
        for (int i = 1; i <= u.dom.nx; ++i)
            m = std::max(m, std::abs(u.at(i, j)));
    return m;
}

inline double max_abs_covered(const ScalarField& u) {
    double m = 0;
    for (int j = 0; j <= u.dom.ny + 1; ++j)
        for (int i = 0; i <= u.dom.nx + 1; ++i)
            m = std::max(m, std::abs(u.at(i, j)));
    return m;
}

// ---------------------------------------------------------------------------
// Clamped boundary data: height g0 and outward normal slope g1 on every
// boundary node, stored per edge. Corner nodes belong to two edges; their g0
// entries must agree, their g1 entries are per-edge (two normals).

struct EdgeData {
    std::vector<double> g0, g1;
};

struct BoundaryData {
    EdgeData left, right;  // index j in [0, ny+1], outward normal -x / +x
    EdgeData bottom, top;  // index i in [0, nx+1], outward normal -y / +y

    static BoundaryData zero(const GridDomain& d) {
        BoundaryData b;
        b.left.g0.assign(d.ny + 2, 0.0);
        b.left.g1 = b.left.g0;
        b.right = b.left;
        b.bottom.g0.assign(d.nx + 2, 0.0);
        b.bottom.g1 = b.bottom.g0;
        b.top = b.bottom;
        return b;
    }

    // g0 from f, g1 from the outward component of (fx, fy).
    template <class F, class Fx, class Fy>
    static BoundaryData from_analytic(const GridDomain& d, F&& f, Fx&& fx, Fy&& fy) {
        BoundaryData b = zero(d);
        for (int j = 0; j <= d.ny + 1; ++j) {
            b.left.g0[j] = f(d.x0, d.y(j));
            b.left.g1[j] = -fx(d.x0, d.y(j));
            b.right.g0[j] = f(d.x1, d.y(j));
            b.right.g1[j] = fx(d.x1, d.y(j));
        }
        for (int i = 0; i <= d.nx + 1; ++i) {
            b.bottom.g0[i] = f(d.x(i), d.y0);
            b.bottom.g1[i] = -fy(d.x(i), d.y0);
            b.top.g0[i] = f(d.x(i), d.y1);
            b.top.g1[i] = fy(d.x(i), d.y1);
        }
        return b;
    }

    // Discrete trace of a field: g0 from the boundary nodes, g1 from the
    // one-sided second-order normal slope of the covered values.
    static BoundaryData from_field(const ScalarField& u) {
        const GridDomain& d = u.dom;
        const double h2 = 2 * d.h;
        BoundaryData b = zero(d);
        for (int j = 0; j <= d.ny + 1; ++j) {
            b.left.g0[j] = u.at(0, j);
            b.left.g1[j] = (3 * u.at(0, j) - 4 * u.at(1, j) + u.at(2, j)) / h2;
            b.right.g0[j] = u.at(d.nx + 1, j);
            b.right.g1[j] = (3 * u.at(d.nx + 1, j) - 4 * u.at(d.nx, j) + u.at(d.nx - 1, j)) / h2;
        }
        for (int i = 0; i <= d.nx + 1; ++i) {
            b.bottom.g0[i] = u.at(i, 0);
            b.bottom.g1[i] = (3 * u.at(i, 0) - 4 * u.at(i, 1) + u.at(i, 2)) / h2;
            b.top.g0[i] = u.at(i, d.ny + 1);
            b.top.g1[i] = (3 * u.at(i, d.ny + 1) - 4 * u.at(i, d.ny) + u.at(i, d.ny - 1)) / h2;
        }
        return b;
    }

    void validate(const GridDomain& d) const {
        if (left.g0.size() != size_t(d.ny + 2) || left.g1.size() != size_t(d.ny + 2) ||
            right.g0.size() != size_t(d.ny + 2) || right.g1.size() != size_t(d.ny + 2) ||
            bottom.g0.size() != size_t(d.nx + 2) || bottom.g1.size() != size_t(d.nx + 2) ||
            top.g0.size() != size_t(d.nx + 2) || top.g1.size() != size_t(d.nx + 2))
            throw ConfigError("BoundaryData: edge array sizes do not match the grid");
        double scale = 1.0;
        for (double g : left.g0) { if (!std::isfinite(g)) throw ConfigError("BoundaryData: nonfinite g0"); scale = std::max(scale, std::abs(g)); }
        for (double g : right.g0) scale = std::max(scale, std::abs(g));
        const double tol = 1e-9 * scale;
        const int ny1 = d.ny + 1, nx1 = d.nx + 1;
        if (std::abs(left.g0[0] - bottom.g0[0]) > tol ||
            std::abs(right.g0[0] - bottom.g0[nx1]) > tol ||
            std::abs(left.g0[ny1] - top.g0[0]) > tol ||
            std::abs(right.g0[ny1] - top.g0[nx1]) > tol)
            throw ConfigError("BoundaryData: corner heights disagree between edges");
    }

    BoundaryData shifted(double c) const {
        BoundaryData b = *this;
        for (auto* e : {&b.left, &b.right, &b.bottom, &b.top})
            for (double& g : e->g0) g += c;
        return b;
    }
};

namespace detail {

// Value of the degree-4 extrapolant through p(0)=g0, p'(0)=s (inward units),
// p(1)=u1, p(2)=u2, p(3)=u3, evaluated two nodes outside the boundary.
inline double quartic_outer_ghost(double g0, double s, double u1, double u2, double u3) {
    const double b1 = u1 - g0 - s;
    const double b2 = u2 - g0 - 2 * s;
    const double b3 = u3 - g0 - 3 * s;
    return g0 - 2 * s + 40.0 * b1 - 15.0 * b2 + (8.0 / 3.0) * b3;
}

// Quadratic extension of 1d edge data beyond its end nodes, used only for the
// corner ghost blocks.
inline double edge_extend(const std::vector<double>& g, int idx) {
    const int n = static_cast<int>(g.size());
    if (idx >= 0 && idx < n) return g[idx];
    // g(k-1) = 3 g(k) - 3 g(k+1) + g(k+2), applied once or twice outward
    if (idx < 0) {
        const double v1 = 3 * g[0] - 3 * g[1] + g[2];
        return (idx == -1) ? v1 : 3 * v1 - 3 * g[0] + g[1];
    }
    const double v1 = 3 * g[n - 1] - 3 * g[n - 2] + g[n - 3];
    return (idx == n) ? v1 : 3 * v1 - 3 * g[n - 1] + g[n - 2];
}

} // namespace detail

// Boundary nodes get g0. The first ghost layer mirrors the first interior
// layer with the clamped slope folded in (ghost = mirror + 2h g1); the second
// layer extrapolates the degree-4 polynomial matching g0, g1 and three
// interior values. Corner blocks average the two one-edge routes so the fill
// commutes with x<->y reflection. Idempotent: ghosts depend only on covered
// values and bc.
inline ScalarField apply_clamped_ghosts(const ScalarField& u, const BoundaryData& bc) {
    const GridDomain& d = u.dom;
    bc.validate(d);
    ScalarField out = u;
    const double h = d.h;
    const int nx = d.nx, ny = d.ny;

    for (int j = 0; j <= ny + 1; ++j) {
        out.at(0, j) = bc.left.g0[j];
        out.at(nx + 1, j) = bc.right.g0[j];
    }
    for (int i = 0; i <= nx + 1; ++i) {
        out.at(i, 0) = bc.bottom.g0[i];
        out.at(i, ny + 1) = bc.top.g0[i];
    }

    auto fill_pair = [&](double g0, double g1, double u1, double u2, double u3,
                         double& ghost1, double& ghost2) {
        ghost1 = u1 + 2 * h * g1;
        ghost2 = detail::quartic_outer_ghost(g0, -h * g1, u1, u2, u3);
    };

    for (int i = 0; i <= nx + 1; ++i) {
        fill_pair(bc.bottom.g0[i], bc.bottom.g1[i], out.at(i, 1), out.at(i, 2), out.at(i, 3),
                  out.at(i, -1), out.at(i, -2));
        fill_pair(bc.top.g0[i], bc.top.g1[i], out.at(i, ny), out.at(i, ny - 1), out.at(i, ny - 2),
                  out.at(i, ny + 2), out.at(i, ny + 3));
    }
    for (int j = 0; j <= ny + 1; ++j) {
        fill_pair(bc.left.g0[j], bc.left.g1[j], out.at(1, j), out.at(2, j), out.at(3, j),
                  out.at(-1, j), out.at(-2, j));
        fill_pair(bc.right.g0[j], bc.right.g1[j], out.at(nx, j), out.at(nx - 1, j), out.at(nx - 2, j),
                  out.at(nx + 2, j), out.at(nx + 3, j));
    }

    // Corner ghost blocks. Route X extends an x-edge formula into ghost rows,
    // route Y extends a y-edge formula into ghost columns; both use the edge
    // data continued quadratically past the corner. Their average is invariant
    // under transposition.
    struct CornerSide {
        const EdgeData* e;
        int inner[3];  // node indices of the three layers nearest this edge
        int ghostpos[2];
    };
    auto corner_value = [&](const CornerSide& xe, int row, const CornerSide& ye, int col,
                            int a, int b) {
        // ghost node (xe.ghostpos[a-1], ye.ghostpos[b-1]); row/col are its
        // array coordinates along the opposite axis.
        const double gx0 = detail::edge_extend(xe.e->g0, row);
        const double gx1 = detail::edge_extend(xe.e->g1, row);
        double vx;
        if (a == 1) {
            vx = out.at(xe.inner[0], row) + 2 * h * gx1;
        } else {
            vx = detail::quartic_outer_ghost(gx0, -h * gx1, out.at(xe.inner[0], row),
                                             out.at(xe.inner[1], row), out.at(xe.inner[2], row));
        }
        const double gy0 = detail::edge_extend(ye.e->g0, col);
        const double gy1 = detail::edge_extend(ye.e->g1, col);
        double vy;
        if (b == 1) {
            vy = out.at(col, ye.inner[0]) + 2 * h * gy1;
        } else {
            vy = detail::quartic_outer_ghost(gy0, -h * gy1, out.at(col, ye.inner[0]),
                                             out.at(col, ye.inner[1]), out.at(col, ye.inner[2]));
        }
        return 0.5 * (vx + vy);
    };

    const CornerSide leftside{&bc.left, {1, 2, 3}, {-1, -2}};
    const CornerSide rightside{&bc.right, {nx, nx - 1, nx - 2}, {nx + 2, nx + 3}};
    const CornerSide bottomside{&bc.bottom, {1, 2, 3}, {-1, -2}};
    const CornerSide topside{&bc.top, {ny, ny - 1, ny - 2}, {ny + 2, ny + 3}};

    for (int a = 1; a <= 2; ++a) {
        for (int b = 1; b <= 2; ++b) {
            out.at(leftside.ghostpos[a - 1], bottomside.ghostpos[b - 1]) =
                corner_value(leftside, bottomside.ghostpos[b - 1], bottomside,
                             leftside.ghostpos[a - 1], a, b);
            out.at(rightside.ghostpos[a - 1], bottomside.ghostpos[b - 1]) =
                corner_value(rightside, bottomside.ghostpos[b - 1], bottomside,
                             rightside.ghostpos[a - 1], a, b);
            out.at(leftside.ghostpos[a - 1], topside.ghostpos[b - 1]) =
                corner_value(leftside, topside.ghostpos[b - 1], topside,
                             leftside.ghostpos[a - 1], a, b);
            out.at(rightside.ghostpos[a - 1], topside.ghostpos[b - 1]) =
                corner_value(rightside, topside.ghostpos[b - 1], topside,
                             rightside.ghostpos[a - 1], a, b);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Compatibility of an initial datum with its boundary data: height trace and
// first-order (clamped slope) residuals. The fourth-order residual lives with
// the operator assembly (see check_compatibility in rhs.hpp).

struct CompatReport {
    double height_residual = 0;
    double slope_residual = 0;
    std::optional<double> fourth_order_residual;
    double tol = 0;
    bool height_ok = false;
    bool slope_ok = false;
};

inline CompatReport check_compatibility(const ScalarField& u0, const BoundaryData& bc,
                                        double tol) {
    const GridDomain& d = u0.dom;
    bc.validate(d);
    const BoundaryData trace = BoundaryData::from_field(u0);
    CompatReport r;
    r.tol = tol;
    auto edge_gap = [&](const EdgeData& a, const EdgeData& b) {
        double h0 = 0, h1 = 0;
        for (size_t k = 0; k < a.g0.size(); ++k) {
            h0 = std::max(h0, std::abs(a.g0[k] - b.g0[k]));
            h1 = std::max(h1, std::abs(a.g1[k] - b.g1[k]));
        }
        return std::pair<double, double>(h0, h1);
    };
    for (auto [ta, ba] : {std::pair(&trace.left, &bc.left), std::pair(&trace.right, &bc.right),
                          std::pair(&trace.bottom, &bc.bottom), std::pair(&trace.top, &bc.top)}) {
        auto [h0, h1] = edge_gap(*ta, *ba);
        r.height_residual = std::max(r.height_residual, h0);
        r.slope_residual = std::max(r.slope_residual, h1);
    }
    r.height_ok = r.height_residual <= tol;
    r.slope_ok = r.slope_residual <= tol;
    return r;
}

} // namespace wgf
