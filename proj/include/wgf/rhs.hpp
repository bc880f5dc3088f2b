#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "wgf/geometry.hpp"

// The flow's right-hand side and its principal/remainder splitting.
//
// The evolution is u_t = rhs(u) with
//   rhs(u) = -Q * ( lap_gamma(H) + 2 H (H^2/4 - K) ),
// whose leading fourth-order part, with the gradient frozen, is
//   -sum c_{kl} D^{k,l} u,   c_{kl} = L_{kl}(grad u) / Q^4,
// the quartic symbol sum c xi^(k,l) factoring as
//   [ |xi|^2 + (uy xi1 - ux xi2)^2 ]^2 / Q^4,
// hence pinched between |xi|^4 / Q^4 and |xi|^4. The remainder is defined as
// exactly the difference
//   R(u) = -rhs(u) - principal_apply(u; u),
// so rhs + principal + remainder == 0 holds bit for bit by construction and
// the splitting never drifts from the geometric assembly.

namespace wgf {

namespace detail {

struct CoeffsAt {
    double c40, c31, c22, c13, c04;
};

inline CoeffsAt principal_coeffs_at(double ux, double uy) {
    const double ax = 1.0 + ux * ux;
    const double ay = 1.0 + uy * uy;
    const double q2 = 1.0 + (ux * ux + uy * uy);
    const double q4 = q2 * q2;
    const double cross = ux * uy;
    CoeffsAt c;
    c.c40 = ay * ay / q4;
    c.c31 = -4.0 * ay * cross / q4;
    c.c22 = (2.0 * (ay * ax) + 4.0 * (cross * cross)) / q4;
    c.c13 = -4.0 * ax * cross / q4;
    c.c04 = ax * ax / q4;
    return c;
}

} // namespace detail

// The five coefficient fields of the frozen fourth-order operator, normalized
// by Q^4 so they are dimensionless functions of the gradient alone.
struct PrincipalCoeffs {
    ScalarField L40, L31, L22, L13, L04;
};

inline PrincipalCoeffs principal_coeffs(const ScalarField& u) {
    const GridDomain& d = u.dom;
    const ScalarField ux = diff(u, 1, 0), uy = diff(u, 0, 1);
    PrincipalCoeffs c{ScalarField::undefined(d), ScalarField::undefined(d),
                      ScalarField::undefined(d), ScalarField::undefined(d),
                      ScalarField::undefined(d)};
    for (int j = -d.ghost; j <= d.ny + 1 + d.ghost; ++j) {
        for (int i = -d.ghost; i <= d.nx + 1 + d.ghost; ++i) {
            const double px = ux.at(i, j), py = uy.at(i, j);
            if (!std::isfinite(px) || !std::isfinite(py)) continue;
            const detail::CoeffsAt a = detail::principal_coeffs_at(px, py);
            c.L40.at(i, j) = a.c40;
            c.L31.at(i, j) = a.c31;
            c.L22.at(i, j) = a.c22;
            c.L13.at(i, j) = a.c13;
            c.L04.at(i, j) = a.c04;
        }
    }
    return c;
}

// Frozen fourth-order operator sum L_{kl} D^{k,l} w. Valid on the interior.
//
// The discrete D^{k,l} must be the ones the geometric assembly linearizes
// to, not the one-shot product stencils: mean_curvature takes narrow second
// differences and laplace_beltrami wraps them in centered firsts (a wide
// second difference), so D^{4,0} is that composition, and the mixed second
// derivative is symmetrized over the two orders of composition. With the
// plain product stencils the split would leave an O(h^2) *linear* term in
// the remainder and cubic smallness would be lost.
inline ScalarField principal_apply(const PrincipalCoeffs& c, const ScalarField& w) {
    require_same_domain(c.L40, w, "principal_apply");
    const GridDomain& d = w.dom;
    const ScalarField wxx = diff(w, 2, 0), wyy = diff(w, 0, 2);
    const ScalarField w40 = diff(diff(wxx, 1, 0), 1, 0);
    const ScalarField w04 = diff(diff(wyy, 0, 1), 0, 1);
    const ScalarField wxxyy = diff(diff(wxx, 0, 1), 0, 1); // wide-y of narrow-xx
    const ScalarField wyyxx = diff(diff(wyy, 1, 0), 1, 0); // wide-x of narrow-yy
    const ScalarField w31 = diff(w, 3, 1), w13 = diff(w, 1, 3);
    ScalarField out = ScalarField::undefined(d);
    out.time = w.time;
    for (int j = 1; j <= d.ny; ++j) {
        for (int i = 1; i <= d.nx; ++i) {
            out.at(i, j) = (c.L40.at(i, j) * w40.at(i, j) + c.L04.at(i, j) * w04.at(i, j)) +
                           (c.L31.at(i, j) * w31.at(i, j) + c.L13.at(i, j) * w13.at(i, j)) +
                           c.L22.at(i, j) * 0.5 * (wxxyy.at(i, j) + wyyxx.at(i, j));
        }
    }
    return out;
}

// Convenience: coefficients from the gradient of ufreeze, derivatives of w.
inline ScalarField principal_apply(const ScalarField& ufreeze, const ScalarField& w) {
    require_same_domain(ufreeze, w, "principal_apply");
    return principal_apply(principal_coeffs(ufreeze), w);
}

// The braced operator lap_gamma H + 2 H (H^2/4 - K), assembled by nesting
// centered differences. Vanishes at stationary points; valid on the interior.
inline ScalarField geometric_operator(const ScalarField& u) {
    const ScalarField H = mean_curvature(u);
    const ScalarField K = gauss_curvature(u);
    const ScalarField lb = laplace_beltrami(H, u);
    const GridDomain& d = u.dom;
    ScalarField out = ScalarField::undefined(d);
    out.time = u.time;
    for (int j = 1; j <= d.ny; ++j) {
        for (int i = 1; i <= d.nx; ++i) {
            const double hh = H.at(i, j);
            out.at(i, j) = lb.at(i, j) + (0.5 * hh * hh * hh - 2.0 * hh * K.at(i, j));
        }
    }
    return out;
}

// Full geometric right-hand side -Q ( lap_gamma H + 2 H (H^2/4 - K) ).
// Valid on the interior.
inline ScalarField rhs_geometric(const ScalarField& u) {
    const ScalarField core = geometric_operator(u);
    const ScalarField q = area_element(u);
    const GridDomain& d = u.dom;
    ScalarField out = ScalarField::undefined(d);
    out.time = u.time;
    for (int j = 1; j <= d.ny; ++j)
        for (int i = 1; i <= d.nx; ++i)
            out.at(i, j) = -q.at(i, j) * core.at(i, j);
    return out;
}

// Same right-hand side from the conservative display
//   u_t = -Q div( (1/Q)(I - grad u x grad u / Q^2) grad(QH) - (H^2 / 2Q) grad u ).
// An independent route used to cross-check rhs_geometric; agrees to O(h^2).
inline ScalarField rhs_divergence(const ScalarField& u) {
    const GridDomain& d = u.dom;
    const ScalarField ux = diff(u, 1, 0), uy = diff(u, 0, 1);
    const ScalarField H = mean_curvature(u);
    ScalarField G = ScalarField::undefined(d);
    for (int j = -d.ghost; j <= d.ny + 1 + d.ghost; ++j)
        for (int i = -d.ghost; i <= d.nx + 1 + d.ghost; ++i)
            G.at(i, j) = q_of(ux.at(i, j), uy.at(i, j)) * H.at(i, j);
    const ScalarField Gx = diff(G, 1, 0), Gy = diff(G, 0, 1);
    ScalarField P1 = ScalarField::undefined(d), P2 = ScalarField::undefined(d);
    for (int j = -d.ghost; j <= d.ny + 1 + d.ghost; ++j) {
        for (int i = -d.ghost; i <= d.nx + 1 + d.ghost; ++i) {
            const double px = ux.at(i, j), py = uy.at(i, j);
            const double q2 = 1.0 + (px * px + py * py);
            const double q = std::sqrt(q2);
            const double gx = Gx.at(i, j), gy = Gy.at(i, j);
            const double hh = H.at(i, j);
            const double hterm = hh * hh / (2.0 * q);
            P1.at(i, j) = ((1.0 - px * px / q2) * gx - (px * py / q2) * gy) / q - hterm * px;
            P2.at(i, j) = ((1.0 - py * py / q2) * gy - (px * py / q2) * gx) / q - hterm * py;
        }
    }
    const ScalarField dP1 = diff(P1, 1, 0), dP2 = diff(P2, 0, 1);
    ScalarField out = ScalarField::undefined(d);
    out.time = u.time;
    for (int j = 1; j <= d.ny; ++j) {
        for (int i = 1; i <= d.nx; ++i) {
            const double q = q_of(ux.at(i, j), uy.at(i, j));
            out.at(i, j) = -q * (dP1.at(i, j) + dP2.at(i, j));
        }
    }
    return out;
}

// R(u) := -rhs(u) - principal(u)u, the lower-order remainder of the frozen
// splitting. Defined as the literal difference so the three-way identity is
// exact in floating point.
inline ScalarField remainder(const ScalarField& u) {
    const ScalarField r = rhs_geometric(u);
    const ScalarField p = principal_apply(u, u);
    const GridDomain& d = u.dom;
    ScalarField out = ScalarField::undefined(d);
    out.time = u.time;
    for (int j = 1; j <= d.ny; ++j)
        for (int i = 1; i <= d.nx; ++i)
            out.at(i, j) = -r.at(i, j) - p.at(i, j);
    return out;
}

struct RhsBundle {
    ScalarField geometric, divergence, principal, remainder;
};

inline RhsBundle rhs_split(const ScalarField& u) {
    RhsBundle b{rhs_geometric(u), rhs_divergence(u), principal_apply(u, u),
                ScalarField::undefined(u.dom)};
    b.remainder.time = u.time;
    const GridDomain& d = u.dom;
    for (int j = 1; j <= d.ny; ++j)
        for (int i = 1; i <= d.nx; ++i)
            b.remainder.at(i, j) = -b.geometric.at(i, j) - b.principal.at(i, j);
    return b;
}

// The discrete linearization of -rhs at u = 0: the narrow five-point Laplacian
// followed by the wide one (each second difference there a composition of two
// centered first differences). Matching the nesting of the geometric assembly
// exactly is what makes rhs(eps u) + matched_biharmonic(eps u) = O(eps^3).
inline ScalarField matched_biharmonic(const ScalarField& u) {
    const GridDomain& d = u.dom;
    const ScalarField lxx = diff(u, 2, 0), lyy = diff(u, 0, 2);
    ScalarField lap = ScalarField::undefined(d);
    for (int j = -d.ghost; j <= d.ny + 1 + d.ghost; ++j)
        for (int i = -d.ghost; i <= d.nx + 1 + d.ghost; ++i)
            lap.at(i, j) = lxx.at(i, j) + lyy.at(i, j);
    const ScalarField wxx = diff(diff(lap, 1, 0), 1, 0);
    const ScalarField wyy = diff(diff(lap, 0, 1), 0, 1);
    ScalarField out = ScalarField::undefined(d);
    out.time = u.time;
    for (int j = 1; j <= d.ny; ++j)
        for (int i = 1; i <= d.nx; ++i)
            out.at(i, j) = wxx.at(i, j) + wyy.at(i, j);
    return out;
}

// Least-squares slope of log max|rhs(eps u) + B_h(eps u)| against log eps.
// Odd parity of the assembly kills the quadratic term, so the slope sits near
// 3 until roundoff takes over.
struct CubicCheck {
    std::vector<double> eps, residual;
    double slope = 0;
};

inline CubicCheck cubic_smallness_check(const ScalarField& u,
                                        const std::vector<double>& epsilons) {
    CubicCheck out;
    const GridDomain& d = u.dom;
    for (double e : epsilons) {
        ScalarField v = u;
        for (double& x : v.v) x *= e;
        const ScalarField r = rhs_geometric(v);
        const ScalarField b = matched_biharmonic(v);
        double m = 0;
        for (int j = 1; j <= d.ny; ++j)
            for (int i = 1; i <= d.nx; ++i)
                m = std::max(m, std::abs(r.at(i, j) + b.at(i, j)));
        out.eps.push_back(e);
        out.residual.push_back(m);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(out.eps.size());
    for (int k = 0; k < n; ++k) {
        const double lx = std::log(out.eps[k]);
        const double ly = std::log(std::max(out.residual[k], 1e-300));
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return out;
}

// ---------------------------------------------------------------------------
// Ellipticity certificate for the frozen symbol, sampled over directions.

inline std::vector<std::array<double, 2>> unit_directions(int n) {
    std::vector<std::array<double, 2>> xs;
    xs.reserve(n);
    const double pi = 3.14159265358979323846;
    for (int a = 0; a < n; ++a) {
        const double t = pi * a / n;
        xs.push_back({std::cos(t), std::sin(t)});
    }
    return xs;
}

struct EllipticityReport {
    double min_ratio = 0, max_ratio = 0;
    double lower_bound = 0, upper_bound = 4.0;
    long nodes = 0;
    bool ok = false;
};

// Samples the quartic form sum L_{kl} xi1^k xi2^l at every node where the
// coefficients are defined. The pinching interval [1/(1+sup|grad u|^2)^2, 4]
// is recovered from the coefficients themselves: sqrt(L40)+sqrt(L04) equals
// (2+|grad u|^2)/(1+|grad u|^2), which inverts to |grad u|^2.
inline EllipticityReport ellipticity_check(const PrincipalCoeffs& c,
                                           const std::vector<std::array<double, 2>>& xi_samples) {
    const GridDomain& d = c.L40.dom;
    EllipticityReport r;
    r.min_ratio = std::numeric_limits<double>::infinity();
    r.max_ratio = 0;
    double supg2 = 0;
    for (int j = -d.ghost; j <= d.ny + 1 + d.ghost; ++j) {
        for (int i = -d.ghost; i <= d.nx + 1 + d.ghost; ++i) {
            const double c40 = c.L40.at(i, j);
            if (!std::isfinite(c40)) continue;
            const double c31 = c.L31.at(i, j), c22 = c.L22.at(i, j);
            const double c13 = c.L13.at(i, j), c04 = c.L04.at(i, j);
            const double s = std::sqrt(c40) + std::sqrt(c04);
            supg2 = std::max(supg2, 1.0 / (s - 1.0) - 1.0);
            ++r.nodes;
            for (const auto& xi : xi_samples) {
                const double x1 = xi[0], x2 = xi[1];
                const double form = c40 * x1 * x1 * x1 * x1 + c31 * x1 * x1 * x1 * x2 +
                                    c22 * x1 * x1 * x2 * x2 + c13 * x1 * x2 * x2 * x2 +
                                    c04 * x2 * x2 * x2 * x2;
                r.min_ratio = std::min(r.min_ratio, form);
                r.max_ratio = std::max(r.max_ratio, form);
            }
        }
    }
    r.lower_bound = 1.0 / ((1.0 + supg2) * (1.0 + supg2));
    r.upper_bound = 4.0;
    r.ok = r.min_ratio >= r.lower_bound - 1e-10 && r.max_ratio <= r.upper_bound + 1e-10;
    return r;
}

inline EllipticityReport ellipticity_check(const ScalarField& u, int n_angles = 64) {
    return ellipticity_check(principal_coeffs(u), unit_directions(n_angles));
}

// ---------------------------------------------------------------------------
// Pointwise derivative magnitudes used in the remainder size bound
// |R| <= C ( |D3 u| |D2 u| + |D2 u|^3 ).

inline ScalarField hessian_magnitude(const ScalarField& u) {
    const ScalarField uxx = diff(u, 2, 0), uyy = diff(u, 0, 2), uxy = diff(u, 1, 1);
    const GridDomain& d = u.dom;
    ScalarField out = ScalarField::undefined(d);
    for (int j = -d.ghost; j <= d.ny + 1 + d.ghost; ++j)
        for (int i = -d.ghost; i <= d.nx + 1 + d.ghost; ++i) {
            const double a = uxx.at(i, j), b = uyy.at(i, j), c = uxy.at(i, j);
            out.at(i, j) = std::sqrt((a * a + b * b) + 2.0 * (c * c));
        }
    return out;
}

inline ScalarField third_magnitude(const ScalarField& u) {
    const ScalarField a = diff(u, 3, 0), b = diff(u, 0, 3);
    const ScalarField c = diff(u, 2, 1), e = diff(u, 1, 2);
    const GridDomain& d = u.dom;
    ScalarField out = ScalarField::undefined(d);
    for (int j = -d.ghost; j <= d.ny + 1 + d.ghost; ++j)
        for (int i = -d.ghost; i <= d.nx + 1 + d.ghost; ++i) {
            const double t1 = a.at(i, j), t2 = b.at(i, j);
            const double t3 = c.at(i, j), t4 = e.at(i, j);
            out.at(i, j) = std::sqrt((t1 * t1 + t2 * t2) + 3.0 * (t3 * t3 + t4 * t4));
        }
    return out;
}

// Smallest constant C with |remainder| <= C (|D3 u||D2 u| + |D2 u|^3) over the
// interior; the absolute floor keeps nodes where both sides vanish harmless.
inline double remainder_bound_ratio(const ScalarField& u, double floor_den = 1e-12) {
    const ScalarField r = remainder(u);
    const ScalarField h2 = hessian_magnitude(u);
    const ScalarField h3 = third_magnitude(u);
    const GridDomain& d = u.dom;
    double c = 0;
    for (int j = 1; j <= d.ny; ++j)
        for (int i = 1; i <= d.nx; ++i) {
            const double m2 = h2.at(i, j);
            const double den = h3.at(i, j) * m2 + m2 * m2 * m2 + floor_den;
            c = std::max(c, std::abs(r.at(i, j)) / den);
        }
    return c;
}

// ---------------------------------------------------------------------------
// Compatibility check including the fourth-order residual: the geometric
// right-hand side evaluated on the first interior ring, which must vanish for
// the initial slope of the flow to match the static boundary data.

inline CompatReport check_compatibility(const ScalarField& u0, const BoundaryData& bc,
                                        double tol, bool fourth_order) {
    CompatReport r = check_compatibility(u0, bc, tol);
    if (fourth_order) {
        const ScalarField ug = apply_clamped_ghosts(u0, bc);
        const ScalarField rhs = rhs_geometric(ug);
        const GridDomain& d = u0.dom;
        double m = 0;
        for (int j = 1; j <= d.ny; ++j)
            for (int i = 1; i <= d.nx; ++i)
                if (i == 1 || i == d.nx || j == 1 || j == d.ny)
                    m = std::max(m, std::abs(rhs.at(i, j)));
        r.fourth_order_residual = m;
    }
    return r;
}

} // namespace wgf
