#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "wgf/fit.hpp"
#include "wgf/flow.hpp"
#include "wgf/geometry.hpp"

// Discrete counterparts of the analytic a-priori machinery: the explicit
// sup/area bound, the L2 smallness probe, weighted anisotropic Holder norms
// over trajectories, blow-up rate fits, and interpolation inequality checks.
// All estimators are lower bounds of their continuum versions (node pairs at
// dyadic separations, sampled times), so inequality checks against them use
// empirically fitted constants.

namespace wgf {

// ---------------------------------------------------------------------------
// Discrete spatial Holder machinery.

// max over covered node pairs at dyadic axis separations (h, 2h, 4h, ...) of
// |f(p) - f(q)| / |p - q|^sigma.
inline double holder_seminorm(const ScalarField& f, double sigma) {
    const GridDomain& d = f.dom;
    if (!(sigma > 0) || sigma > 1)
        throw ConfigError("holder_seminorm: exponent must lie in (0, 1]");
    double best = 0;
    const int maxsep = std::max(d.nx, d.ny) + 1;
    for (int sep = 1; sep <= maxsep; sep *= 2) {
        const double w = std::pow(sep * d.h, -sigma);
        for (int j = 0; j <= d.ny + 1; ++j) {
            for (int i = 0; i <= d.nx + 1; ++i) {
                const double a = f.at(i, j);
                if (!std::isfinite(a)) continue;
                if (i + sep <= d.nx + 1) {
                    const double b = f.at(i + sep, j);
                    if (std::isfinite(b)) best = std::max(best, std::abs(b - a) * w);
                }
                if (j + sep <= d.ny + 1) {
                    const double b = f.at(i, j + sep);
                    if (std::isfinite(b)) best = std::max(best, std::abs(b - a) * w);
                }
            }
        }
    }
    return best;
}

namespace detail {

inline ScalarField deriv_field(const ScalarField& u, int bx, int by) {
    if (bx == 0 && by == 0) return u;
    return diff(u, bx, by);
}

inline double max_node(const ScalarField& f) {
    double m = 0;
    for (int j = 0; j <= f.dom.ny + 1; ++j)
        for (int i = 0; i <= f.dom.nx + 1; ++i) {
            const double a = f.at(i, j);
            if (std::isfinite(a)) m = std::max(m, std::abs(a));
        }
    return m;
}

// Multi-indices (bx, by) grouped by order; start offsets {0, 1, 3, 6, 10}.
inline constexpr int kSpIdx[15][2] = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1},
                                      {0, 2}, {3, 0}, {2, 1}, {1, 2}, {0, 3},
                                      {4, 0}, {3, 1}, {2, 2}, {1, 3}, {0, 4}};

inline int order_start(int o) {
    static constexpr int s[5] = {0, 1, 3, 6, 10};
    return s[o];
}

} // namespace detail

// Discrete C^r norm of a single field, r = m + sigma: sum of the sups of all
// derivatives through order m plus, for fractional r, the Holder seminorms of
// the order-m derivatives.
inline double holder_norm(const ScalarField& u, double r) {
    if (r < 0) throw ConfigError("holder_norm: negative order");
    const int m = static_cast<int>(std::floor(r + 1e-12));
    const double sigma = r - m;
    if (m > 4) throw ConfigError("holder_norm: order above the available derivative bank");
    double out = 0;
    std::vector<ScalarField> top;
    for (int o = 0; o <= m; ++o) {
        for (int c = 0; c <= o; ++c) {
            const int idx = detail::order_start(o) + c;
            ScalarField f = detail::deriv_field(u, detail::kSpIdx[idx][0],
                                                detail::kSpIdx[idx][1]);
            out += detail::max_node(f);
            if (o == m) top.push_back(std::move(f));
        }
    }
    if (sigma > 1e-12)
        for (const ScalarField& f : top) out += holder_seminorm(f, sigma);
    return out;
}

// ---------------------------------------------------------------------------
// Boundary trace quantities of the clamped height data.

namespace detail {

// Visit the four boundary edges as (g0 array, length) walks; the loop is
// closed because corner nodes are shared between adjacent edges.
template <class F>
inline void for_each_edge(const BoundaryData& bc, const GridDomain& d, F&& f) {
    f(bc.bottom.g0, d.nx + 2);
    f(bc.right.g0, d.ny + 2);
    f(bc.top.g0, d.nx + 2);
    f(bc.left.g0, d.ny + 2);
}

} // namespace detail

// int |g0| ds over the boundary loop (composite trapezoid; corner halves from
// the two adjacent edges add to full weight).
inline double boundary_l1(const BoundaryData& bc, const GridDomain& d) {
    double s = 0;
    detail::for_each_edge(bc, d, [&](const std::vector<double>& g, int n) {
        double e = 0.5 * (std::abs(g[0]) + std::abs(g[n - 1]));
        for (int i = 1; i + 1 < n; ++i) e += std::abs(g[i]);
        s += e * d.h;
    });
    return s;
}

// Total variation of g0 around the boundary loop: the L1 norm of the
// arclength derivative of the piecewise-linear trace.
inline double boundary_total_variation(const BoundaryData& bc, const GridDomain& d) {
    double s = 0;
    detail::for_each_edge(bc, d, [&](const std::vector<double>& g, int n) {
        for (int i = 0; i + 1 < n; ++i) s += std::abs(g[i + 1] - g[i]);
    });
    return s;
}

// ---------------------------------------------------------------------------
// Explicit a-priori bound: sup|u| + int Q against the closed-form right side
// 64 (|Omega| + |dOmega| + ||phi||_W11 + (16^2/pi^2) W) (1 + |Omega| W).

struct AprioriReport {
    double lhs = 0, rhs = 0;
    double sup_u = 0, area_integral = 0, energy = 0;
    double phi_w11 = 0, domain_area = 0, perimeter = 0;
    bool pass = false;
};

inline AprioriReport apriori_bound(const ScalarField& u, const BoundaryData& bc) {
    const GridDomain& d = u.dom;
    AprioriReport r;
    r.sup_u = max_abs_covered(u);
    r.area_integral = surface_area(u);
    r.energy = willmore_energy(u);
    r.phi_w11 = boundary_l1(bc, d) + boundary_total_variation(bc, d);
    r.domain_area = d.area();
    r.perimeter = d.perimeter();
    r.lhs = r.sup_u + r.area_integral;
    const double pi = 3.14159265358979323846;
    r.rhs = 64.0 *
            (r.domain_area + r.perimeter + r.phi_w11 + (256.0 / (pi * pi)) * r.energy) *
            (1.0 + r.domain_area * r.energy);
    r.pass = r.lhs <= r.rhs * (1 + 1e-12);
    return r;
}

// ---------------------------------------------------------------------------
// L2 smallness probe: delta = W(u) + ||g0||_L1 against ||u||_L2 over a family,
// applicable while the boundary derivative stays under the configured K and
// delta actually approaches zero.

struct L2SmallnessEntry {
    double delta = 0, l2 = 0, deriv_l1 = 0;
};

struct L2SmallnessReport {
    std::vector<L2SmallnessEntry> entries;
    bool skipped = false;
    std::string skip_reason;
    double slope = 0;
    bool pass = false;
};

inline L2SmallnessReport l2_smallness_probe(
    const std::vector<std::pair<ScalarField, BoundaryData>>& family, double K = 10.0) {
    L2SmallnessReport out;
    for (const auto& [u, bc] : family) {
        L2SmallnessEntry e;
        e.delta = willmore_energy(u) + boundary_l1(bc, u.dom);
        e.l2 = l2_norm(u);
        e.deriv_l1 = boundary_total_variation(bc, u.dom);
        out.entries.push_back(e);
    }
    if (out.entries.size() < 2) {
        out.skipped = true;
        out.skip_reason = "family too small";
        return out;
    }
    double dmin = std::numeric_limits<double>::infinity(), dmax = 0, lmax = 0;
    for (const L2SmallnessEntry& e : out.entries) {
        dmin = std::min(dmin, e.delta);
        dmax = std::max(dmax, e.delta);
        lmax = std::max(lmax, e.l2);
        if (!(e.deriv_l1 < K)) {
            out.skipped = true;
            out.skip_reason = "boundary derivative L1 norm " + std::to_string(e.deriv_l1) +
                              " violates the K hypothesis (K=" + std::to_string(K) + ")";
            return out;
        }
    }
    if (dmax < 1e-14 && lmax < 1e-14) {
        out.pass = true; // all-zero family: delta and the L2 norms vanish together
        return out;
    }
    if (dmin > 0.25 * dmax) {
        out.skipped = true;
        out.skip_reason = "delta stays bounded away from zero (min " + std::to_string(dmin) +
                          ", max " + std::to_string(dmax) + "); no smallness regime to probe";
        return out;
    }
    std::vector<double> xs, ys;
    for (const L2SmallnessEntry& e : out.entries)
        if (e.delta > 0 && e.l2 > 0) {
            xs.push_back(e.delta);
            ys.push_back(e.l2);
        }
    if (xs.size() < 2) {
        out.skipped = true;
        out.skip_reason = "not enough nonzero samples for a slope";
        return out;
    }
    out.slope = fit_loglog(xs, ys).slope;
    out.pass = out.slope > 0;
    return out;
}

// ---------------------------------------------------------------------------
// Weighted anisotropic Holder estimators over trajectories. The derivative
// bank holds the spatial derivatives through order four of every snapshot and
// the differenced time derivative of consecutive snapshot pairs at midpoint
// times; that is exactly the derivative set {(k=0, |b|<=4), (k=1, b=0)} the
// order-(4+alpha) norms need.

struct WeightedNormSpec {
    double ell = 0;   // total order, 4 + alpha
    double s = 0;     // weight parameter, 0 <= s <= ell
    double alpha = 0; // Holder exponent in (0, 1)
};

namespace detail {

struct TrajBank {
    GridDomain dom;
    std::vector<double> t;                       // snapshot times
    std::vector<std::array<ScalarField, 15>> sp; // spatial derivatives
    std::vector<double> td;                      // midpoint times
    std::vector<ScalarField> ut;                 // differenced du/dt
    double T() const { return t.back(); }
};

inline TrajBank build_bank(const Trajectory& traj) {
    if (traj.snapshots.size() < 2)
        throw EstimatorError("norm estimation needs at least 2 snapshots, have " +
                             std::to_string(traj.snapshots.size()));
    TrajBank b;
    b.dom = traj.snapshots.front().dom;
    for (const ScalarField& s : traj.snapshots) {
        if (!b.t.empty() && !(s.time > b.t.back()))
            throw EstimatorError("snapshot times must be strictly increasing");
        b.t.push_back(s.time);
        std::array<ScalarField, 15> dv{
            deriv_field(s, 0, 0), deriv_field(s, 1, 0), deriv_field(s, 0, 1),
            deriv_field(s, 2, 0), deriv_field(s, 1, 1), deriv_field(s, 0, 2),
            deriv_field(s, 3, 0), deriv_field(s, 2, 1), deriv_field(s, 1, 2),
            deriv_field(s, 0, 3), deriv_field(s, 4, 0), deriv_field(s, 3, 1),
            deriv_field(s, 2, 2), deriv_field(s, 1, 3), deriv_field(s, 0, 4)};
        b.sp.push_back(std::move(dv));
    }
    const GridDomain& d = b.dom;
    for (std::size_t k = 0; k + 1 < b.t.size(); ++k) {
        const double dt = b.t[k + 1] - b.t[k];
        ScalarField v = ScalarField::undefined(d);
        for (int j = -d.ghost; j <= d.ny + 1 + d.ghost; ++j)
            for (int i = -d.ghost; i <= d.nx + 1 + d.ghost; ++i)
                v.at(i, j) = (traj.snapshots[k + 1].at(i, j) - traj.snapshots[k].at(i, j)) / dt;
        v.time = 0.5 * (b.t[k] + b.t[k + 1]);
        b.td.push_back(v.time);
        b.ut.push_back(std::move(v));
    }
    return b;
}

// max over sample pairs of maxnode |f_b - f_a| / (t_b - t_a)^tau.
inline double temporal_holder(const TrajBank& bank, const std::vector<int>& snaps, int sp_idx,
                              const std::vector<int>& dts, double tau) {
    const GridDomain& d = bank.dom;
    auto field = [&](int pos) -> const ScalarField& {
        return sp_idx >= 0 ? bank.sp[snaps[pos]][sp_idx] : bank.ut[dts[pos]];
    };
    auto when = [&](int pos) { return sp_idx >= 0 ? bank.t[snaps[pos]] : bank.td[dts[pos]]; };
    const int n = sp_idx >= 0 ? static_cast<int>(snaps.size()) : static_cast<int>(dts.size());
    double best = 0;
    for (int a = 0; a < n; ++a) {
        for (int bpos = a + 1; bpos < n; ++bpos) {
            const double gap = when(bpos) - when(a);
            if (!(gap > 0)) continue;
            const ScalarField& fa = field(a);
            const ScalarField& fb = field(bpos);
            double m = 0;
            for (int j = 0; j <= d.ny + 1; ++j)
                for (int i = 0; i <= d.nx + 1; ++i) {
                    const double x = fa.at(i, j), y = fb.at(i, j);
                    if (std::isfinite(x) && std::isfinite(y))
                        m = std::max(m, std::abs(y - x));
                }
            best = std::max(best, m * std::pow(gap, -tau));
        }
    }
    return best;
}

inline std::vector<int> all_indices(int n) {
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) v[i] = i;
    return v;
}

// The top-order seminorm of a time window: spatial Holder of everything at
// parabolic order 4 plus the fractional temporal Holder of orders 1..4.
inline double window_bracket(const TrajBank& bank, const std::vector<int>& snaps,
                             const std::vector<int>& dts, double alpha) {
    double out = 0;
    for (int c = 0; c <= 4; ++c) {
        const int idx = order_start(4) + c;
        double best = 0;
        for (int k : snaps) best = std::max(best, holder_seminorm(bank.sp[k][idx], alpha));
        out += best;
    }
    {
        double best = 0;
        for (int k : dts) best = std::max(best, holder_seminorm(bank.ut[k], alpha));
        out += best;
    }
    const double ell = 4 + alpha;
    for (int o = 1; o <= 4; ++o) {
        const double tau = (ell - o) / 4.0;
        for (int c = 0; c <= o; ++c)
            out += temporal_holder(bank, snaps, order_start(o) + c, {}, tau);
    }
    out += temporal_holder(bank, {}, -1, dts, alpha / 4.0);
    return out;
}

struct NormWindow {
    double t = 0;
    std::vector<int> snaps, dts;
};

// Windows [t/2, t] anchored at the sampled times themselves (so truncating a
// trajectory only removes windows, keeping the estimator monotone in T). A
// window needs four samples, which caps the anchor times at 8x the first
// positive sample.
inline std::vector<NormWindow> retained_windows(const TrajBank& bank) {
    double t_first = 0;
    for (double t : bank.t)
        if (t > 0) {
            t_first = t;
            break;
        }
    if (!(t_first > 0)) throw EstimatorError("weighted norm: no positive-time samples");
    const double T = bank.T();
    const double eps = 1e-12 * T;
    std::vector<NormWindow> ws;
    for (std::size_t k = 0; k < bank.t.size(); ++k) {
        const double tk = bank.t[k];
        if (tk < 8 * t_first - eps) continue;
        NormWindow w;
        w.t = tk;
        for (std::size_t j = 0; j < bank.t.size(); ++j)
            if (bank.t[j] > 0 && bank.t[j] >= tk / 2 - eps && bank.t[j] <= tk + eps)
                w.snaps.push_back(static_cast<int>(j));
        for (std::size_t j = 0; j < bank.td.size(); ++j)
            if (bank.td[j] >= tk / 2 - eps && bank.td[j] <= tk + eps)
                w.dts.push_back(static_cast<int>(j));
        if (w.snaps.size() < 4)
            throw EstimatorError("weighted norm: window [t/2, t] at t=" + std::to_string(tk) +
                                 " holds only " + std::to_string(w.snaps.size()) +
                                 " samples (need 4)");
        ws.push_back(std::move(w));
    }
    if (ws.empty())
        throw EstimatorError("weighted norm: no retained window (span below 8x the first sample)");
    return ws;
}

// Unweighted anisotropic norm over all samples: sups through order floor(s),
// the fractional spatial Holder at the top retained order, and the temporal
// Holder seminorms of parabolic orders in (s-4, s).
inline double unweighted_norm(const TrajBank& bank, double s) {
    if (s < 0) return 0;
    const int m = static_cast<int>(std::floor(s + 1e-12));
    const double sigma = s - m;
    if (m > 4) throw ConfigError("unweighted norm: order above the derivative bank");
    const std::vector<int> snaps = all_indices(static_cast<int>(bank.t.size()));
    const std::vector<int> dts = all_indices(static_cast<int>(bank.td.size()));
    double out = 0;
    for (int o = 0; o <= m; ++o)
        for (int c = 0; c <= o; ++c) {
            double best = 0;
            for (int k : snaps) best = std::max(best, max_node(bank.sp[k][order_start(o) + c]));
            out += best;
        }
    if (m == 4) {
        double best = 0;
        for (int k : dts) best = std::max(best, max_node(bank.ut[k]));
        out += best;
    }
    if (sigma > 1e-12) {
        for (int c = 0; c <= m; ++c) {
            double best = 0;
            for (int k : snaps)
                best = std::max(best, holder_seminorm(bank.sp[k][order_start(m) + c], sigma));
            out += best;
        }
        if (m == 4) {
            double best = 0;
            for (int k : dts) best = std::max(best, holder_seminorm(bank.ut[k], sigma));
            out += best;
        }
    }
    for (int o = 0; o <= 4; ++o) {
        if (!(o > s - 4 + 1e-9) || !(o < s - 1e-9)) continue;
        const double tau = (s - o) / 4.0;
        for (int c = 0; c <= o; ++c)
            out += temporal_holder(bank, snaps, order_start(o) + c, {}, tau);
    }
    if (s > 4 + 1e-9) out += temporal_holder(bank, {}, -1, dts, (s - 4) / 4.0);
    return out;
}

} // namespace detail

inline void validate(const WeightedNormSpec& spec) {
    if (!(spec.alpha > 0 && spec.alpha < 1))
        throw ConfigError("weighted norm: alpha must lie in (0, 1)");
    if (std::abs(spec.ell - 4 - spec.alpha) > 1e-9)
        throw ConfigError("weighted norm: total order must equal 4 + alpha");
    if (!(spec.s >= 0 && spec.s <= spec.ell + 1e-12))
        throw ConfigError("weighted norm: weight parameter must lie in [0, ell]");
}

inline double weighted_norm_estimate(const Trajectory& traj, const WeightedNormSpec& spec) {
    validate(spec);
    const detail::TrajBank bank = detail::build_bank(traj);
    const std::vector<detail::NormWindow> ws = detail::retained_windows(bank);

    double top = 0;
    for (const detail::NormWindow& w : ws)
        top = std::max(top, std::pow(w.t, (spec.ell - spec.s) / 4.0) *
                                detail::window_bracket(bank, w.snaps, w.dts, spec.alpha));

    double middle = 0;
    for (int o = 0; o <= 4; ++o) {
        if (!(o > spec.s + 1e-9) || !(o < spec.ell - 1e-9)) continue;
        for (int c = 0; c <= o; ++c) {
            double best = 0;
            for (std::size_t k = 0; k < bank.t.size(); ++k) {
                if (!(bank.t[k] > 0)) continue;
                best = std::max(best, std::pow(bank.t[k], (o - spec.s) / 4.0) *
                                          detail::max_node(bank.sp[k][detail::order_start(o) + c]));
            }
            middle += best;
        }
    }
    if (4 > spec.s + 1e-9) {
        double best = 0;
        for (std::size_t k = 0; k < bank.td.size(); ++k)
            best = std::max(best, std::pow(bank.td[k], (4 - spec.s) / 4.0) *
                                      detail::max_node(bank.ut[k]));
        middle += best;
    }

    const double low = detail::unweighted_norm(bank, spec.s);
    return top + middle + low;
}

// The unweighted anisotropic norm C^{s, s/4} over the whole sampled cylinder;
// with s = 4 + alpha this is the full-order norm the weighted spaces embed
// into for T <= 1.
inline double unweighted_norm_estimate(const Trajectory& traj, double s) {
    return detail::unweighted_norm(detail::build_bank(traj), s);
}

// Nodewise product of two sampled trajectories (for the product-estimate
// property); snapshot times must agree.
inline Trajectory product_trajectory(const Trajectory& a, const Trajectory& b) {
    if (a.snapshots.size() != b.snapshots.size())
        throw EstimatorError("product_trajectory: snapshot counts differ");
    Trajectory out;
    for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
        const ScalarField& x = a.snapshots[k];
        const ScalarField& y = b.snapshots[k];
        require_same_domain(x, y, "product_trajectory");
        if (std::abs(x.time - y.time) > 1e-12 * std::max(1.0, std::abs(x.time)))
            throw EstimatorError("product_trajectory: snapshot times differ");
        ScalarField p = ScalarField::undefined(x.dom);
        p.time = x.time;
        for (std::size_t q = 0; q < p.v.size(); ++q) p.v[q] = x.v[q] * y.v[q];
        out.snapshots.push_back(std::move(p));
    }
    if (!out.snapshots.empty()) {
        out.final_state = out.snapshots.back();
        out.t_final = out.snapshots.back().time;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Blow-up rate fit: log-log slope of the max-node derivative magnitude over
// the post-initial window t in (0, T/4].

struct BlowupFit {
    double slope = 0;
    double theory = 0; // -(4k + |beta| - s) / 4
    int n_samples = 0;
    bool valid = false;
    std::string note;
};

inline BlowupFit blowup_rate_fit(const Trajectory& traj, int k, int bx, int by, double s) {
    if (k < 0 || k > 1 || bx < 0 || by < 0 || (k == 1 && bx + by > 0) || bx + by > 4)
        throw ConfigError("blowup_rate_fit: unsupported derivative index");
    if (traj.snapshots.size() < 2) throw EstimatorError("blowup_rate_fit: need snapshots");
    const double T = traj.snapshots.back().time;
    std::vector<double> ts, ys;
    if (k == 0) {
        for (const ScalarField& f : traj.snapshots) {
            if (!(f.time > 0) || f.time > T / 4) continue;
            ts.push_back(f.time);
            ys.push_back(detail::max_node(detail::deriv_field(f, bx, by)));
        }
    } else {
        const detail::TrajBank bank = detail::build_bank(traj);
        for (std::size_t q = 0; q < bank.td.size(); ++q) {
            if (!(bank.td[q] > 0) || bank.td[q] > T / 4) continue;
            ts.push_back(bank.td[q]);
            ys.push_back(detail::max_node(bank.ut[q]));
        }
    }
    if (ts.size() < 8)
        throw EstimatorError("blowup_rate_fit: window (0, T/4] holds only " +
                             std::to_string(ts.size()) + " samples (need 8)");
    BlowupFit out;
    out.theory = -(4.0 * k + bx + by - s) / 4.0;
    std::vector<double> fx, fy;
    for (std::size_t q = 0; q < ts.size(); ++q)
        if (ys[q] > 1e-300) {
            fx.push_back(ts[q]);
            fy.push_back(ys[q]);
        }
    out.n_samples = static_cast<int>(fx.size());
    if (fx.size() < 2) {
        out.note = "derivative vanishes on the window; slope undefined";
        return out;
    }
    out.slope = fit_loglog(fx, fy).slope;
    out.valid = true;
    return out;
}

// ---------------------------------------------------------------------------
// Interpolation inequality checks on a single field. The convexity route
// compares ||u||_{C^mid} against ||u||_{C^a}^lambda ||u||_{C^b}^(1-lambda);
// when a is an integer order and b = a + alpha, the L2 route compares
// ||u||_{C^a} against ||u||_{C^b}^(1-theta) ||u||_{L2}^theta with
// theta = 2(b - a) / (4 + 2b).

struct InterpolationReport {
    double a = 0, b = 0, lambda = 0, mid = 0;
    double norm_a = 0, norm_b = 0, norm_mid = 0, l2 = 0;
    double ratio = 0;
    double theta = 0, ratio_l2 = 0;
    bool l2_applicable = false;
};

inline InterpolationReport interpolation_check(const ScalarField& u, double a, double b,
                                               double lambda) {
    if (!(a >= 0 && a <= b)) throw ConfigError("interpolation_check: need 0 <= a <= b");
    if (!(lambda > 0 && lambda < 1))
        throw ConfigError("interpolation_check: lambda must lie in (0, 1)");
    InterpolationReport r;
    r.a = a;
    r.b = b;
    r.lambda = lambda;
    r.mid = lambda * a + (1 - lambda) * b;
    r.norm_a = holder_norm(u, a);
    r.norm_b = holder_norm(u, b);
    r.norm_mid = holder_norm(u, r.mid);
    r.l2 = l2_norm(u);
    const double den = std::pow(r.norm_a, lambda) * std::pow(r.norm_b, 1 - lambda);
    r.ratio = den > 0 ? r.norm_mid / den : 0;
    const double frac = b - a;
    if (std::abs(a - std::round(a)) < 1e-9 && frac > 1e-9 && frac < 1 - 1e-9) {
        r.l2_applicable = true;
        r.theta = 2 * frac / (4 + 2 * b);
        const double den2 = std::pow(r.norm_b, 1 - r.theta) * std::pow(r.l2, r.theta);
        r.ratio_l2 = den2 > 0 ? r.norm_a / den2 : 0;
    }
    return r;
}

} // namespace wgf
