#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "wgf/fit.hpp"
#include "wgf/rhs.hpp"

// Time integration of u_t = rhs(u) under clamped boundary data.
//
// Two steppers: forward Euler on the full geometric right-hand side, and the
// linearly implicit scheme that freezes the gradient in the principal part,
//   (I + dt L(grad u^n)) u^{n+1} = u^n - dt R(u^n),
// treating the exact remainder explicitly. The implicit matrix reaches at
// most one node beyond the boundary (stencil offsets stay within 2), so the
// first ghost layer's mirror rule is eliminated algebraically and only
// interior unknowns are solved for.

namespace wgf {

enum class Scheme { Explicit, Frozen };
enum class DtPolicy { Fixed, Cfl };
enum class StopReason { ReachedTEnd, Stationary, MaxSteps };

struct FlowConfig {
    Scheme scheme = Scheme::Explicit;
    DtPolicy dt_policy = DtPolicy::Cfl;
    double dt = 0;      // step size under Fixed
    double cfl_c = 0.5; // safety factor under Cfl, in (0, 1]
    double t_end = 1.0;
    long max_steps = 1000000;
    double stationary_tol = 1e-8; // per unit area; 0 disables the check
    int diag_every = 1;
    int snapshot_every = 0;          // >0: keep a snapshot every so many steps
    bool snapshot_geometric = false; // snapshots at steps round(2^(j/4))
    double cc_tol = 1e-8;
    bool require_compat = true;
    double blowup_sup = 1e6;
};

struct DiagRecord {
    double t, W, sup_u, sup_grad_u, l2_u, area, dWdt, dissipation_rhs, dt;
};

struct FlowState {
    ScalarField u; // ghosted
    double t = 0;
    long step = 0;
    ScalarField last_rhs; // effective velocity over the step that produced u
};

struct Trajectory {
    std::vector<DiagRecord> diag;
    std::vector<ScalarField> snapshots; // ghosted states, time set
    ScalarField final_state;
    long steps = 0;
    double t_final = 0;
    StopReason reason = StopReason::ReachedTEnd;
    std::string compat_note; // nonempty if the fourth-order residual was large
};

// Blow-up during time stepping; carries the last finite state and the
// diagnostics accumulated up to the failure time.
struct FlowBlowUp : BlowUpError {
    FlowState last;
    std::vector<DiagRecord> diag;
    FlowBlowUp(const std::string& msg, FlowState last_state)
        : BlowUpError(msg, last_state.t, last_state.step), last(std::move(last_state)) {}
};

inline double cfl_dt(const GridDomain& d, double c = 0.5) {
    const double h4 = d.h * d.h * d.h * d.h;
    return c * h4 / 64.0;
}

// Instantaneous dissipation functional -1/2 int |u_t|^2 / Q dA with the
// velocity taken from the geometric right-hand side (zero on the boundary).
inline double dissipation_rate(const ScalarField& u) {
    const ScalarField v = rhs_geometric(u);
    const ScalarField q = area_element(u);
    const GridDomain& d = u.dom;
    return -0.5 * trapezoid_nodes(d, [&](int i, int j) {
        if (i < 1 || i > d.nx || j < 1 || j > d.ny) return 0.0;
        const double w = v.at(i, j);
        return w * w / q.at(i, j);
    });
}

inline ScalarField step_explicit(const ScalarField& u, const BoundaryData& bc, double dt) {
    // canonicalize the margin first so a caller's ghost values (analytic,
    // stale, or unset) cannot leak into the velocity; no-op for states the
    // driver hands around, which are already clamped
    const ScalarField uc = apply_clamped_ghosts(u, bc);
    const ScalarField b = rhs_geometric(uc);
    const GridDomain& d = u.dom;
    ScalarField unew = ScalarField::undefined(d);
    for (int j = 1; j <= d.ny; ++j)
        for (int i = 1; i <= d.nx; ++i)
            unew.at(i, j) = uc.at(i, j) + dt * b.at(i, j);
    unew = apply_clamped_ghosts(unew, bc);
    unew.time = u.time + dt;
    return unew;
}

namespace detail {

// One implicit solve of (I + dt L(grad un)) u = rhs_vec with the first ghost
// layer eliminated through the mirror rule. Returns the interior solution.
struct FrozenOperator {
    const GridDomain* dom = nullptr;
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd bc_shift; // constant contributions moved to the right side

    int id(int i, int j) const { return (j - 1) * dom->nx + (i - 1); }

    void assemble(const ScalarField& un, const BoundaryData& bc, double dt) {
        const GridDomain& d = un.dom;
        dom = &d;
        const int N = d.nx * d.ny;
        const ScalarField ux = diff(un, 1, 0), uy = diff(un, 0, 1);
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(size_t(N) * 49);
        bc_shift = Eigen::VectorXd::Zero(N);

        // Resolve a stencil target: interior couples, boundary nodes and the
        // mirror rule's slope term land in bc_shift. First-layer ghosts fold
        // back by the mirror rule along exactly one axis.
        auto add1 = [&](int row, int i, int j, double w) {
            double cst = 0;
            if (i == -1) { cst += 2 * d.h * bc.left.g1[j]; i = 1; }
            else if (i == d.nx + 2) { cst += 2 * d.h * bc.right.g1[j]; i = d.nx; }
            else if (j == -1) { cst += 2 * d.h * bc.bottom.g1[i]; j = 1; }
            else if (j == d.ny + 2) { cst += 2 * d.h * bc.top.g1[i]; j = d.ny; }
            if (i == 0) cst += bc.left.g0[j];
            else if (i == d.nx + 1) cst += bc.right.g0[j];
            else if (j == 0) cst += bc.bottom.g0[i];
            else if (j == d.ny + 1) cst += bc.top.g0[i];
            else trip.emplace_back(row, id(i, j), w);
            bc_shift[row] -= w * cst;
        };
        // The nested fourth-difference factor reaches one node into the
        // second ghost layer (other axis stays put, so the cross index is
        // interior). Unfold it through the same quartic extrapolation
        // apply_clamped_ghosts uses: with s = -h g1 and b_k = u_k - g0 - k s,
        //   ghost2 = g0 - 2 s + 40 b1 - 15 b2 + (8/3) b3
        //          = 40 u1 - 15 u2 + (8/3) u3 - (80/3) g0 + 20 h g1.
        auto add = [&](int row, int i, int j, double w) {
            const double cg = -80.0 / 3.0, cs = 20.0 * d.h, c3 = 8.0 / 3.0;
            if (i == -2) {
                bc_shift[row] -= w * (cg * bc.left.g0[j] + cs * bc.left.g1[j]);
                add1(row, 1, j, 40.0 * w);
                add1(row, 2, j, -15.0 * w);
                add1(row, 3, j, c3 * w);
            } else if (i == d.nx + 3) {
                bc_shift[row] -= w * (cg * bc.right.g0[j] + cs * bc.right.g1[j]);
                add1(row, d.nx, j, 40.0 * w);
                add1(row, d.nx - 1, j, -15.0 * w);
                add1(row, d.nx - 2, j, c3 * w);
            } else if (j == -2) {
                bc_shift[row] -= w * (cg * bc.bottom.g0[i] + cs * bc.bottom.g1[i]);
                add1(row, i, 1, 40.0 * w);
                add1(row, i, 2, -15.0 * w);
                add1(row, i, 3, c3 * w);
            } else if (j == d.ny + 3) {
                bc_shift[row] -= w * (cg * bc.top.g0[i] + cs * bc.top.g1[i]);
                add1(row, i, d.ny, 40.0 * w);
                add1(row, i, d.ny - 1, -15.0 * w);
                add1(row, i, d.ny - 2, c3 * w);
            } else {
                add1(row, i, j, w);
            }
        };

        // One-dimensional factors mirroring principal_apply's nesting: the
        // pure fourth difference is narrow-second composed with two centered
        // firsts, the mixed second derivative symmetrizes wide x narrow over
        // the two axes, and the odd orders keep the classical products.
        struct Fac {
            int n;
            int off[7];
            double w[7];
        };
        const double h2 = d.h * d.h, h4 = h2 * h2;
        const Fac f4 = {7,
                        {-3, -2, -1, 0, 1, 2, 3},
                        {0.25 / h4, -0.5 / h4, -0.25 / h4, 1.0 / h4,
                         -0.25 / h4, -0.5 / h4, 0.25 / h4}};
        const Fac fw = {3, {-2, 0, 2}, {0.25 / h2, -0.5 / h2, 0.25 / h2}};
        const Fac fn = {3, {-1, 0, 1}, {1.0 / h2, -2.0 / h2, 1.0 / h2}};
        const Stencil1D st3 = stencil_1d(3, d.h), st1 = stencil_1d(1, d.h);
        Fac f3{}, f1{}, f0 = {1, {0}, {1.0}};
        f3.n = st3.n;
        f1.n = st1.n;
        for (int a = 0; a < st3.n; ++a) { f3.off[a] = st3.off[a]; f3.w[a] = st3.w[a]; }
        for (int a = 0; a < st1.n; ++a) { f1.off[a] = st1.off[a]; f1.w[a] = st1.w[a]; }

        struct Term {
            const Fac* x;
            const Fac* y;
            int c;
            double scale;
        };
        const Term terms[6] = {{&f4, &f0, 0, 1.0}, {&f3, &f1, 1, 1.0},
                               {&fw, &fn, 2, 0.5}, {&fn, &fw, 2, 0.5},
                               {&f1, &f3, 3, 1.0}, {&f0, &f4, 4, 1.0}};

        for (int j = 1; j <= d.ny; ++j) {
            for (int i = 1; i <= d.nx; ++i) {
                const int row = id(i, j);
                trip.emplace_back(row, row, 1.0);
                const detail::CoeffsAt pc =
                    detail::principal_coeffs_at(ux.at(i, j), uy.at(i, j));
                const double cs5[5] = {pc.c40, pc.c31, pc.c22, pc.c13, pc.c04};
                for (const Term& t : terms)
                    for (int b = 0; b < t.y->n; ++b)
                        for (int a = 0; a < t.x->n; ++a)
                            add(row, i + t.x->off[a], j + t.y->off[b],
                                dt * t.scale * cs5[t.c] * t.x->w[a] * t.y->w[b]);
            }
        }
        A.resize(N, N);
        A.setFromTriplets(trip.begin(), trip.end());
    }
};

} // namespace detail

inline ScalarField step_frozen(const ScalarField& u, const BoundaryData& bc, double dt) {
    const GridDomain& d = u.dom;
    // the matrix eliminates ghosts through the clamped rule, so the frozen
    // coefficients and the remainder must see the same margin
    const ScalarField uc = apply_clamped_ghosts(u, bc);
    const ScalarField rem = remainder(uc);
    detail::FrozenOperator op;
    op.assemble(uc, bc, dt);

    const int N = d.nx * d.ny;
    Eigen::VectorXd rhs(N);
    for (int j = 1; j <= d.ny; ++j)
        for (int i = 1; i <= d.nx; ++i)
            rhs[op.id(i, j)] = uc.at(i, j) - dt * rem.at(i, j);
    rhs += op.bc_shift;

    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
    solver.compute(op.A);
    if (solver.info() != Eigen::Success)
        throw NumericalError("step_frozen: sparse LU factorization failed");
    Eigen::VectorXd x = solver.solve(rhs);
    if (solver.info() != Eigen::Success)
        throw NumericalError("step_frozen: sparse solve failed");
    const double res = (op.A * x - rhs).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
    if (!(res <= 1e-10 * scale))
        throw NumericalError("step_frozen: linear residual " + std::to_string(res) +
                             " exceeds 1e-10 relative tolerance");

    ScalarField unew = ScalarField::undefined(d);
    for (int j = 1; j <= d.ny; ++j)
        for (int i = 1; i <= d.nx; ++i)
            unew.at(i, j) = x[op.id(i, j)];
    unew = apply_clamped_ghosts(unew, bc);
    unew.time = u.time + dt;
    return unew;
}

namespace detail {

inline bool interior_finite(const ScalarField& u) {
    for (int j = 1; j <= u.dom.ny; ++j)
        for (int i = 1; i <= u.dom.nx; ++i)
            if (!std::isfinite(u.at(i, j))) return false;
    return true;
}

// Wraps a raw field update into the stateful step: advance, verify
// finiteness, record the effective velocity.
inline FlowState make_state(const FlowState& prev, ScalarField unew, double dt,
                            const char* who) {
    if (!interior_finite(unew))
        throw FlowBlowUp(std::string(who) + ": nonfinite update at t=" +
                             std::to_string(prev.t + dt),
                         prev);
    FlowState s;
    s.t = prev.t + dt;
    s.step = prev.step + 1;
    s.last_rhs = ScalarField::zeros(prev.u.dom);
    for (int j = 1; j <= prev.u.dom.ny; ++j)
        for (int i = 1; i <= prev.u.dom.nx; ++i)
            s.last_rhs.at(i, j) = (unew.at(i, j) - prev.u.at(i, j)) / dt;
    s.u = std::move(unew);
    return s;
}

} // namespace detail

inline FlowState step_explicit(const FlowState& s, const BoundaryData& bc, double dt) {
    return detail::make_state(s, step_explicit(s.u, bc, dt), dt, "step_explicit");
}

inline FlowState step_frozen(const FlowState& s, const BoundaryData& bc, double dt) {
    return detail::make_state(s, step_frozen(s.u, bc, dt), dt, "step_frozen");
}

namespace detail {

inline std::set<long> geometric_snapshot_steps(long max_steps) {
    std::set<long> s{0};
    for (int j = 0;; ++j) {
        const long n = std::lround(std::pow(2.0, j / 4.0));
        if (n > max_steps) break;
        s.insert(n);
        if (j > 400) break;
    }
    return s;
}

} // namespace detail

inline Trajectory run_flow(const ScalarField& u0, const BoundaryData& bc,
                           const FlowConfig& cfg) {
    bc.validate(u0.dom);
    if (cfg.t_end <= 0) throw ConfigError("run_flow: t_end must be positive");
    if (cfg.diag_every < 1) throw ConfigError("run_flow: diag_every must be >= 1");
    if (cfg.max_steps < 1) throw ConfigError("run_flow: max_steps must be >= 1");
    double dt = 0;
    if (cfg.dt_policy == DtPolicy::Fixed) {
        if (!(cfg.dt > 0)) throw ConfigError("run_flow: fixed dt must be positive");
        dt = cfg.dt;
    } else {
        if (!(cfg.cfl_c > 0 && cfg.cfl_c <= 1))
            throw ConfigError("run_flow: cfl factor must lie in (0, 1]");
        dt = cfl_dt(u0.dom, cfg.cfl_c);
    }

    Trajectory out;
    if (cfg.require_compat) {
        const CompatReport r = check_compatibility(u0, bc, cfg.cc_tol, true);
        if (!r.height_ok || !r.slope_ok)
            throw ConfigError(
                "run_flow: initial datum incompatible with boundary data "
                "(height residual " + std::to_string(r.height_residual) +
                ", slope residual " + std::to_string(r.slope_residual) +
                ", tol " + std::to_string(r.tol) + ")");
        // The fourth-order condition is deliberately not required: starting
        // from data that violate it is the whole point of the rough-data runs.
        if (r.fourth_order_residual && *r.fourth_order_residual > 1.0)
            out.compat_note = "fourth-order compatibility residual " +
                              std::to_string(*r.fourth_order_residual);
    }

    FlowState st;
    st.u = apply_clamped_ghosts(u0, bc);
    st.t = st.u.time;
    st.last_rhs = ScalarField::zeros(u0.dom);

    const std::set<long> geo =
        cfg.snapshot_geometric ? detail::geometric_snapshot_steps(cfg.max_steps)
                               : std::set<long>{};
    auto want_snapshot = [&](long step) {
        if (cfg.snapshot_geometric && geo.count(step)) return true;
        return cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0;
    };

    const double stat_tol = cfg.stationary_tol * u0.dom.area();
    double W_prev = 0, t_prev = 0;
    bool have_prev = false;
    // Records a diagnostics row and returns the stationarity residual
    // max |rhs_geometric| evaluated at the recorded state.
    auto record = [&](const ScalarField& s) {
        const ScalarField v = rhs_geometric(s);
        const ScalarField q = area_element(s);
        const GridDomain& d = s.dom;
        DiagRecord r;
        r.t = s.time;
        r.W = willmore_energy(s);
        r.sup_u = max_abs_covered(s);
        r.sup_grad_u = sup_gradient(s);
        r.l2_u = l2_norm(s);
        r.area = surface_area(s);
        r.dWdt = have_prev && s.time > t_prev ? (r.W - W_prev) / (s.time - t_prev) : 0.0;
        r.dissipation_rhs = -0.5 * trapezoid_nodes(d, [&](int i, int j) {
            if (i < 1 || i > d.nx || j < 1 || j > d.ny) return 0.0;
            const double w = v.at(i, j);
            return w * w / q.at(i, j);
        });
        r.dt = dt;
        out.diag.push_back(r);
        W_prev = r.W;
        t_prev = s.time;
        have_prev = true;
        return max_abs_interior(v);
    };
    auto finish = [&](StopReason why) {
        out.reason = why;
        out.final_state = st.u;
        out.steps = st.step;
        out.t_final = st.t;
        const double t_eps = 1e-12 * cfg.t_end;
        if (!out.snapshots.empty() && out.snapshots.back().time < st.t - t_eps)
            out.snapshots.push_back(st.u);
        return out;
    };

    double rhs_inf = record(st.u);
    if (want_snapshot(0)) out.snapshots.push_back(st.u);
    if (cfg.stationary_tol > 0 && rhs_inf <= stat_tol) return finish(StopReason::Stationary);

    const double t_eps = 1e-12 * cfg.t_end;
    while (st.t < cfg.t_end - t_eps && st.step < cfg.max_steps) {
        try {
            st = (cfg.scheme == Scheme::Explicit) ? step_explicit(st, bc, dt)
                                                  : step_frozen(st, bc, dt);
        } catch (FlowBlowUp& e) {
            e.diag = out.diag;
            throw;
        }

        if (max_abs_interior(st.u) > cfg.blowup_sup) {
            FlowBlowUp e("run_flow: solution magnitude exceeded " +
                             std::to_string(cfg.blowup_sup) + " at t=" +
                             std::to_string(st.t),
                         st);
            e.diag = out.diag;
            throw e;
        }

        const bool last = !(st.t < cfg.t_end - t_eps) || st.step >= cfg.max_steps;
        const bool sample = st.step % cfg.diag_every == 0 || last;
        if (want_snapshot(st.step)) out.snapshots.push_back(st.u);
        if (sample) {
            rhs_inf = record(st.u);
            if (cfg.stationary_tol > 0 && rhs_inf <= stat_tol)
                return finish(StopReason::Stationary);
        }
    }
    return finish(st.step >= cfg.max_steps && st.t < cfg.t_end - t_eps
                      ? StopReason::MaxSteps
                      : StopReason::ReachedTEnd);
}

// ---------------------------------------------------------------------------
// Energy dissipation probe over a recorded trajectory. At each interior
// snapshot the central-difference energy rate (W_{k+1} - W_{k-1}) / (t_{k+1} -
// t_{k-1}) is compared against -1/2 int |v|^2 Q^p dA for the central-difference
// velocity v, with p = -1 as the derived identity and p in {0, +1} fitted
// alongside to identify which power actually balances the books.

struct DissipationSample {
    double t, lhs, rhs, rel_err;
};

struct DissipationReport {
    std::vector<DissipationSample> samples;
    double max_rel_err = 0;
    double median_rel_err = 0;
    bool monotone = true;         // W(t2) <= W(t1) + slack for all t1 < t2
    double monotone_slack = 0;
    double median_mismatch[3] = {0, 0, 0}; // p = -1, 0, +1
    int fitted_q_power = -1;
};

inline DissipationReport dissipation_probe(const Trajectory& traj) {
    const std::vector<ScalarField>& snap = traj.snapshots;
    if (snap.size() < 3)
        throw EstimatorError("dissipation_probe: need at least 3 snapshots, have " +
                             std::to_string(snap.size()));
    DissipationReport out;

    std::vector<double> W(snap.size());
    for (std::size_t k = 0; k < snap.size(); ++k) W[k] = willmore_energy(snap[k]);

    out.monotone_slack = 1e-8 * std::abs(W.front()) + 1e-12;
    for (std::size_t a = 0; a + 1 < W.size() && out.monotone; ++a)
        for (std::size_t b = a + 1; b < W.size(); ++b)
            if (W[b] > W[a] + out.monotone_slack) {
                out.monotone = false;
                break;
            }

    const GridDomain& d = snap.front().dom;
    std::vector<double> mis[3];
    for (std::size_t k = 1; k + 1 < snap.size(); ++k) {
        const double span = snap[k + 1].time - snap[k - 1].time;
        if (!(span > 0)) throw EstimatorError("dissipation_probe: snapshot times not increasing");
        const double lhs = (W[k + 1] - W[k - 1]) / span;
        const ScalarField q = area_element(snap[k]);
        double diss[3];
        for (int p = -1; p <= 1; ++p) {
            diss[p + 1] = -0.5 * trapezoid_nodes(d, [&](int i, int j) {
                if (i < 1 || i > d.nx || j < 1 || j > d.ny) return 0.0;
                const double v = (snap[k + 1].at(i, j) - snap[k - 1].at(i, j)) / span;
                return v * v * std::pow(q.at(i, j), p);
            });
        }
        const double rhs = diss[0];
        const double denom = std::max(std::max(std::abs(lhs), std::abs(rhs)), 1e-300);
        out.samples.push_back({snap[k].time, lhs, rhs, std::abs(lhs - rhs) / denom});
        for (int m = 0; m < 3; ++m)
            mis[m].push_back(std::abs(lhs - diss[m]) /
                             std::max(std::max(std::abs(lhs), std::abs(diss[m])), 1e-300));
    }

    auto median = [](std::vector<double> v) {
        if (v.empty()) return 0.0;
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    for (const DissipationSample& s : out.samples)
        out.max_rel_err = std::max(out.max_rel_err, s.rel_err);
    {
        std::vector<double> re;
        for (const DissipationSample& s : out.samples) re.push_back(s.rel_err);
        out.median_rel_err = median(re);
    }
    int best = 0;
    for (int m = 0; m < 3; ++m) {
        out.median_mismatch[m] = median(mis[m]);
        if (out.median_mismatch[m] < out.median_mismatch[best]) best = m;
    }
    out.fitted_q_power = best - 1;
    return out;
}

// ---------------------------------------------------------------------------
// Exponential-convergence fit over the tail of a trajectory:
// log ||u(t) - u_inf||_L2 against t, least squares.

struct ConvergenceFit {
    double rate = 0;      // positive decay rate; +inf when the residual is identically 0
    double amplitude = 0; // exp(intercept)
    double r2 = 0;
    bool valid = false;
    std::vector<double> t, residual; // raw series over the fitted window
};

inline ConvergenceFit convergence_fit(const Trajectory& traj, const ScalarField& u_inf,
                                      double t_min = -1) {
    ConvergenceFit out;
    if (traj.snapshots.size() < 3)
        throw EstimatorError("convergence_fit: need at least 3 snapshots");
    if (t_min < 0) t_min = 0.25 * traj.snapshots.back().time;
    const GridDomain& d = u_inf.dom;
    for (const ScalarField& s : traj.snapshots) {
        if (s.time < t_min) continue;
        require_same_domain(s, u_inf, "convergence_fit");
        ScalarField diffu = ScalarField::zeros(d);
        for (int j = 0; j <= d.ny + 1; ++j)
            for (int i = 0; i <= d.nx + 1; ++i)
                diffu.at(i, j) = s.at(i, j) - u_inf.at(i, j);
        out.t.push_back(s.time);
        out.residual.push_back(l2_norm(diffu));
    }
    if (out.t.size() < 3)
        throw EstimatorError("convergence_fit: post-transient window has fewer than 3 samples");

    const double floor_res = 1e-14 * std::max(1.0, l2_norm(u_inf));
    bool all_zero = true;
    for (double r : out.residual)
        if (r > floor_res) { all_zero = false; break; }
    if (all_zero) {
        out.rate = std::numeric_limits<double>::infinity();
        out.amplitude = 0;
        out.r2 = 1;
        out.valid = true;
        return out;
    }

    for (std::size_t k = 0; k + 1 < out.residual.size(); ++k) {
        if (out.residual[k + 1] > out.residual[k] * (1 + 1e-9) + floor_res) {
            out.valid = false; // non-monotone tail: report raw residuals only
            return out;
        }
    }

    std::vector<double> lr;
    for (double r : out.residual) lr.push_back(std::log(std::max(r, 1e-300)));
    const FitResult f = fit_line(out.t, lr);
    out.rate = -f.slope;
    out.amplitude = std::exp(f.intercept);
    out.r2 = f.r2;
    out.valid = true;
    return out;
}

} // namespace wgf
