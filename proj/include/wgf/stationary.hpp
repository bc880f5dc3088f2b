#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <vector>

#include "wgf/rhs.hpp"

// Damped Newton iteration for stationary graphs: find interior values with
//   lap_gamma H + 2 H (H^2/4 - K) = 0
// under the clamped boundary data. The Jacobian is built by colored forward
// differences: the residual at a node depends on interior values at most a
// few nodes away (stencil nesting reaches 3, ghost construction folds rings
// 1..3 back in), so perturbing every 11th node per axis isolates columns.

namespace wgf {

struct NewtonConfig {
    double tol = 1e-9;         // sup-norm residual target
    int max_iters = 40;
    double fd_eps = 1e-7;      // scaled per node by 1 + |u|
    int color_stride = 11;     // > 2 * influence distance
    int influence = 5;         // rows attributed to a perturbed column
    double armijo = 1e-4;
    double min_step = std::pow(0.5, 20);
};

struct NewtonIter {
    int iter;
    double res_inf;
    double step_fraction;
};

struct NewtonResult {
    ScalarField u; // ghosted solution
    std::vector<NewtonIter> history;
    int iterations = 0;
    bool converged = false;
};

namespace detail {

inline double residual_inf(const ScalarField& F) {
    return max_abs_interior(F);
}

} // namespace detail

inline NewtonResult newton_stationary(const ScalarField& u0, const BoundaryData& bc,
                                      const NewtonConfig& cfg = {}) {
    const GridDomain& d = u0.dom;
    bc.validate(d);
    const int nx = d.nx, ny = d.ny, N = nx * ny;
    auto id = [&](int i, int j) { return (j - 1) * nx + (i - 1); };

    ScalarField u = apply_clamped_ghosts(u0, bc);
    ScalarField F = geometric_operator(u);
    double res = detail::residual_inf(F);

    NewtonResult out;
    out.history.push_back({0, res, 0.0});

    const int S = cfg.color_stride, R = cfg.influence;
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        if (res <= cfg.tol) {
            out.converged = true;
            break;
        }

        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(size_t(N) * 40);
        for (int ci = 0; ci < S; ++ci) {
            for (int cj = 0; cj < S; ++cj) {
                ScalarField up = u;
                std::vector<std::pair<int, int>> cols;
                std::vector<double> epss;
                for (int j = 1; j <= ny; ++j) {
                    if (j % S != cj) continue;
                    for (int i = 1; i <= nx; ++i) {
                        if (i % S != ci) continue;
                        const double e = cfg.fd_eps * (1.0 + std::abs(u.at(i, j)));
                        up.at(i, j) += e;
                        cols.emplace_back(i, j);
                        epss.push_back(e);
                    }
                }
                if (cols.empty()) continue;
                up = apply_clamped_ghosts(up, bc);
                const ScalarField Fp = geometric_operator(up);
                for (size_t k = 0; k < cols.size(); ++k) {
                    const auto [qi, qj] = cols[k];
                    for (int j = std::max(1, qj - R); j <= std::min(ny, qj + R); ++j) {
                        for (int i = std::max(1, qi - R); i <= std::min(nx, qi + R); ++i) {
                            const double val = (Fp.at(i, j) - F.at(i, j)) / epss[k];
                            if (val != 0.0)
                                trip.emplace_back(id(i, j), id(qi, qj), val);
                        }
                    }
                }
            }
        }

        Eigen::SparseMatrix<double> J(N, N);
        J.setFromTriplets(trip.begin(), trip.end());
        Eigen::VectorXd rhs(N);
        for (int j = 1; j <= ny; ++j)
            for (int i = 1; i <= nx; ++i)
                rhs[id(i, j)] = -F.at(i, j);

        Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
        solver.compute(J);
        if (solver.info() != Eigen::Success)
            throw NumericalError("newton_stationary: Jacobian factorization failed at iter " +
                                 std::to_string(iter));
        const Eigen::VectorXd delta = solver.solve(rhs);
        if (solver.info() != Eigen::Success)
            throw NumericalError("newton_stationary: Jacobian solve failed");

        double lambda = 1.0;
        ScalarField u_try;
        ScalarField F_try;
        double res_try = 0;
        for (;;) {
            u_try = u;
            for (int j = 1; j <= ny; ++j)
                for (int i = 1; i <= nx; ++i)
                    u_try.at(i, j) += lambda * delta[id(i, j)];
            u_try = apply_clamped_ghosts(u_try, bc);
            bool finite = true;
            try {
                F_try = geometric_operator(u_try);
                res_try = detail::residual_inf(F_try);
            } catch (const StateError&) {
                finite = false;
            }
            if (finite && res_try <= (1.0 - cfg.armijo * lambda) * res) break;
            lambda *= 0.5;
            if (lambda < cfg.min_step)
                throw NonConvergenceError(
                    "newton_stationary: line search stalled at iter " + std::to_string(iter) +
                    ", residual " + std::to_string(res));
        }

        u = u_try;
        F = F_try;
        res = res_try;
        out.iterations = iter;
        out.history.push_back({iter, res, lambda});
        if (res <= cfg.tol) {
            out.converged = true;
            break;
        }
    }

    if (!out.converged)
        throw NonConvergenceError("newton_stationary: no convergence after " +
                                  std::to_string(cfg.max_iters) + " iterations, residual " +
                                  std::to_string(res));
    out.u = u;
    return out;
}

// The stationary residual lap_gamma H + 2 H (H^2/4 - K) with ghosts rebuilt
// from the boundary data, on interior nodes.
inline ScalarField residual_stationary(const ScalarField& u, const BoundaryData& bc) {
    return geometric_operator(apply_clamped_ghosts(u, bc));
}

inline ScalarField solve_stationary(const BoundaryData& bc, const ScalarField& u_init,
                                    const NewtonConfig& cfg = {}) {
    return newton_stationary(u_init, bc, cfg).u;
}

} // namespace wgf
