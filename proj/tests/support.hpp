#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "wgf/flow.hpp"
#include "wgf/geometry.hpp"
#include "wgf/grid.hpp"

// Shared fixtures: reproducible random smooth fields, a dense linear solver
// used as the independent oracle route, and hand-built trajectories for the
// norm estimators.

namespace support {

using namespace wgf;

constexpr double kPi = 3.14159265358979323846;

// Sum of five random trig modes, rescaled so the discrete sup|grad u| equals
// grad_target exactly. Analytic fill, ghosts included.
inline ScalarField random_smooth(const GridDomain& d, std::mt19937& rng, double grad_target) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    struct Mode {
        double a, kx, ky, px, py;
    };
    std::vector<Mode> modes(5);
    for (Mode& m : modes) {
        m.a = 2 * U(rng) - 1;
        m.kx = kPi * (1 + 2 * U(rng));
        m.ky = kPi * (1 + 2 * U(rng));
        m.px = 2 * kPi * U(rng);
        m.py = 2 * kPi * U(rng);
    }
    ScalarField u = fill_from_function(d, [&](double x, double y) {
        double s = 0;
        for (const Mode& m : modes)
            s += m.a * std::sin(m.kx * x + m.px) * std::sin(m.ky * y + m.py);
        return s;
    });
    const double g = sup_gradient(u);
    const double scale = g > 0 ? grad_target / g : 0.0;
    for (double& x : u.v) x *= scale;
    return u;
}

// Gaussian elimination with partial pivoting; the deliberately pedestrian
// reference solver for oracle comparisons.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        if (std::abs(A[piv][c]) < 1e-300) throw std::runtime_error("dense_solve: singular");
        std::swap(A[piv], A[c]);
        std::swap(b[piv], b[c]);
        for (int r = c + 1; r < n; ++r) {
            const double f = A[r][c] / A[c][c];
            if (f == 0) continue;
            for (int k = c; k < n; ++k) A[r][k] -= f * A[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int k = r + 1; k < n; ++k) s -= A[r][k] * x[k];
        x[r] = s / A[r][r];
    }
    return x;
}

// Trajectory sampled from an analytic space-time function at given times.
template <class F>
inline Trajectory synthetic_trajectory(const GridDomain& d, const std::vector<double>& times,
                                       F&& f) {
    Trajectory tr;
    for (double t : times) {
        ScalarField u =
            fill_from_function(d, [&](double x, double y) { return f(x, y, t); });
        u.time = t;
        tr.snapshots.push_back(std::move(u));
    }
    tr.final_state = tr.snapshots.back();
    tr.t_final = times.back();
    return tr;
}

// Geometric time ladder t0 * ratio^k, capped at T, always ending exactly at T.
inline std::vector<double> geometric_times(double t0, double T, double ratio) {
    std::vector<double> ts{0.0};
    for (double t = t0; t < T * (1 - 1e-12); t *= ratio) ts.push_back(t);
    ts.push_back(T);
    return ts;
}

} // namespace support
