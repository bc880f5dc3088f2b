#pragma once

#include <stdexcept>
#include <string>

namespace wgf {

// Error taxonomy used across the library. The CLI maps these onto exit codes:
// ConfigError -> 2, BlowUpError and NumericalError -> 3, NonConvergenceError -> 4,
// IoError -> 5.

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A field was used before its ghost/boundary values were populated.
struct StateError : std::runtime_error {
    explicit StateError(const std::string& what) : std::runtime_error(what) {}
};

// A time step produced a nonfinite value.
struct BlowUpError : std::runtime_error {
    explicit BlowUpError(const std::string& what, double t_last, long step_last)
        : std::runtime_error(what), t(t_last), step(step_last) {}
    double t = 0;
    long step = 0;
};

// Linear solver breakdown, singular Jacobian, failed line search.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct NonConvergenceError : std::runtime_error {
    explicit NonConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Norm estimator got a trajectory sampled too sparsely for a requested window.
struct EstimatorError : std::runtime_error {
    explicit EstimatorError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace wgf
