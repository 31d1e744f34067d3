#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace metroscale::nls {

struct Settings {
    int max_iterations = 200;
    double tolerance = 1e-10;    // relative parameter-change threshold
    double damping = 1e-3;       // initial Levenberg damping factor
    int restarts = 8;            // jittered initializations
    std::uint64_t seed = 0;
};

// Residual map r(theta); returns false when theta is infeasible (the step
// that produced it is rejected).
using ResidualFn = std::function<bool(const Eigen::VectorXd& theta, Eigen::VectorXd& r)>;

struct Result {
    Eigen::VectorXd theta;
    double objective = 0.0;  // sum of squared residuals
    bool converged = false;
    int iterations = 0;
};

// Damped Gauss-Newton from a single start.  Jacobians by central
// differences with step 1e-6 * max(|theta_j|, 1); damping multiplies
// diag(J^T J) so wildly scaled parameters stay usable.
Result minimize(const ResidualFn& fn, const Eigen::VectorXd& start,
                const Settings& settings);

// Runs minimize from each start, returns the lowest objective; ties break
// to the earliest start.  Throws FitError when no start is feasible.
Result minimize_multistart(const ResidualFn& fn,
                           const std::vector<Eigen::VectorXd>& starts,
                           const Settings& settings);

}  // namespace metroscale::nls
