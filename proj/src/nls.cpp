#include "metroscale/nls.hpp"

#include <cmath>
#include <limits>

#include "metroscale/errors.hpp"

namespace metroscale::nls {

namespace {

bool evaluate(const ResidualFn& fn, const Eigen::VectorXd& theta, Eigen::VectorXd& r,
              double& objective) {
    if (!fn(theta, r)) return false;
    objective = r.squaredNorm();
    return std::isfinite(objective);
}

// Central-difference Jacobian; infeasible probe points fall back to
// one-sided differences, and a fully blocked coordinate gets a zero column.
bool jacobian(const ResidualFn& fn, const Eigen::VectorXd& theta,
              const Eigen::VectorXd& r0, Eigen::MatrixXd& J) {
    const auto m = r0.size();
    const auto p = theta.size();
    J.resize(m, p);
    Eigen::VectorXd rp(m), rm(m);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double h = 1e-6 * std::max(std::fabs(theta[j]), 1.0);
        Eigen::VectorXd tp = theta, tm = theta;
        tp[j] += h;
        tm[j] -= h;
        const bool okp = fn(tp, rp);
        const bool okm = fn(tm, rm);
        if (okp && okm) J.col(j) = (rp - rm) / (2.0 * h);
        else if (okp) J.col(j) = (rp - r0) / h;
        else if (okm) J.col(j) = (r0 - rm) / h;
        else J.col(j).setZero();
    }
    return J.allFinite();
}

}  // namespace

Result minimize(const ResidualFn& fn, const Eigen::VectorXd& start,
                const Settings& settings) {
    Result res;
    res.theta = start;
    Eigen::VectorXd r;
    double objective;
    if (!evaluate(fn, res.theta, r, objective))
        throw FitError("infeasible NLS initialization");
    res.objective = objective;

    double mu = settings.damping;
    Eigen::MatrixXd J;
    for (int iter = 0; iter < settings.max_iterations; ++iter) {
        res.iterations = iter + 1;
        if (!jacobian(fn, res.theta, r, J)) break;
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        if (g.lpNorm<Eigen::Infinity>() < 1e-14 * (1.0 + res.objective)) {
            res.converged = true;
            break;
        }
        Eigen::VectorXd diag = JtJ.diagonal();
        for (Eigen::Index j = 0; j < diag.size(); ++j)
            if (diag[j] <= 0.0) diag[j] = 1.0;

        bool accepted = false;
        for (int attempt = 0; attempt < 30; ++attempt) {
            Eigen::MatrixXd A = JtJ;
            A.diagonal() += mu * diag;
            const Eigen::VectorXd step = A.ldlt().solve(-g);
            const Eigen::VectorXd candidate = res.theta + step;
            Eigen::VectorXd r_new;
            double obj_new;
            if (evaluate(fn, candidate, r_new, obj_new) && obj_new <= res.objective) {
                double max_rel = 0.0;
                for (Eigen::Index j = 0; j < step.size(); ++j)
                    max_rel = std::max(max_rel,
                                       std::fabs(step[j]) / std::max(std::fabs(res.theta[j]), 1.0));
                res.theta = candidate;
                r = r_new;
                res.objective = obj_new;
                mu = std::max(mu / 3.0, 1e-14);
                accepted = true;
                if (max_rel < settings.tolerance) res.converged = true;
                break;
            }
            mu *= 5.0;
        }
        if (!accepted || res.converged) {
            // No acceptable step at any damping level counts as converged to
            // a stationary point within numerical resolution.
            if (!accepted) res.converged = true;
            break;
        }
    }
    return res;
}

Result minimize_multistart(const ResidualFn& fn,
                           const std::vector<Eigen::VectorXd>& starts,
                           const Settings& settings) {
    Result best;
    best.objective = std::numeric_limits<double>::infinity();
    bool any = false;
    for (const auto& start : starts) {
        Eigen::VectorXd r;
        double obj;
        if (!evaluate(fn, start, r, obj)) continue;
        const Result res = minimize(fn, start, settings);
        if (!any || res.objective < best.objective) {
            best = res;
            any = true;
        }
    }
    if (!any) throw FitError("no feasible NLS initialization among restarts");
    return best;
}

}  // namespace metroscale::nls
