#pragma once

#include <vector>

#include <Eigen/Dense>

namespace metroscale::spline {

// Penalized natural cubic smoothing spline with knots at every distinct x.
// Objective: n^-1 sum (y_i - s(x_i))^2 + lambda int (s'')^2.  Duplicated x
// values are merged with multiplicity weights.
struct SplineFit {
    std::vector<double> knots;           // distinct sorted abscissae
    std::vector<double> values;          // fitted values at the knots
    std::vector<double> second_derivs;   // s'' at the knots (ends are 0)
    double lambda = 0.0;
    double edf = 0.0;                    // trace of the smoother operator
    std::vector<double> fitted;          // per original point, input order
    std::vector<double> residuals;       // y - fitted
    std::vector<double> smoother_diag;   // d fitted_i / d y_i, per original point
    std::vector<double> knot_se_scale;   // sqrt(diag(S W^-1 S^T)); multiply by sigma
    double loo_cv = 0.0;                 // LOO CV mean squared error at lambda
};

// Natural-spline evaluation; linear extrapolation beyond the boundary knots.
double evaluate_spline(const SplineFit& fit, double x0);

// Reusable smoother for a fixed design; precomputes the penalty structure.
class SplineSmoother {
public:
    // Throws FitError when fewer than 4 distinct x values.
    explicit SplineSmoother(const std::vector<double>& x);

    std::size_t n_points() const { return map_.size(); }
    std::size_t n_knots() const { return knots_.size(); }
    const std::vector<double>& knots() const { return knots_; }

    // Fit at a fixed lambda; fills every SplineFit field except loo_cv
    // (use loo_score for that).
    SplineFit fit(const std::vector<double>& y, double lambda) const;

    // Full smoother matrix on the distinct knots, for oracle comparisons
    // and standard-error bands.
    Eigen::MatrixXd smoother_matrix(double lambda) const;

    // Leave-one-out CV mean squared error via the smoother-diagonal
    // shortcut, over the original (possibly duplicated) points.
    double loo_score(const SplineFit& fit, const std::vector<double>& y) const;

    // Smallest-CV lambda from the grid; ties break to the smaller lambda.
    double select_lambda(const std::vector<double>& y,
                         const std::vector<double>& grid) const;

    // 50-point logarithmic grid on [1e-6, 1e6] scaled by (range of x)^3 / n.
    std::vector<double> auto_grid() const;

    // Weighted mean of y on the distinct knots.
    Eigen::VectorXd aggregate(const std::vector<double>& y) const;

    // Applies a precomputed smoother matrix; returns per-original-point
    // fitted values.  Lets backfitting reuse one factorization per sweep.
    std::vector<double> apply(const Eigen::MatrixXd& S,
                              const std::vector<double>& y) const;

    // Integrated squared second derivative of the natural interpolant of
    // the given knot values.
    double roughness(const std::vector<double>& knot_values) const;

    // Multiplicity-weighted mean of per-original-point values (used for
    // identifiability centering of additive components).
    double data_mean(const std::vector<double>& per_point_values) const;

    // Expands knot values to per-original-point values.
    std::vector<double> to_points(const Eigen::VectorXd& knot_values) const;

private:
    std::vector<double> knots_;      // distinct sorted x
    std::vector<double> weights_;    // multiplicities
    std::vector<std::size_t> map_;   // original index -> knot index
    Eigen::MatrixXd Q_;              // m x (m-2) second-difference operator
    Eigen::MatrixXd R_;              // (m-2) x (m-2) Gram matrix of s''
};

// Convenience wrapper: lambda chosen from the grid (auto grid when the
// grid is empty) by leave-one-out CV.
SplineFit fit_spline(const std::vector<double>& x, const std::vector<double>& y,
                     const std::vector<double>& lambda_grid = {});

}  // namespace metroscale::spline
