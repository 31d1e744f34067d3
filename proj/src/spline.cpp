#include "metroscale/spline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "metroscale/errors.hpp"

namespace metroscale::spline {

SplineSmoother::SplineSmoother(const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n < 4) throw FitError("spline needs at least 4 points");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

    map_.assign(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = order[k];
        if (knots_.empty() || x[i] > knots_.back()) {
            knots_.push_back(x[i]);
            weights_.push_back(0.0);
        }
        map_[i] = knots_.size() - 1;
        weights_.back() += 1.0;
    }
    const std::size_t m = knots_.size();
    if (m < 4) throw FitError("spline needs at least 4 distinct x values");

    // Second-difference operator Q and Gram matrix R of the second
    // derivative basis (Reinsch form).
    Q_.setZero(m, m - 2);
    R_.setZero(m - 2, m - 2);
    std::vector<double> h(m - 1);
    for (std::size_t i = 0; i + 1 < m; ++i) h[i] = knots_[i + 1] - knots_[i];
    for (std::size_t j = 0; j + 2 < m; ++j) {
        Q_(j, j) = 1.0 / h[j];
        Q_(j + 1, j) = -1.0 / h[j] - 1.0 / h[j + 1];
        Q_(j + 2, j) = 1.0 / h[j + 1];
        R_(j, j) = (h[j] + h[j + 1]) / 3.0;
        if (j + 3 < m) {
            R_(j, j + 1) = h[j + 1] / 6.0;
            R_(j + 1, j) = h[j + 1] / 6.0;
        }
    }
}

Eigen::MatrixXd SplineSmoother::smoother_matrix(double lambda) const {
    const std::size_t m = knots_.size();
    const std::size_t n = map_.size();
    const double big_lambda = lambda * static_cast<double>(n);
    Eigen::MatrixXd winv_q = Q_;
    for (std::size_t d = 0; d < m; ++d) winv_q.row(d) /= weights_[d];
    const Eigen::MatrixXd M = R_ + big_lambda * Q_.transpose() * winv_q;
    const Eigen::MatrixXd X = M.ldlt().solve(Q_.transpose());  // (m-2) x m
    Eigen::MatrixXd S = -big_lambda * winv_q * X;
    S.diagonal().array() += 1.0;
    return S;
}

SplineFit SplineSmoother::fit(const std::vector<double>& y, double lambda) const {
    const std::size_t m = knots_.size();
    const std::size_t n = map_.size();
    if (y.size() != n) throw FitError("spline: x/y length mismatch");
    if (!(lambda > 0.0)) throw FitError("spline: lambda must be positive");

    Eigen::VectorXd ybar = Eigen::VectorXd::Zero(m);
    for (std::size_t i = 0; i < n; ++i) ybar[map_[i]] += y[i];
    for (std::size_t d = 0; d < m; ++d) ybar[d] /= weights_[d];

    const Eigen::MatrixXd S = smoother_matrix(lambda);
    const Eigen::VectorXd f = S * ybar;

    // Second derivatives from the natural-spline interpolation conditions.
    const Eigen::VectorXd gamma_int =
        Eigen::MatrixXd(R_).ldlt().solve(Q_.transpose() * f);

    SplineFit out;
    out.knots = knots_;
    out.lambda = lambda;
    out.edf = S.trace();
    out.values.assign(f.data(), f.data() + m);
    out.second_derivs.assign(m, 0.0);
    for (std::size_t j = 0; j + 2 < m; ++j) out.second_derivs[j + 1] = gamma_int[j];

    out.fitted.resize(n);
    out.residuals.resize(n);
    out.smoother_diag.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t d = map_[i];
        out.fitted[i] = f[d];
        out.residuals[i] = y[i] - f[d];
        out.smoother_diag[i] = S(d, d) / weights_[d];
    }

    out.knot_se_scale.resize(m);
    for (std::size_t d = 0; d < m; ++d) {
        double s = 0.0;
        for (std::size_t e = 0; e < m; ++e) s += S(d, e) * S(d, e) / weights_[e];
        out.knot_se_scale[d] = std::sqrt(s);
    }
    return out;
}

Eigen::VectorXd SplineSmoother::aggregate(const std::vector<double>& y) const {
    const std::size_t m = knots_.size();
    Eigen::VectorXd ybar = Eigen::VectorXd::Zero(m);
    for (std::size_t i = 0; i < map_.size(); ++i) ybar[map_[i]] += y[i];
    for (std::size_t d = 0; d < m; ++d) ybar[d] /= weights_[d];
    return ybar;
}

std::vector<double> SplineSmoother::to_points(const Eigen::VectorXd& knot_values) const {
    std::vector<double> out(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) out[i] = knot_values[map_[i]];
    return out;
}

std::vector<double> SplineSmoother::apply(const Eigen::MatrixXd& S,
                                          const std::vector<double>& y) const {
    return to_points(S * aggregate(y));
}

double SplineSmoother::roughness(const std::vector<double>& knot_values) const {
    const std::size_t m = knots_.size();
    Eigen::VectorXd f(m);
    for (std::size_t d = 0; d < m; ++d) f[d] = knot_values[d];
    const Eigen::VectorXd qtf = Q_.transpose() * f;
    const Eigen::VectorXd gamma = Eigen::MatrixXd(R_).ldlt().solve(qtf);
    return gamma.dot(qtf);
}

double SplineSmoother::data_mean(const std::vector<double>& per_point_values) const {
    double s = 0.0;
    for (double v : per_point_values) s += v;
    return s / static_cast<double>(per_point_values.size());
}

double SplineSmoother::loo_score(const SplineFit& fit, const std::vector<double>& y) const {
    const std::size_t n = map_.size();
    double score = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double denom = 1.0 - fit.smoother_diag[i];
        const double e = (y[i] - fit.fitted[i]) / denom;
        score += e * e;
    }
    return score / static_cast<double>(n);
}

std::vector<double> SplineSmoother::auto_grid() const {
    const double range = knots_.back() - knots_.front();
    const double scale = range * range * range / static_cast<double>(map_.size());
    std::vector<double> grid(50);
    for (int i = 0; i < 50; ++i) {
        const double exponent = -6.0 + 12.0 * static_cast<double>(i) / 49.0;
        grid[i] = std::pow(10.0, exponent) * scale;
    }
    return grid;
}

double SplineSmoother::select_lambda(const std::vector<double>& y,
                                     const std::vector<double>& grid) const {
    std::vector<double> sorted = grid.empty() ? auto_grid() : grid;
    std::sort(sorted.begin(), sorted.end());
    double best_lambda = sorted.front();
    double best_score = std::numeric_limits<double>::infinity();
    for (double lambda : sorted) {
        const SplineFit f = fit(y, lambda);
        const double score = loo_score(f, y);
        if (score < best_score) {  // strict: ties keep the smaller lambda
            best_score = score;
            best_lambda = lambda;
        }
    }
    return best_lambda;
}

SplineFit fit_spline(const std::vector<double>& x, const std::vector<double>& y,
                     const std::vector<double>& lambda_grid) {
    SplineSmoother smoother(x);
    const double lambda = smoother.select_lambda(y, lambda_grid);
    SplineFit fit = smoother.fit(y, lambda);
    fit.loo_cv = smoother.loo_score(fit, y);
    return fit;
}

double evaluate_spline(const SplineFit& fit, double x0) {
    const auto& t = fit.knots;
    const auto& f = fit.values;
    const auto& g = fit.second_derivs;
    const std::size_t m = t.size();
    if (x0 <= t.front()) {
        const double h = t[1] - t[0];
        const double slope = (f[1] - f[0]) / h - h * g[1] / 6.0;
        return f[0] + slope * (x0 - t[0]);
    }
    if (x0 >= t.back()) {
        const double h = t[m - 1] - t[m - 2];
        const double slope = (f[m - 1] - f[m - 2]) / h + h * g[m - 2] / 6.0;
        return f[m - 1] + slope * (x0 - t[m - 1]);
    }
    const std::size_t hi =
        static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), x0) - t.begin());
    const std::size_t lo = hi - 1;
    const double h = t[hi] - t[lo];
    const double a = (t[hi] - x0) / h;
    const double b = (x0 - t[lo]) / h;
    return a * f[lo] + b * f[hi] +
           ((a * a * a - a) * g[lo] + (b * b * b - b) * g[hi]) * h * h / 6.0;
}

}  // namespace metroscale::spline
