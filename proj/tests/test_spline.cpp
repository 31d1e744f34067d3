#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "metroscale/errors.hpp"
#include "metroscale/rng.hpp"
#include "metroscale/spline.hpp"

using namespace metroscale;
using spline::SplineSmoother;

namespace {

std::vector<double> test_x(std::size_t n) {
    std::vector<double> x(n);
    Rng rng(11);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = static_cast<double>(i) / static_cast<double>(n - 1) +
               0.01 * rng.uniform();
    return x;
}

std::vector<double> test_y(const std::vector<double>& x) {
    std::vector<double> y(x.size());
    Rng rng(12);
    for (std::size_t i = 0; i < x.size(); ++i)
        y[i] = std::sin(4.0 * x[i]) + 0.3 * x[i] + 0.1 * rng.normal();
    return y;
}

}  // namespace

TEST_CASE("smoother matches a dense penalized solve oracle") {
    // Oracle: minimize sum w_d (ybar_d - f_d)^2 + Lambda f' K f with the
    // penalty K = Q R^-1 Q^T assembled explicitly and solved in f-space,
    // independent of the gamma-space algebra used by the implementation.
    const auto x = test_x(25);
    const auto y = test_y(x);
    SplineSmoother sm(x);
    const double lambda = 1e-3;
    const auto fit = sm.fit(y, lambda);

    const std::size_t m = sm.n_knots();
    const auto& knots = sm.knots();
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(m, m - 2);
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(m - 2, m - 2);
    std::vector<double> h(m - 1);
    for (std::size_t i = 0; i + 1 < m; ++i) h[i] = knots[i + 1] - knots[i];
    for (std::size_t j = 0; j + 2 < m; ++j) {
        Q(j, j) = 1.0 / h[j];
        Q(j + 1, j) = -1.0 / h[j] - 1.0 / h[j + 1];
        Q(j + 2, j) = 1.0 / h[j + 1];
        R(j, j) = (h[j] + h[j + 1]) / 3.0;
        if (j + 3 < m) R(j, j + 1) = R(j + 1, j) = h[j + 1] / 6.0;
    }
    const Eigen::MatrixXd K = Q * R.inverse() * Q.transpose();
    Eigen::VectorXd wy = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
    for (std::size_t i = 0; i < x.size(); ++i) {
        // Recover the knot index by matching x against the distinct knots.
        std::size_t d = 0;
        while (knots[d] != x[i]) ++d;
        wy[d] += y[i];
        w[d] += 1.0;
    }
    const double big_lambda = lambda * static_cast<double>(x.size());
    const Eigen::MatrixXd A = Eigen::MatrixXd(w.asDiagonal()) + big_lambda * K;
    const Eigen::VectorXd f_oracle = A.ldlt().solve(wy);
    for (std::size_t d = 0; d < m; ++d)
        CHECK(fit.values[d] == doctest::Approx(f_oracle[d]).epsilon(1e-8));
}

TEST_CASE("tiny lambda interpolates, huge lambda approaches the OLS line") {
    const auto x = test_x(20);
    const auto y = test_y(x);
    SplineSmoother sm(x);
    const auto tight = sm.fit(y, 1e-12);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(tight.fitted[i] == doctest::Approx(y[i]).epsilon(1e-4));

    const auto flat = sm.fit(y, 1e9);
    // OLS line through (x, y).
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= x.size(), my /= y.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(flat.fitted[i] ==
              doctest::Approx(my + slope * (x[i] - mx)).epsilon(1e-4));
    CHECK(flat.edf == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("edf decreases as lambda grows") {
    const auto x = test_x(30);
    const auto y = test_y(x);
    SplineSmoother sm(x);
    double prev = 1e300;
    for (double lambda : {1e-8, 1e-5, 1e-2, 1e1}) {
        const auto fit = sm.fit(y, lambda);
        CHECK(fit.edf < prev + 1e-9);
        prev = fit.edf;
    }
}

TEST_CASE("LOO shortcut equals brute-force refits at fixed total penalty") {
    const auto x = test_x(18);
    const auto y = test_y(x);
    const std::size_t n = x.size();
    SplineSmoother sm(x);
    const double lambda = 3e-4;
    const auto fit = sm.fit(y, lambda);
    const double shortcut = sm.loo_score(fit, y);

    // Brute force: drop each point, refit with the same total penalty
    // Lambda = lambda * n (so pass lambda * n / (n-1)), predict at x_i.
    double brute = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> xr, yr;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) {
                xr.push_back(x[j]);
                yr.push_back(y[j]);
            }
        SplineSmoother sub(xr);
        const auto subfit =
            sub.fit(yr, lambda * static_cast<double>(n) / static_cast<double>(n - 1));
        const double pred = spline::evaluate_spline(subfit, x[i]);
        brute += (y[i] - pred) * (y[i] - pred);
    }
    brute /= static_cast<double>(n);
    CHECK(shortcut == doctest::Approx(brute).epsilon(1e-6));
}

TEST_CASE("duplicate x values are merged and share fitted values") {
    std::vector<double> x = {0.0, 0.5, 0.5, 1.0, 1.5, 2.0};
    std::vector<double> y = {0.0, 1.0, 3.0, 2.0, 2.5, 3.0};
    SplineSmoother sm(x);
    CHECK(sm.n_knots() == 5);
    const auto fit = sm.fit(y, 1e-3);
    CHECK(fit.fitted[1] == doctest::Approx(fit.fitted[2]).epsilon(1e-12));
}

TEST_CASE("select_lambda prefers the smaller lambda on ties and minimizes CV") {
    const auto x = test_x(20);
    const auto y = test_y(x);
    SplineSmoother sm(x);
    const double chosen = sm.select_lambda(y, {});
    const auto grid = sm.auto_grid();
    const auto best_fit = sm.fit(y, chosen);
    const double best = sm.loo_score(best_fit, y);
    for (double lambda : grid) {
        const double score = sm.loo_score(sm.fit(y, lambda), y);
        CHECK(best <= score + 1e-12);
    }
}

TEST_CASE("evaluate_spline reproduces knot values and extrapolates linearly") {
    const auto x = test_x(15);
    const auto y = test_y(x);
    SplineSmoother sm(x);
    const auto fit = sm.fit(y, 1e-3);
    for (std::size_t d = 0; d < fit.knots.size(); ++d)
        CHECK(spline::evaluate_spline(fit, fit.knots[d]) ==
              doctest::Approx(fit.values[d]).epsilon(1e-10));
    // Beyond the boundary the curve must be linear: second differences 0.
    const double a = spline::evaluate_spline(fit, fit.knots.back() + 0.5);
    const double b = spline::evaluate_spline(fit, fit.knots.back() + 1.0);
    const double c = spline::evaluate_spline(fit, fit.knots.back() + 1.5);
    CHECK(b - a == doctest::Approx(c - b).epsilon(1e-10));
}

TEST_CASE("degenerate designs are rejected") {
    CHECK_THROWS_AS(SplineSmoother({1.0, 2.0, 3.0}), FitError);
    CHECK_THROWS_AS(SplineSmoother({1.0, 1.0, 1.0, 1.0, 2.0}), FitError);
}
