#include <doctest.h>

#include <cmath>

#include "metroscale/errors.hpp"
#include "metroscale/hierarchy_gam.hpp"
#include "metroscale/spline.hpp"
#include "metroscale/stats.hpp"
#include "support/synthetic.hpp"

using namespace metroscale;
using testsupport::additive_dataset;

TEST_CASE("backfit objective is non-increasing once penalties are frozen") {
    const Dataset d = additive_dataset(120, -2.0, 0.1, 0.15, 1);
    BackfitSettings s;
    const AdditiveFit fit = fit_additive(d, true, s);
    CHECK(fit.converged);
    REQUIRE(fit.objective_trace.size() >
            static_cast<std::size_t>(s.selection_sweeps));
    for (std::size_t t = static_cast<std::size_t>(s.selection_sweeps);
         t + 1 < fit.objective_trace.size(); ++t)
        CHECK(fit.objective_trace[t + 1] <= fit.objective_trace[t] + 1e-12);
}

TEST_CASE("partial residuals equal residuals plus the component values") {
    const Dataset d = additive_dataset(100, -2.0, 0.1, 0.2, 2);
    const AdditiveFit fit = fit_additive(d, true);
    for (const auto& comp : fit.partials) {
        REQUIRE(comp.partial_residuals.size() == d.size());
        for (std::size_t i = 0; i < d.size(); ++i)
            CHECK(comp.partial_residuals[i] ==
                  doctest::Approx(fit.residuals_log[i] + comp.values[i])
                      .epsilon(1e-9));
    }
}

TEST_CASE("converged backfit satisfies the blockwise stationarity conditions") {
    // Oracle check: at the fixed point each component must equal its own
    // smoother applied to its partial residual, and the linear part must be
    // the OLS fit of what is left.  Verified against freshly built
    // smoothers, independent of the backfitting loop's internal state.
    const Dataset d = additive_dataset(90, -1.5, 0.12, 0.15, 3);
    const AdditiveFit fit = fit_additive(d, true);
    REQUIRE(fit.converged);
    const auto u = d.log_populations();
    const auto w = d.log_per_capita();
    const std::size_t n = d.size();

    for (std::size_t j = 0; j < fit.partials.size(); ++j) {
        const auto& comp = fit.partials[j];
        std::vector<double> x(n), partial(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = *d.records[i].sector_shares[comp.sector_index];
            partial[i] = fit.residuals_log[i] + comp.values[i];
        }
        spline::SplineSmoother sm(x);
        const auto refit = sm.fit(partial, comp.lambda);
        const double center = stats::mean(refit.fitted);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(comp.values[i] ==
                  doctest::Approx(refit.fitted[i] - center).epsilon(5e-6).scale(1.0));
    }

    // Linear part: OLS of (w - sum_j f_j) on u.
    std::vector<double> target(n);
    for (std::size_t i = 0; i < n; ++i) {
        target[i] = w[i];
        for (const auto& comp : fit.partials) target[i] -= comp.values[i];
    }
    const double mu = stats::mean(u), mt = stats::mean(target);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (u[i] - mu) * (u[i] - mu);
        sxy += (u[i] - mu) * (target[i] - mt);
    }
    CHECK(fit.size_exponent == doctest::Approx(sxy / sxx).epsilon(1e-5));
    CHECK(fit.intercept ==
          doctest::Approx(mt - (sxy / sxx) * mu).epsilon(1e-4).scale(1.0));
}

TEST_CASE("known additive truth is recovered") {
    const Dataset d = additive_dataset(250, -2.0, 0.1, 0.05, 4);
    const AdditiveFit fit = fit_additive(d, true);
    CHECK(fit.size_exponent == doctest::Approx(0.1).epsilon(0.15));
    CHECK(fit.rms_log < 0.08);
    CHECK(fit.r_squared_log > 0.5);
    // All generating components are monotone nondecreasing; the fitted
    // partials should be close to monotone (allow one pointwise SE).
    for (const auto& comp : fit.partials) {
        for (std::size_t t = 0; t + 1 < comp.smooth.knots.size(); ++t) {
            const double drop = comp.smooth.values[t] - comp.smooth.values[t + 1];
            CHECK(drop <= comp.knot_se[t] + comp.knot_se[t + 1] + 1e-9);
        }
    }
}

TEST_CASE("excluding the size term keeps the no-size intercept sane") {
    const Dataset d = additive_dataset(120, -2.0, 0.0, 0.1, 5);
    const AdditiveFit with_size = fit_additive(d, true);
    const AdditiveFit no_size = fit_additive(d, false);
    CHECK(no_size.size_exponent == 0.0);
    // With b = 0 in the generator the two fits should nearly agree.
    double max_gap = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        max_gap = std::max(max_gap,
                           std::fabs(with_size.fitted_log[i] - no_size.fitted_log[i]));
    CHECK(max_gap < 0.1);
}

TEST_CASE("incomplete sector data and small samples are rejected") {
    Dataset d = additive_dataset(40, -2.0, 0.1, 0.1, 6);
    d.records[3].sector_shares[2].reset();
    CHECK_THROWS_AS(fit_additive(d, true), ValidationError);
    const Dataset tiny = additive_dataset(20, -2.0, 0.1, 0.1, 7);
    CHECK_THROWS_AS(fit_additive(tiny, true), ValidationError);
}

TEST_CASE("constant share columns are dropped, not fatal") {
    Dataset d = additive_dataset(80, -2.0, 0.1, 0.1, 8);
    for (auto& rec : d.records) rec.sector_shares[1] = 0.05;
    const AdditiveFit fit = fit_additive(d, true);
    REQUIRE(fit.dropped_sectors.size() == 1);
    CHECK(fit.dropped_sectors[0] == 1);
    CHECK(fit.partials.size() == 3);
}

TEST_CASE("additive CV beats the power law when structure is real") {
    const Dataset d = additive_dataset(150, -2.0, 0.1, 0.05, 9);
    const AdditiveCvResult cv = additive_cv(d, true, 6, 17);
    CHECK(cv.additive_fold_mse.size() == 6);
    CHECK(cv.additive_mse < cv.power_mse);
    // Determinism.
    const AdditiveCvResult cv2 = additive_cv(d, true, 6, 17);
    CHECK(cv.additive_mse == cv2.additive_mse);
}
