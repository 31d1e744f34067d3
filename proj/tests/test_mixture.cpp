#include <doctest.h>

#include <cmath>

#include "metroscale/errors.hpp"
#include "metroscale/mixture.hpp"
#include "metroscale/scaling_models.hpp"
#include "metroscale/stats.hpp"
#include "support/synthetic.hpp"

using namespace metroscale;
using testsupport::power_law_dataset;
using testsupport::two_component_dataset;

TEST_CASE("K=1 reduces to the OLS power-law fit") {
    const Dataset d = power_law_dataset(80, 150.0, 1.12, 0.2, 1);
    EmSettings s;
    s.seed = 5;
    const MixtureFit fit = fit_mixture(d, 1, s);
    const ScalingFit ols = fit_power_per_capita(d);
    CHECK(fit.weights[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.slopes[0] == doctest::Approx(ols.param("b")).epsilon(1e-8));
    CHECK(fit.intercepts[0] ==
          doctest::Approx(std::log(ols.param("c"))).epsilon(1e-6));
    CHECK(fit.sigmas[0] == doctest::Approx(ols.rms_log()).epsilon(1e-8));
}

TEST_CASE("EM log-likelihood trace is monotone") {
    const Dataset d = two_component_dataset(200, 0.1, 1.0, 0.1, 2);
    EmSettings s;
    s.seed = 3;
    const MixtureFit fit = fit_mixture(d, 2, s);
    for (std::size_t t = 0; t + 1 < fit.log_likelihood_trace.size(); ++t)
        CHECK(fit.log_likelihood_trace[t + 1] >=
              fit.log_likelihood_trace[t] - 1e-12);
}

TEST_CASE("weights and responsibility rows are proper probabilities") {
    const Dataset d = two_component_dataset(150, 0.1, 1.0, 0.1, 4);
    EmSettings s;
    s.seed = 9;
    const MixtureFit fit = fit_mixture(d, 3, s);
    double wsum = 0.0;
    for (double w : fit.weights) {
        CHECK(w >= 0.0);
        wsum += w;
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-10));
    for (const auto& row : fit.responsibilities) {
        double rsum = 0.0;
        for (double r : row) rsum += r;
        CHECK(rsum == doctest::Approx(1.0).epsilon(1e-10));
    }
    // Components sorted by intercept.
    for (std::size_t z = 0; z + 1 < fit.K; ++z)
        CHECK(fit.intercepts[z] <= fit.intercepts[z + 1]);
}

TEST_CASE("two separated components are recovered with the right gap") {
    std::vector<int> labels;
    const Dataset d = two_component_dataset(400, 1.1, 1.0, 0.1, 6, &labels);
    EmSettings s;
    s.seed = 11;
    const MixtureFit fit = fit_mixture(d, 2, s);
    // Oracle: the seeded generating parameters.  Slopes are free per
    // component, so the separation is measured at the mean predictor
    // (the raw intercept extrapolates to ln N = 0 and amplifies slope
    // noise).
    const double u_bar = stats::mean(d.log_populations());
    const double gap = (fit.intercepts[1] + fit.slopes[1] * u_bar) -
                       (fit.intercepts[0] + fit.slopes[0] * u_bar);
    CHECK(gap == doctest::Approx(1.0).epsilon(0.05));
    CHECK(fit.slopes[0] == doctest::Approx(1.1).epsilon(0.02));
    CHECK(fit.slopes[1] == doctest::Approx(1.1).epsilon(0.02));

    // Oracle: generating labels; components are sorted by intercept, so
    // label 0 (lower line) maps to component 0.
    std::size_t confident = 0;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (fit.responsibilities[i][labels[i]] >= 0.99) ++confident;
    CHECK(static_cast<double>(confident) / static_cast<double>(d.size()) >= 0.99);
}

TEST_CASE("model selection prefers the generating order") {
    const Dataset one = power_law_dataset(150, 150.0, 1.12, 0.2, 7);
    const auto sel1 = select_components(one, 3, 6, 8, 13);
    CHECK(sel1.chosen_by_bic == 1);
    CHECK(sel1.chosen_by_cv == 1);

    const Dataset two = two_component_dataset(400, 1.1, 1.0, 0.1, 8);
    const auto sel2 = select_components(two, 3, 6, 8, 13);
    CHECK(sel2.chosen_by_bic == 2);
    CHECK(sel2.chosen_by_cv == 2);

    const auto trivial = select_components(two, 1, 6, 8, 13);
    CHECK(trivial.chosen_by_bic == 1);
    CHECK(trivial.chosen_by_cv == 1);
}

TEST_CASE("nested orders do not lose likelihood") {
    const Dataset d = two_component_dataset(200, 0.1, 1.0, 0.15, 9);
    EmSettings s;
    s.seed = 21;
    const MixtureFit k1 = fit_mixture(d, 1, s);
    const MixtureFit k2 = fit_mixture(d, 2, s);
    CHECK(k2.log_likelihood >= k1.log_likelihood - 1e-6);
}

TEST_CASE("bad inputs are rejected") {
    const Dataset d = power_law_dataset(12, 150.0, 1.1, 0.2, 10);
    CHECK_THROWS_AS(fit_mixture(d, 0, {}), DomainError);
    CHECK_THROWS_AS(fit_mixture(d, 5, {}), ValidationError);  // n < 5K
}
