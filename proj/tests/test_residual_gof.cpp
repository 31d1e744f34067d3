#include <doctest.h>

#include <cmath>
#include <vector>

#include "metroscale/residual_gof.hpp"
#include "metroscale/rng.hpp"
#include "metroscale/stats.hpp"

using namespace metroscale;

TEST_CASE("laplace and gaussian MLE identities on a tiny fixture") {
    const std::vector<double> r = {-1.0, 0.0, 1.0};
    const auto lap = fit_laplace_mle(r);
    CHECK(lap.location == doctest::Approx(0.0));
    CHECK(lap.scale == doctest::Approx(2.0 / 3.0));
    const auto gauss = fit_gaussian_mle(r);
    CHECK(gauss.location == doctest::Approx(0.0));
    CHECK(gauss.scale == doctest::Approx(std::sqrt(2.0 / 3.0)));
}

TEST_CASE("KDE of symmetric input is symmetric about zero") {
    const std::vector<double> r = {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
    const auto kde = kernel_density(r);
    REQUIRE(kde.grid.size() == 512);
    // Grid is symmetric by construction (data range is symmetric), so the
    // mirrored grid point of index i is index 511 - i.
    for (std::size_t i = 0; i < 512; ++i) {
        CHECK(kde.grid[i] == doctest::Approx(-kde.grid[511 - i]).epsilon(1e-10));
        CHECK(kde.density[i] ==
              doctest::Approx(kde.density[511 - i]).epsilon(1e-10));
    }
    // Density integrates to about 1.
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < 512; ++i)
        mass += 0.5 * (kde.density[i] + kde.density[i + 1]) *
                (kde.grid[i + 1] - kde.grid[i]);
    CHECK(mass == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("silverman bandwidth formula") {
    std::vector<double> r;
    Rng rng(5);
    for (int i = 0; i < 200; ++i) r.push_back(rng.normal());
    const auto kde = kernel_density(r);
    const double sd = std::sqrt(stats::variance_n(r));
    const double expect = 0.9 * std::min(sd, stats::iqr(r) / 1.34) *
                          std::pow(200.0, -0.2);
    CHECK(kde.bandwidth == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("smooth test statistic is affine invariant for both families") {
    std::vector<double> r;
    Rng rng(6);
    for (int i = 0; i < 150; ++i) r.push_back(rng.normal() + 0.2 * rng.uniform());
    std::vector<double> scaled;
    for (double v : r) scaled.push_back(2.0 * v + 3.0);
    for (GofFamily family : {GofFamily::Gaussian, GofFamily::Laplace}) {
        const auto a = smooth_test(r, family, 1, 1);
        const auto b = smooth_test(scaled, family, 1, 1);
        CHECK(a.statistic == doctest::Approx(b.statistic).epsilon(1e-8));
        CHECK(a.dimension == b.dimension);
    }
}

TEST_CASE("smooth test rejects a grossly wrong family") {
    // Uniform data are far from Gaussian.
    std::vector<double> r;
    Rng rng(7);
    for (int i = 0; i < 300; ++i) r.push_back(rng.uniform());
    const auto res = smooth_test(r, GofFamily::Gaussian, 199, 2);
    CHECK(res.p_value < 0.02);
}

TEST_CASE("smooth test keeps its nominal size under the null") {
    // Monte Carlo size calibration: 500 Gaussian datasets, alpha = 5%.
    int rejections = 0;
    const int trials = 500;
    for (int t = 0; t < trials; ++t) {
        Rng rng = Rng::stream(909, t);
        std::vector<double> r;
        for (int i = 0; i < 100; ++i) r.push_back(rng.normal(0.3, 1.7));
        const auto res = smooth_test(r, GofFamily::Gaussian, 99,
                                     mix64(1234 + t));
        if (res.p_value <= 0.05) ++rejections;
    }
    const double rate = static_cast<double>(rejections) / trials;
    CHECK(rate > 0.03);
    CHECK(rate < 0.07);
}

TEST_CASE("smooth test is deterministic given the seed") {
    std::vector<double> r;
    Rng rng(8);
    for (int i = 0; i < 120; ++i) r.push_back(rng.laplace(0.0, 0.2));
    const auto a = smooth_test(r, GofFamily::Laplace, 99, 77);
    const auto b = smooth_test(r, GofFamily::Laplace, 99, 77);
    CHECK(a.p_value == b.p_value);
    CHECK(a.statistic == b.statistic);
    // Laplace data should not be rejected as Laplace with high confidence.
    CHECK(a.p_value > 0.01);
}

TEST_CASE("rank comparison equals the midrank spearman correlation") {
    const std::vector<double> a = {0.3, -0.1, 0.5, 0.2, -0.4};
    const std::vector<double> b = {2.0, 1.0, 5.0, 4.0, 0.5};
    CHECK(rank_comparison(a, b) == doctest::Approx(stats::spearman(a, b)));
    CHECK_THROWS(rank_comparison(a, {1.0}));
}
