#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace metroscale {

enum class GofFamily { Gaussian, Laplace };

std::string family_name(GofFamily f);

struct DistributionFit {
    double location = 0.0;  // mean (Gaussian) or median (Laplace)
    double scale = 0.0;     // sd (Gaussian, /n) or mean abs deviation (Laplace)
    double p_value = -1.0;  // from the smooth test; -1 when not run
};

struct KdeEstimate {
    double bandwidth = 0.0;
    std::vector<double> grid;
    std::vector<double> density;
};

struct SmoothTestResult {
    GofFamily family = GofFamily::Gaussian;
    std::size_t dimension = 1;   // selected J
    double statistic = 0.0;      // n * sum of squared Legendre components
    double p_value = 1.0;
    int replicates = 0;
    std::uint64_t seed = 0;
    std::vector<double> components;  // m_1..m_J at the selected dimension
};

struct GofReport {
    std::string residual_source;
    DistributionFit gaussian;
    DistributionFit laplace;
    KdeEstimate kde;
    SmoothTestResult gaussian_test;
    SmoothTestResult laplace_test;
    double spearman_vs_per_capita = 0.0;
    std::uint64_t seed = 0;
};

// Gaussian and Laplace maximum-likelihood fits plus a Gaussian-kernel KDE
// with Silverman's rule-of-thumb bandwidth on a 512-point grid spanning
// the data range plus three bandwidths each side.
GofReport fit_residual_distributions(const std::vector<double>& residuals);

DistributionFit fit_gaussian_mle(const std::vector<double>& residuals);
DistributionFit fit_laplace_mle(const std::vector<double>& residuals);
KdeEstimate kernel_density(const std::vector<double>& residuals);

// Data-driven Neyman smooth test: probability-integral transform through
// the fitted CDF, normalized Legendre components on [0,1], dimension
// J <= 10 chosen by a Schwarz penalty, p-value by parametric bootstrap
// with parameters re-estimated and dimension re-selected per replicate.
SmoothTestResult smooth_test(const std::vector<double>& residuals, GofFamily family,
                             int replicates, std::uint64_t seed);

// Spearman rank correlation between residuals and per-capita levels.
double rank_comparison(const std::vector<double>& residuals,
                       const std::vector<double>& per_capita);

}  // namespace metroscale
