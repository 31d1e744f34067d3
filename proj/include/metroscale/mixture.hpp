#pragma once

#include <cstdint>
#include <vector>

#include "metroscale/dataset.hpp"

namespace metroscale {

// Gaussian mixture of linear regressions of ln y on ln N; each component
// has its own intercept, slope, and noise scale.  Components are reported
// sorted by intercept.
struct MixtureFit {
    std::size_t K = 1;
    std::vector<double> weights;
    std::vector<double> intercepts;  // ln c_z
    std::vector<double> slopes;      // b_z
    std::vector<double> sigmas;
    std::vector<std::vector<double>> responsibilities;  // n rows, K columns
    double log_likelihood = 0.0;
    double bic = 0.0;  // -2 logL + p ln n, p = 4K - 1
    bool converged = false;
    int iterations = 0;
    std::uint64_t seed = 0;
    std::vector<double> log_likelihood_trace;  // per accepted EM iteration
};

struct EmSettings {
    int max_iterations = 2000;
    double tolerance = 1e-9;      // relative log-likelihood change
    double sigma_floor = 1e-8;    // below this a restart is degenerate
    int restarts = 20;
    std::uint64_t seed = 0;
};

// EM with random-responsibility initialization per restart; best restart
// by log-likelihood.  Degenerate restarts (component collapse) are
// discarded; throws FitError when all restarts degenerate.
MixtureFit fit_mixture(const Dataset& d, std::size_t K, const EmSettings& s = {});

// Held-out log-likelihood of a fitted mixture on one observation.
double mixture_log_density(const MixtureFit& fit, double log_pop, double log_pc);

struct ComponentSelection {
    std::vector<std::size_t> K_values;
    std::vector<double> bic;         // per K
    std::vector<double> cv_loglik;   // per K, held-out sum
    std::size_t chosen_by_bic = 1;
    std::size_t chosen_by_cv = 1;
    std::vector<std::size_t> failed_K;
};

// Fits K = 1..K_max; BIC minimization and k-fold held-out log-likelihood
// maximization each nominate a K.
ComponentSelection select_components(const Dataset& d, std::size_t K_max, int folds,
                                     int restarts, std::uint64_t seed);

}  // namespace metroscale
