#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "metroscale/dataset.hpp"
#include "metroscale/scaling_models.hpp"

namespace metroscale {

struct ModelMetrics {
    double rms_log = 0.0;
    double r_squared_log = 0.0;
    double rms_dollars = 0.0;
    double pct_margin = 0.0;  // 100 * (exp(rms_log) - 1), stored unrounded
    double cv_rms = 0.0;
};

struct ComparisonReport {
    std::vector<std::pair<ModelKind, ModelMetrics>> per_model;
    double baseline_rms_log = 0.0;      // constant-mean prediction of ln y
    double baseline_rms_dollars = 0.0;  // predicting the mean y for all cities
    std::size_t n = 0;
    int folds = 0;
    std::uint64_t seed = 0;
};

struct BootstrapResult {
    std::size_t replicates = 0;  // requested B
    std::vector<double> estimates;
    double ci_low = 0.0, ci_high = 0.0;  // 2.5 / 97.5 empirical percentiles
    std::uint64_t seed = 0;
    std::size_t skipped = 0;  // degenerate resamples
};

// Dispatch for the per-capita scaling forms (power, logarithmic, logistic,
// spline).
ScalingFit fit_model(const Dataset& d, ModelKind kind, const NlsSettings& s = {});

// Fold label per record, keyed by the id hash and the seed so that
// permuting records never changes the assignment.
std::vector<int> fold_assignment(const Dataset& d, int folds, std::uint64_t seed);

// In-sample RMS/R^2 on ln y, dollar-scale RMS on y, and k-fold CV RMS with
// every model refit per fold; includes the constant-mean baseline.
ComparisonReport compare_models(const Dataset& d, const std::vector<ModelKind>& models,
                                int folds, std::uint64_t seed);

// Case-resampling bootstrap of the aggregate power-law exponent.
BootstrapResult bootstrap_exponent(const Dataset& d, std::size_t B, std::uint64_t seed);

// Var[ln N] / (Var[ln N] + Var[ln y]) with sample (n-1) variances: the R^2
// a slope-1 aggregate regression would attain if per-capita output were
// independent of population.
double independence_r2_bound(const Dataset& d);

struct ExtrapolationResult {
    std::vector<double> fitted_log_aggregate;  // ln N_i + fitted ln y_i
    double r_squared_log = 0.0;                // R^2 on ln Y
};

// Carries a per-capita fit back to the implied aggregate values.
ExtrapolationResult extrapolate_to_aggregate(const ScalingFit& fit, const Dataset& d);

}  // namespace metroscale
