#pragma once

#include <cstdint>
#include <vector>

#include "metroscale/dataset.hpp"
#include "metroscale/scaling_models.hpp"

namespace metroscale {

struct SurrogateSummary {
    ModelKind generator_model;
    ModelKind refit_model;
    std::size_t replicates = 0;  // successful replicates
    std::size_t failures = 0;    // per-replicate fit failures, excluded
    double exponent_median = 0.0;
    double exponent_q025 = 0.0;
    double exponent_q975 = 0.0;
    double r2_median = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> exponents;  // one per successful replicate
    std::vector<double> r_squared;
};

struct GapTestResult {
    double observed_gap = 0.0;  // RMS_log(power) - RMS_log(logistic), real data
    std::vector<double> null_gaps;
    double p_value = 0.0;  // fraction of null gaps >= observed, exactly count/M
    std::size_t failures = 0;
    std::uint64_t seed = 0;
};

// Surrogate dataset: per-capita values set to the fitted curve at the real
// populations, perturbed by ln-scale residuals resampled with replacement.
// Populations and ids are unchanged.
Dataset simulate_surrogate(const ScalingFit& fit, const Dataset& d, std::uint64_t seed);

// Fit `generator` to d, simulate M surrogates, refit `refit` on the
// aggregate values of each, and summarize the exponent and R^2
// distributions.  Replicate r draws from an RNG stream derived from
// (seed, r), so results do not depend on evaluation order.
SurrogateSummary surrogate_refit_distribution(ModelKind generator, ModelKind refit,
                                              const Dataset& d, std::size_t M,
                                              std::uint64_t seed);

// One-sided test of the observed RMS gap between the power law and the
// logistic model against gaps from power-law surrogates.
GapTestResult rms_gap_test(const Dataset& d, std::size_t M, std::uint64_t seed);

}  // namespace metroscale
