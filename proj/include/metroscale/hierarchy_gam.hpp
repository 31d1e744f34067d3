#pragma once

#include <cstdint>
#include <vector>

#include "metroscale/dataset.hpp"
#include "metroscale/spline.hpp"

namespace metroscale {

// One smooth partial-response function of a sector share.
struct PartialComponent {
    std::size_t sector_index = 0;      // position in CityRecord::sector_shares
    spline::SplineFit smooth;          // mean-centered over the fitting data
    double lambda = 0.0;
    std::vector<double> values;        // f_j(x_ij) per record, centered
    std::vector<double> knot_se;       // pointwise SE at the knots
    std::vector<double> partial_residuals;  // residuals + values
};

struct AdditiveFit {
    bool include_size = true;
    double intercept = 0.0;            // ln c
    double size_exponent = 0.0;        // b (0 when size excluded)
    double size_exponent_se = 0.0;     // conditional OLS SE given final smooths
    std::vector<PartialComponent> partials;
    std::vector<std::size_t> dropped_sectors;  // constant share columns
    std::vector<double> fitted_log;
    std::vector<double> residuals_log;
    bool converged = false;
    int backfit_iterations = 0;
    double sigma_hat = 0.0;
    double edf_total = 0.0;
    double rms_log = 0.0;
    double r_squared_log = 0.0;
    std::vector<double> objective_trace;  // penalized RSS/n after each sweep

    // Component value at an arbitrary share (linear extrapolation outside
    // the observed range), already centered.
    double partial_value(std::size_t component, double share) const;
};

struct BackfitSettings {
    int max_sweeps = 500;
    double tolerance = 1e-8;   // max abs change in fitted_log per sweep
    int selection_sweeps = 8;  // sweeps with per-smoother LOO lambda reselection
};

// Backfitted log-additive model: linear term in ln N (optional) plus one
// smooth per sector share.  Smoothing penalties are chosen by LOO CV
// during the initial selection sweeps, then frozen for the descent to
// convergence.  Requires complete sector data (n >= 30).
AdditiveFit fit_additive(const Dataset& d, bool include_size,
                         const BackfitSettings& s = {});

struct AdditiveCvResult {
    double additive_mse = 0.0;
    double power_mse = 0.0;  // pure power law, same folds
    std::vector<double> additive_fold_mse;
    std::vector<double> power_fold_mse;
    int folds = 0;
    std::uint64_t seed = 0;
};

// k-fold CV on ln y; the whole additive pipeline (including lambda
// selection) is refit per fold, paired against the power law.
AdditiveCvResult additive_cv(const Dataset& d, bool include_size, int folds,
                             std::uint64_t seed, const BackfitSettings& s = {});

}  // namespace metroscale
