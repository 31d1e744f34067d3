#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "metroscale/dataset.hpp"
#include "metroscale/spline.hpp"

namespace metroscale {

enum class ModelKind {
    PowerAggregate,   // ln Y = ln c + b ln N
    PowerPerCapita,   // ln y = ln c + (b-1) ln N
    Logarithmic,      // y = r ln(N/k), fit on the ln y scale
    Logistic,         // ln y = d1 + d2 sigmoid((N - d3)/d4)
    Spline,           // ln y = s(ln N)
};

std::string model_name(ModelKind kind);
ModelKind model_from_name(const std::string& name);

struct ScalingFit {
    ModelKind model_kind = ModelKind::PowerAggregate;
    // Named parameters: (c, b) | (r, k) | (d1..d4); empty for Spline.
    std::vector<std::pair<std::string, double>> params;
    std::vector<double> fitted_log;     // fitted ln-scale responses
    std::vector<double> residuals_log;  // observed_log - fitted_log
    std::size_t n = 0;
    bool converged = false;
    int iterations = 0;
    std::shared_ptr<const spline::SplineFit> spline;  // only for Spline

    double param(const std::string& name) const;
    double rms_log() const;
};

struct NlsSettings {
    int max_iterations = 200;
    double tolerance = 1e-10;
    double damping = 1e-3;
    int restarts = 8;
    std::uint64_t seed = 0;
};

// OLS of ln Y on ln N via the closed-form normal equations.
ScalingFit fit_power_aggregate(const Dataset& d);

// OLS of ln y on ln N; the stored exponent is b - 1 of the aggregate form.
ScalingFit fit_power_per_capita(const Dataset& d);

// Damped Gauss-Newton on (ln r, ln k) with jittered restarts; requires a
// feasible initialization with N_min/k > 1.
ScalingFit fit_logarithmic(const Dataset& d, const NlsSettings& s = {});

// As above on (d1..d4); extra_starts are tried in addition to the default
// initialization and its jitters (surrogate refits seed the real-data
// optimum this way).
ScalingFit fit_logistic(const Dataset& d, const NlsSettings& s = {},
                        const std::vector<std::vector<double>>& extra_starts = {});

// Sensitivity variant of the logarithmic model: OLS of y (linear scale)
// on ln N, reported with (r, k) parameters.
ScalingFit fit_logarithmic_linear_scale(const Dataset& d);

// Smoothing-spline scaling relation on (ln N, ln y); empty grid = auto.
ScalingFit fit_spline_scaling(const Dataset& d,
                              const std::vector<double>& lambda_grid = {});

// Fitted ln y at population N, any model kind.
double predict_log_per_capita(const ScalingFit& fit, double population);
// ln N + fitted ln y.
double predict_log_aggregate(const ScalingFit& fit, double population);

// Walking-speed re-analysis.  The logarithmic form is fit on the linear
// speed scale (OLS of v on ln N); power and logistic on ln v.  fitted_log
// holds ln of the fitted speed for all three.
struct SpeedFits {
    ScalingFit power;
    ScalingFit logarithmic;
    ScalingFit logistic;
};
SpeedFits fit_speed_models(const std::vector<SpeedRecord>& records,
                           const NlsSettings& s = {});

}  // namespace metroscale
