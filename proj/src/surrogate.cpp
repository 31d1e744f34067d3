#include "metroscale/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "metroscale/errors.hpp"
#include "metroscale/model_eval.hpp"
#include "metroscale/rng.hpp"
#include "metroscale/stats.hpp"

namespace metroscale {

namespace {

Dataset simulate_with_rng(const ScalingFit& fit, const Dataset& d, Rng& rng) {
    if (fit.residuals_log.size() != d.size())
        throw DomainError("surrogate: fit was not produced on this dataset");
    Dataset out;
    out.label = d.label + " (surrogate)";
    out.deflator = d.deflator;
    out.records.reserve(d.size());
    const std::size_t n = d.size();
    for (std::size_t i = 0; i < n; ++i) {
        CityRecord rec = d.records[i];
        const double e = fit.residuals_log[rng.index(n)];
        const double log_y = predict_log_per_capita(fit, rec.population) + e;
        rec.aggregate_output = std::exp(log_y) * rec.population;
        out.records.push_back(std::move(rec));
    }
    return out;
}

double median_of(std::vector<double> v) { return stats::median(std::move(v)); }

}  // namespace

Dataset simulate_surrogate(const ScalingFit& fit, const Dataset& d, std::uint64_t seed) {
    Rng rng = Rng::stream(seed, 0);
    return simulate_with_rng(fit, d, rng);
}

SurrogateSummary surrogate_refit_distribution(ModelKind generator, ModelKind refit,
                                              const Dataset& d, std::size_t M,
                                              std::uint64_t seed) {
    NlsSettings s;
    s.seed = seed;
    const ScalingFit generator_fit = fit_model(d, generator, s);

    SurrogateSummary out;
    out.generator_model = generator;
    out.refit_model = refit;
    out.seed = seed;

    const bool power_refit =
        refit == ModelKind::PowerAggregate || refit == ModelKind::PowerPerCapita;

    for (std::size_t r = 0; r < M; ++r) {
        Rng rng = Rng::stream(seed, r);
        const Dataset surrogate = simulate_with_rng(generator_fit, d, rng);
        try {
            if (power_refit) {
                const ScalingFit fit = fit_power_aggregate(surrogate);
                const double rms = fit.rms_log();
                const double var = stats::variance_n(surrogate.log_aggregate());
                out.exponents.push_back(fit.param("b"));
                out.r_squared.push_back(1.0 - rms * rms / var);
            } else {
                const ScalingFit fit = fit_model(surrogate, refit, s);
                const ExtrapolationResult ex = extrapolate_to_aggregate(fit, surrogate);
                out.exponents.push_back(std::numeric_limits<double>::quiet_NaN());
                out.r_squared.push_back(ex.r_squared_log);
            }
        } catch (const Error&) {
            ++out.failures;
        }
    }
    out.replicates = out.exponents.size();
    if (out.replicates == 0) throw FitError("every surrogate replicate failed");
    if (power_refit) {
        out.exponent_median = median_of(out.exponents);
        out.exponent_q025 = stats::quantile_nearest_rank(out.exponents, 0.025);
        out.exponent_q975 = stats::quantile_nearest_rank(out.exponents, 0.975);
    }
    out.r2_median = median_of(out.r_squared);
    return out;
}

GapTestResult rms_gap_test(const Dataset& d, std::size_t M, std::uint64_t seed) {
    NlsSettings s;
    s.seed = seed;
    const ScalingFit power = fit_power_per_capita(d);
    const ScalingFit logistic = fit_logistic(d, s);

    GapTestResult out;
    out.seed = seed;
    out.observed_gap = power.rms_log() - logistic.rms_log();

    // Surrogate refits reuse the real-data logistic optimum as one start.
    const std::vector<std::vector<double>> warm_start = {
        {logistic.param("d1"), logistic.param("d2"), logistic.param("d3"),
         logistic.param("d4")}};

    for (std::size_t r = 0; r < M; ++r) {
        Rng rng = Rng::stream(seed, r);
        const Dataset surrogate = simulate_with_rng(power, d, rng);
        try {
            const ScalingFit p = fit_power_per_capita(surrogate);
            const ScalingFit l = fit_logistic(surrogate, s, warm_start);
            out.null_gaps.push_back(p.rms_log() - l.rms_log());
        } catch (const Error&) {
            ++out.failures;
        }
    }
    if (out.null_gaps.empty()) throw FitError("every gap-test replicate failed");
    std::size_t count = 0;
    for (double g : out.null_gaps)
        if (g >= out.observed_gap) ++count;
    out.p_value =
        static_cast<double>(count) / static_cast<double>(out.null_gaps.size());
    return out;
}

}  // namespace metroscale
