#include "metroscale/model_eval.hpp"

#include <cmath>

#include "metroscale/errors.hpp"
#include "metroscale/rng.hpp"
#include "metroscale/stats.hpp"

namespace metroscale {

ScalingFit fit_model(const Dataset& d, ModelKind kind, const NlsSettings& s) {
    switch (kind) {
        case ModelKind::PowerAggregate: return fit_power_aggregate(d);
        case ModelKind::PowerPerCapita: return fit_power_per_capita(d);
        case ModelKind::Logarithmic: return fit_logarithmic(d, s);
        case ModelKind::Logistic: return fit_logistic(d, s);
        case ModelKind::Spline: return fit_spline_scaling(d);
    }
    throw Error("unreachable model kind");
}

std::vector<int> fold_assignment(const Dataset& d, int folds, std::uint64_t seed) {
    if (folds < 2) throw DomainError("need at least 2 folds");
    std::vector<int> out;
    out.reserve(d.size());
    for (const auto& rec : d.records)
        out.push_back(static_cast<int>(mix64(hash_string(rec.id) ^ seed) %
                                       static_cast<std::uint64_t>(folds)));
    return out;
}

namespace {

double cv_rms_for_model(const Dataset& d, ModelKind kind, const std::vector<int>& fold,
                        int folds, const NlsSettings& s) {
    double sse = 0.0;
    std::size_t count = 0;
    for (int f = 0; f < folds; ++f) {
        Dataset train;
        train.label = d.label;
        train.deflator = d.deflator;
        std::vector<std::size_t> held;
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (fold[i] == f) held.push_back(i);
            else train.records.push_back(d.records[i]);
        }
        if (held.empty()) continue;
        ScalingFit fit;
        try {
            fit = fit_model(train, kind, s);
        } catch (const Error& e) {
            throw FitError(model_name(kind) + " failed on fold " + std::to_string(f) +
                           ": " + e.what());
        }
        for (std::size_t i : held) {
            const auto& rec = d.records[i];
            const double pred = predict_log_per_capita(fit, rec.population);
            const double err = std::log(rec.per_capita_output()) - pred;
            sse += err * err;
            ++count;
        }
    }
    return std::sqrt(sse / static_cast<double>(count));
}

}  // namespace

ComparisonReport compare_models(const Dataset& d, const std::vector<ModelKind>& models,
                                int folds, std::uint64_t seed) {
    if (folds < 2) throw DomainError("need at least 2 folds");
    ComparisonReport report;
    report.n = d.size();
    report.folds = folds;
    report.seed = seed;

    const std::vector<double> w = d.log_per_capita();
    const std::vector<double> y = d.per_capita_outputs();
    const double var_w = stats::variance_n(w);
    report.baseline_rms_log = std::sqrt(var_w);
    report.baseline_rms_dollars = std::sqrt(stats::variance_n(y));

    const std::vector<int> fold = fold_assignment(d, folds, seed);
    NlsSettings s;
    s.seed = seed;

    for (ModelKind kind : models) {
        ScalingFit fit;
        try {
            fit = fit_model(d, kind, s);
        } catch (const Error& e) {
            throw FitError(model_name(kind) + ": " + e.what());
        }
        ModelMetrics m;
        m.rms_log = fit.rms_log();
        m.r_squared_log = 1.0 - m.rms_log * m.rms_log / var_w;
        m.pct_margin = 100.0 * (std::exp(m.rms_log) - 1.0);
        double sse_dollars = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            const double err = y[i] - std::exp(fit.fitted_log[i]);
            sse_dollars += err * err;
        }
        m.rms_dollars = std::sqrt(sse_dollars / static_cast<double>(d.size()));
        m.cv_rms = cv_rms_for_model(d, kind, fold, folds, s);
        report.per_model.emplace_back(kind, m);
    }
    return report;
}

BootstrapResult bootstrap_exponent(const Dataset& d, std::size_t B, std::uint64_t seed) {
    if (B < 5) throw DomainError("need at least 5 bootstrap replicates");
    BootstrapResult result;
    result.replicates = B;
    result.seed = seed;
    result.estimates.reserve(B);
    const std::size_t n = d.size();
    for (std::size_t r = 0; r < B; ++r) {
        Rng rng = Rng::stream(seed, r);
        Dataset resample;
        resample.label = d.label;
        resample.deflator = d.deflator;
        resample.records.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            resample.records.push_back(d.records[rng.index(n)]);
        try {
            const ScalingFit fit = fit_power_aggregate(resample);
            result.estimates.push_back(fit.param("b"));
        } catch (const FitError&) {
            ++result.skipped;  // all-equal populations in the resample
        }
    }
    if (result.estimates.empty()) throw FitError("every bootstrap replicate degenerate");
    result.ci_low = stats::quantile_nearest_rank(result.estimates, 0.025);
    result.ci_high = stats::quantile_nearest_rank(result.estimates, 0.975);
    return result;
}

double independence_r2_bound(const Dataset& d) {
    if (d.size() < 2) throw DomainError("need at least 2 records");
    const double var_u = stats::variance(d.log_populations());
    const double var_w = stats::variance(d.log_per_capita());
    if (var_u + var_w <= 0.0) throw DomainError("zero total variance");
    return var_u / (var_u + var_w);
}

ExtrapolationResult extrapolate_to_aggregate(const ScalingFit& fit, const Dataset& d) {
    ExtrapolationResult out;
    const std::vector<double> lnY = d.log_aggregate();
    out.fitted_log_aggregate.reserve(d.size());
    double sse = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double pred = predict_log_aggregate(fit, d.records[i].population);
        out.fitted_log_aggregate.push_back(pred);
        sse += (lnY[i] - pred) * (lnY[i] - pred);
    }
    out.r_squared_log = 1.0 - (sse / static_cast<double>(d.size())) / stats::variance_n(lnY);
    return out;
}

}  // namespace metroscale
