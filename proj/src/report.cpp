#include "metroscale/report.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "metroscale/errors.hpp"

namespace metroscale::report {

Json to_json(const ScalingFit& fit, bool include_vectors) {
    Json j;
    j["model"] = model_name(fit.model_kind);
    Json params = Json::object();
    for (const auto& [name, value] : fit.params) params[name] = value;
    j["params"] = params;
    j["n"] = fit.n;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["rms_log"] = fit.rms_log();
    if (fit.spline) {
        j["spline"] = {{"lambda", fit.spline->lambda},
                       {"edf", fit.spline->edf},
                       {"loo_cv", fit.spline->loo_cv}};
    }
    if (include_vectors) {
        j["fitted_log"] = fit.fitted_log;
        j["residuals_log"] = fit.residuals_log;
    }
    return j;
}

Json to_json(const ComparisonReport& r) {
    Json j;
    j["n"] = r.n;
    j["folds"] = r.folds;
    j["seed"] = r.seed;
    j["baseline_rms_log"] = r.baseline_rms_log;
    j["baseline_rms_dollars"] = r.baseline_rms_dollars;
    Json models = Json::array();
    for (const auto& [kind, m] : r.per_model) {
        models.push_back({{"model", model_name(kind)},
                          {"rms_log", m.rms_log},
                          {"r_squared_log", m.r_squared_log},
                          {"rms_dollars", m.rms_dollars},
                          {"pct_margin", m.pct_margin},
                          {"cv_rms", m.cv_rms}});
    }
    j["models"] = models;
    return j;
}

Json to_json(const BootstrapResult& r) {
    Json j;
    j["replicates"] = r.replicates;
    j["skipped"] = r.skipped;
    j["seed"] = r.seed;
    j["ci_low"] = r.ci_low;
    j["ci_high"] = r.ci_high;
    return j;
}

Json to_json(const SurrogateSummary& s, bool include_vectors) {
    Json j;
    j["generator"] = model_name(s.generator_model);
    j["refit"] = model_name(s.refit_model);
    j["replicates"] = s.replicates;
    j["failures"] = s.failures;
    j["seed"] = s.seed;
    j["exponent_median"] = s.exponent_median;
    j["exponent_q025"] = s.exponent_q025;
    j["exponent_q975"] = s.exponent_q975;
    j["r2_median"] = s.r2_median;
    if (include_vectors) {
        j["exponents"] = s.exponents;
        j["r_squared"] = s.r_squared;
    }
    return j;
}

Json to_json(const GapTestResult& r) {
    Json j;
    j["observed_gap"] = r.observed_gap;
    j["p_value"] = r.p_value;
    j["replicates"] = r.null_gaps.size();
    j["failures"] = r.failures;
    j["seed"] = r.seed;
    return j;
}

Json to_json(const AdditiveFit& fit, bool include_vectors) {
    Json j;
    j["include_size"] = fit.include_size;
    j["intercept"] = fit.intercept;
    j["size_exponent"] = fit.size_exponent;
    j["size_exponent_se"] = fit.size_exponent_se;
    j["converged"] = fit.converged;
    j["backfit_iterations"] = fit.backfit_iterations;
    j["sigma_hat"] = fit.sigma_hat;
    j["edf_total"] = fit.edf_total;
    j["rms_log"] = fit.rms_log;
    j["r_squared_log"] = fit.r_squared_log;
    j["dropped_sectors"] = fit.dropped_sectors;
    Json partials = Json::array();
    for (const auto& p : fit.partials) {
        Json pj;
        pj["sector_index"] = p.sector_index;
        pj["lambda"] = p.lambda;
        pj["edf"] = p.smooth.edf;
        if (include_vectors) {
            pj["knots"] = p.smooth.knots;
            pj["values"] = p.smooth.values;
            pj["knot_se"] = p.knot_se;
            pj["partial_residuals"] = p.partial_residuals;
        }
        partials.push_back(pj);
    }
    j["partials"] = partials;
    if (include_vectors) {
        j["fitted_log"] = fit.fitted_log;
        j["residuals_log"] = fit.residuals_log;
    }
    return j;
}

Json to_json(const AdditiveCvResult& r) {
    Json j;
    j["folds"] = r.folds;
    j["seed"] = r.seed;
    j["additive_mse"] = r.additive_mse;
    j["power_mse"] = r.power_mse;
    j["additive_fold_mse"] = r.additive_fold_mse;
    j["power_fold_mse"] = r.power_fold_mse;
    return j;
}

Json to_json(const MixtureFit& fit) {
    Json j;
    j["K"] = fit.K;
    j["weights"] = fit.weights;
    j["intercepts"] = fit.intercepts;
    j["slopes"] = fit.slopes;
    j["sigmas"] = fit.sigmas;
    j["log_likelihood"] = fit.log_likelihood;
    j["bic"] = fit.bic;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["seed"] = fit.seed;
    return j;
}

Json to_json(const ComponentSelection& s) {
    Json j;
    j["K_values"] = s.K_values;
    j["bic"] = s.bic;
    j["cv_loglik"] = s.cv_loglik;
    j["chosen_by_bic"] = s.chosen_by_bic;
    j["chosen_by_cv"] = s.chosen_by_cv;
    j["failed_K"] = s.failed_K;
    return j;
}

Json to_json(const GofReport& r, bool include_vectors) {
    Json j;
    j["residual_source"] = r.residual_source;
    j["seed"] = r.seed;
    j["gaussian"] = {{"mean", r.gaussian.location},
                     {"sd", r.gaussian.scale},
                     {"p_value", r.gaussian.p_value}};
    j["laplace"] = {{"location", r.laplace.location},
                    {"scale", r.laplace.scale},
                    {"p_value", r.laplace.p_value}};
    Json kde;
    kde["bandwidth"] = r.kde.bandwidth;
    if (include_vectors) {
        kde["grid"] = r.kde.grid;
        kde["density"] = r.kde.density;
    }
    j["kde"] = kde;
    auto test_json = [](const SmoothTestResult& t) {
        return Json{{"family", family_name(t.family)},
                    {"dimension", t.dimension},
                    {"statistic", t.statistic},
                    {"p_value", t.p_value},
                    {"replicates", t.replicates},
                    {"seed", t.seed}};
    };
    j["smooth_test_gaussian"] = test_json(r.gaussian_test);
    j["smooth_test_laplace"] = test_json(r.laplace_test);
    j["spearman_vs_per_capita"] = r.spearman_vs_per_capita;
    return j;
}

Json to_json(const SpeedFits& fits) {
    Json j;
    j["power"] = to_json(fits.power, false);
    j["logarithmic"] = to_json(fits.logarithmic, false);
    j["logistic"] = to_json(fits.logistic, false);
    return j;
}

std::string render_json(const std::string& label, Json payload) {
    Json root;
    root["schema_version"] = kSchemaVersion;
    root["label"] = label;
    root["payload"] = std::move(payload);
    return root.dump(2) + "\n";
}

void write_json(const std::string& path, const std::string& label, Json payload) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write report: " + path);
    out << render_json(label, std::move(payload));
}

}  // namespace metroscale::report
