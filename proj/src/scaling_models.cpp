#include "metroscale/scaling_models.hpp"

#include <algorithm>
#include <cmath>

#include "metroscale/errors.hpp"
#include "metroscale/nls.hpp"
#include "metroscale/rng.hpp"
#include "metroscale/stats.hpp"

namespace metroscale {

std::string model_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::PowerAggregate: return "power_aggregate";
        case ModelKind::PowerPerCapita: return "power";
        case ModelKind::Logarithmic: return "logarithmic";
        case ModelKind::Logistic: return "logistic";
        case ModelKind::Spline: return "spline";
    }
    return "unknown";
}

ModelKind model_from_name(const std::string& name) {
    if (name == "power_aggregate") return ModelKind::PowerAggregate;
    if (name == "power") return ModelKind::PowerPerCapita;
    if (name == "logarithmic" || name == "log") return ModelKind::Logarithmic;
    if (name == "logistic") return ModelKind::Logistic;
    if (name == "spline") return ModelKind::Spline;
    throw Error("unknown model name '" + name + "'");
}

double ScalingFit::param(const std::string& name) const {
    for (const auto& [key, value] : params)
        if (key == name) return value;
    throw Error("no parameter '" + name + "' in " + model_name(model_kind) + " fit");
}

double ScalingFit::rms_log() const { return stats::rms(residuals_log); }

namespace {

struct OlsLine {
    double intercept, slope;
};

OlsLine ols(const std::vector<double>& x, const std::vector<double>& y) {
    const double mx = stats::mean(x), my = stats::mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0) throw FitError("degenerate predictor: all x values equal");
    const double slope = sxy / sxx;
    return {my - slope * mx, slope};
}

ScalingFit line_fit(ModelKind kind, const std::vector<double>& x,
                    const std::vector<double>& y, double exponent_offset) {
    const OlsLine line = ols(x, y);
    ScalingFit fit;
    fit.model_kind = kind;
    fit.n = x.size();
    fit.converged = true;
    fit.params = {{"c", std::exp(line.intercept)}, {"b", line.slope + exponent_offset}};
    fit.fitted_log.resize(x.size());
    fit.residuals_log.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        fit.fitted_log[i] = line.intercept + line.slope * x[i];
        fit.residuals_log[i] = y[i] - fit.fitted_log[i];
    }
    return fit;
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

ScalingFit fit_power_aggregate(const Dataset& d) {
    return line_fit(ModelKind::PowerAggregate, d.log_populations(), d.log_aggregate(), 0.0);
}

ScalingFit fit_power_per_capita(const Dataset& d) {
    return line_fit(ModelKind::PowerPerCapita, d.log_populations(), d.log_per_capita(), 0.0);
}

ScalingFit fit_logarithmic(const Dataset& d, const NlsSettings& s) {
    const std::vector<double> u = d.log_populations();
    const std::vector<double> w = d.log_per_capita();
    const double u_min = *std::min_element(u.begin(), u.end());
    const std::size_t n = u.size();

    // theta = (rho, kappa) with r = exp(rho), k = exp(kappa); feasible
    // while kappa < min ln N, which keeps the outer logarithm defined.
    nls::ResidualFn fn = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& r) {
        const double kappa = theta[1];
        if (!(kappa < u_min - 1e-9)) return false;
        r.resize(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i)
            r[static_cast<Eigen::Index>(i)] = w[i] - theta[0] - std::log(u[i] - kappa);
        return true;
    };

    auto rho_for = [&](double kappa) {
        double s_acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) s_acc += w[i] - std::log(u[i] - kappa);
        return s_acc / static_cast<double>(n);
    };

    Rng rng(s.seed);
    std::vector<Eigen::VectorXd> starts;
    const double deltas[] = {0.5, 2.0, 5.0, 8.0};
    for (double delta : deltas) {
        Eigen::VectorXd t(2);
        t[1] = u_min - delta;
        t[0] = rho_for(t[1]);
        starts.push_back(t);
    }
    for (int rstart = static_cast<int>(starts.size()); rstart < s.restarts; ++rstart) {
        Eigen::VectorXd t(2);
        t[1] = u_min - deltas[rstart % 4] * std::exp(0.5 * rng.normal());
        t[0] = rho_for(t[1]) + 0.2 * rng.normal();
        starts.push_back(t);
    }

    nls::Settings ns{s.max_iterations, s.tolerance, s.damping, s.restarts, s.seed};
    const nls::Result res = nls::minimize_multistart(fn, starts, ns);

    ScalingFit fit;
    fit.model_kind = ModelKind::Logarithmic;
    fit.n = n;
    fit.converged = res.converged;
    fit.iterations = res.iterations;
    fit.params = {{"r", std::exp(res.theta[0])}, {"k", std::exp(res.theta[1])}};
    fit.fitted_log.resize(n);
    fit.residuals_log.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        fit.fitted_log[i] = res.theta[0] + std::log(u[i] - res.theta[1]);
        fit.residuals_log[i] = w[i] - fit.fitted_log[i];
    }
    return fit;
}

ScalingFit fit_logistic(const Dataset& d, const NlsSettings& s,
                        const std::vector<std::vector<double>>& extra_starts) {
    const std::vector<double> pop = d.populations();
    const std::vector<double> w = d.log_per_capita();
    const std::size_t n = pop.size();
    const double pop_scale = stats::median(pop);

    nls::ResidualFn fn = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& r) {
        if (std::fabs(theta[3]) < 1e-9 * pop_scale) return false;  // d4 != 0
        r.resize(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            const double z = (pop[i] - theta[2]) / theta[3];
            r[static_cast<Eigen::Index>(i)] = w[i] - theta[0] - theta[1] * sigmoid(z);
        }
        return true;
    };

    const double w_min = *std::min_element(w.begin(), w.end());
    const double w_max = *std::max_element(w.begin(), w.end());
    double iqr_pop = stats::iqr(pop);
    if (iqr_pop <= 0.0) iqr_pop = pop_scale;

    Eigen::VectorXd base(4);
    base << w_min, w_max - w_min, stats::median(pop), iqr_pop;

    Rng rng(s.seed);
    std::vector<Eigen::VectorXd> starts;
    for (const auto& extra : extra_starts) {
        Eigen::VectorXd t(4);
        for (int j = 0; j < 4; ++j) t[j] = extra[static_cast<std::size_t>(j)];
        starts.push_back(t);
    }
    starts.push_back(base);
    for (int rstart = 1; rstart < s.restarts; ++rstart) {
        Eigen::VectorXd t = base;
        t[0] += 0.2 * (w_max - w_min) * rng.normal();
        t[1] *= std::exp(0.4 * rng.normal());
        t[2] *= std::exp(0.7 * rng.normal());
        t[3] *= std::exp(0.7 * rng.normal());
        starts.push_back(t);
    }

    nls::Settings ns{s.max_iterations, s.tolerance, s.damping, s.restarts, s.seed};
    const nls::Result res = nls::minimize_multistart(fn, starts, ns);

    ScalingFit fit;
    fit.model_kind = ModelKind::Logistic;
    fit.n = n;
    fit.converged = res.converged;
    fit.iterations = res.iterations;
    fit.params = {{"d1", res.theta[0]},
                  {"d2", res.theta[1]},
                  {"d3", res.theta[2]},
                  {"d4", res.theta[3]}};
    fit.fitted_log.resize(n);
    fit.residuals_log.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        fit.fitted_log[i] =
            res.theta[0] + res.theta[1] * sigmoid((pop[i] - res.theta[2]) / res.theta[3]);
        fit.residuals_log[i] = w[i] - fit.fitted_log[i];
    }
    return fit;
}

ScalingFit fit_logarithmic_linear_scale(const Dataset& d) {
    const std::vector<double> u = d.log_populations();
    const std::vector<double> y = d.per_capita_outputs();
    const OlsLine line = ols(u, y);  // y = a + r ln N  =>  r ln(N/k), k = exp(-a/r)
    if (line.slope == 0.0) throw FitError("logarithmic linear-scale fit: zero slope");

    ScalingFit fit;
    fit.model_kind = ModelKind::Logarithmic;
    fit.n = u.size();
    fit.converged = true;
    fit.params = {{"r", line.slope}, {"k", std::exp(-line.intercept / line.slope)}};
    fit.fitted_log.resize(u.size());
    fit.residuals_log.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double v = line.intercept + line.slope * u[i];
        fit.fitted_log[i] = std::log(std::max(v, 1e-300));
        fit.residuals_log[i] = std::log(y[i]) - fit.fitted_log[i];
    }
    return fit;
}

ScalingFit fit_spline_scaling(const Dataset& d, const std::vector<double>& lambda_grid) {
    const std::vector<double> u = d.log_populations();
    const std::vector<double> w = d.log_per_capita();
    auto sp = std::make_shared<spline::SplineFit>(spline::fit_spline(u, w, lambda_grid));

    ScalingFit fit;
    fit.model_kind = ModelKind::Spline;
    fit.n = u.size();
    fit.converged = true;
    fit.fitted_log = sp->fitted;
    fit.residuals_log = sp->residuals;
    fit.spline = std::move(sp);
    return fit;
}

double predict_log_per_capita(const ScalingFit& fit, double population) {
    const double u = std::log(population);
    switch (fit.model_kind) {
        case ModelKind::PowerAggregate:
            return std::log(fit.param("c")) + (fit.param("b") - 1.0) * u;
        case ModelKind::PowerPerCapita:
            return std::log(fit.param("c")) + fit.param("b") * u;
        case ModelKind::Logarithmic:
            return std::log(fit.param("r")) + std::log(u - std::log(fit.param("k")));
        case ModelKind::Logistic:
            return fit.param("d1") +
                   fit.param("d2") * sigmoid((population - fit.param("d3")) / fit.param("d4"));
        case ModelKind::Spline:
            return spline::evaluate_spline(*fit.spline, u);
    }
    throw Error("unreachable model kind");
}

double predict_log_aggregate(const ScalingFit& fit, double population) {
    return std::log(population) + predict_log_per_capita(fit, population);
}

SpeedFits fit_speed_models(const std::vector<SpeedRecord>& records, const NlsSettings& s) {
    if (records.size() < 3) throw FitError("speed fits need at least 3 records");
    // Reuse the per-capita machinery by treating speed as the intensive
    // variable: aggregate_output = v * N so that per_capita_output = v.
    Dataset d;
    d.label = "walking speed";
    for (const auto& r : records) {
        CityRecord rec;
        rec.id = r.location;
        rec.name = r.location;
        rec.population = r.population;
        rec.aggregate_output = r.speed() * r.population;
        d.records.push_back(rec);
    }
    SpeedFits out;
    out.power = fit_power_per_capita(d);
    out.logarithmic = fit_logarithmic_linear_scale(d);
    out.logistic = fit_logistic(d, s);
    return out;
}

}  // namespace metroscale
