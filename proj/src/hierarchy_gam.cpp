#include "metroscale/hierarchy_gam.hpp"

#include <cmath>
#include <set>

#include <Eigen/Dense>

#include "metroscale/errors.hpp"
#include "metroscale/model_eval.hpp"
#include "metroscale/stats.hpp"

namespace metroscale {

double AdditiveFit::partial_value(std::size_t component, double share) const {
    return spline::evaluate_spline(partials[component].smooth, share);
}

namespace {

struct Design {
    std::vector<double> w;                       // ln y
    std::vector<double> u;                       // ln N
    std::vector<std::vector<double>> shares;     // per used sector
    std::vector<std::size_t> sector_index;       // original column of each
    std::vector<std::size_t> dropped;
};

Design build_design(const Dataset& d) {
    if (d.size() < 30) throw ValidationError("additive fit needs at least 30 records");
    Design design;
    design.w = d.log_per_capita();
    design.u = d.log_populations();
    for (std::size_t j = 0; j < kNumSectors; ++j) {
        std::vector<double> x;
        x.reserve(d.size());
        for (const auto& rec : d.records) {
            if (!rec.sector_shares[j])
                throw ValidationError("additive fit requires complete sector data");
            x.push_back(*rec.sector_shares[j]);
        }
        std::set<double> distinct(x.begin(), x.end());
        if (distinct.size() < 4) {
            // Constant (or nearly so) columns cannot support a smooth.
            design.dropped.push_back(j);
            continue;
        }
        design.shares.push_back(std::move(x));
        design.sector_index.push_back(j);
    }
    if (design.shares.empty()) throw FitError("no usable sector share columns");
    return design;
}

struct LinearPart {
    double intercept = 0.0;
    double slope = 0.0;
};

LinearPart refit_linear(const std::vector<double>& target, const std::vector<double>& u,
                        bool include_size) {
    LinearPart lin;
    if (!include_size) {
        lin.intercept = stats::mean(target);
        return lin;
    }
    const double mu = stats::mean(u), mt = stats::mean(target);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        sxx += (u[i] - mu) * (u[i] - mu);
        sxy += (u[i] - mu) * (target[i] - mt);
    }
    if (sxx <= 0.0) throw FitError("degenerate ln N column");
    lin.slope = sxy / sxx;
    lin.intercept = mt - lin.slope * mu;
    return lin;
}

}  // namespace

AdditiveFit fit_additive(const Dataset& d, bool include_size, const BackfitSettings& s) {
    const Design design = build_design(d);
    const std::size_t n = d.size();
    const std::size_t k = design.shares.size();

    std::vector<spline::SplineSmoother> smoothers;
    smoothers.reserve(k);
    for (const auto& x : design.shares) smoothers.emplace_back(x);

    std::vector<std::vector<double>> f(k, std::vector<double>(n, 0.0));
    std::vector<double> lambdas(k, 0.0);
    std::vector<Eigen::MatrixXd> smat(k);
    std::vector<Eigen::VectorXd> fknot(k);
    LinearPart lin;

    AdditiveFit out;
    out.include_size = include_size;
    out.dropped_sectors = design.dropped;

    std::vector<double> fitted(n, 0.0), prev_fitted(n, 0.0), partial(n), target(n);

    auto compute_fitted = [&]() {
        for (std::size_t i = 0; i < n; ++i) {
            double v = lin.intercept + lin.slope * design.u[i];
            for (std::size_t j = 0; j < k; ++j) v += f[j][i];
            fitted[i] = v;
        }
    };

    int sweep = 0;
    for (; sweep < s.max_sweeps; ++sweep) {
        const bool selecting = sweep < s.selection_sweeps;

        for (std::size_t i = 0; i < n; ++i) {
            double v = design.w[i];
            for (std::size_t j = 0; j < k; ++j) v -= f[j][i];
            target[i] = v;
        }
        lin = refit_linear(target, design.u, include_size);

        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                double v = design.w[i] - lin.intercept - lin.slope * design.u[i];
                for (std::size_t l = 0; l < k; ++l)
                    if (l != j) v -= f[l][i];
                partial[i] = v;
            }
            if (selecting) {
                lambdas[j] = smoothers[j].select_lambda(partial, {});
                smat[j] = smoothers[j].smoother_matrix(lambdas[j]);
            }
            fknot[j] = smat[j] * smoothers[j].aggregate(partial);
            f[j] = smoothers[j].to_points(fknot[j]);
            // Recenter, absorbing the mean into the intercept so the
            // fitted values (and the objective) are unchanged.
            const double center = smoothers[j].data_mean(f[j]);
            for (std::size_t i = 0; i < n; ++i) f[j][i] -= center;
            fknot[j].array() -= center;
            lin.intercept += center;
        }

        compute_fitted();
        double rss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = design.w[i] - fitted[i];
            rss += e * e;
        }
        double objective = rss / static_cast<double>(n);
        for (std::size_t j = 0; j < k; ++j) {
            std::vector<double> kv(fknot[j].data(), fknot[j].data() + fknot[j].size());
            objective += lambdas[j] * smoothers[j].roughness(kv);
        }
        out.objective_trace.push_back(objective);

        if (!selecting) {
            double max_change = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                max_change = std::max(max_change, std::fabs(fitted[i] - prev_fitted[i]));
            if (max_change < s.tolerance) {
                out.converged = true;
                ++sweep;
                break;
            }
        }
        prev_fitted = fitted;
    }
    out.backfit_iterations = sweep;

    out.intercept = lin.intercept;
    out.size_exponent = lin.slope;
    out.fitted_log = fitted;
    out.residuals_log.resize(n);
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out.residuals_log[i] = design.w[i] - fitted[i];
        rss += out.residuals_log[i] * out.residuals_log[i];
    }
    out.rms_log = std::sqrt(rss / static_cast<double>(n));
    out.r_squared_log = 1.0 - rss / (static_cast<double>(n) * stats::variance_n(design.w));

    out.edf_total = include_size ? 2.0 : 1.0;
    for (std::size_t j = 0; j < k; ++j) out.edf_total += smat[j].trace() - 1.0;
    const double dof = std::max(static_cast<double>(n) - out.edf_total, 1.0);
    out.sigma_hat = std::sqrt(rss / dof);

    if (include_size) {
        const double mu = stats::mean(design.u);
        double sxx = 0.0;
        for (double ui : design.u) sxx += (ui - mu) * (ui - mu);
        out.size_exponent_se = out.sigma_hat / std::sqrt(sxx);
    }

    for (std::size_t j = 0; j < k; ++j) {
        PartialComponent comp;
        comp.sector_index = design.sector_index[j];
        comp.lambda = lambdas[j];
        comp.values = f[j];
        // Final smooth of the component's own partial residual, recentered
        // to match the backfit solution.
        for (std::size_t i = 0; i < n; ++i)
            partial[i] = out.residuals_log[i] + f[j][i];
        comp.smooth = smoothers[j].fit(partial, lambdas[j]);
        const double center = smoothers[j].data_mean(comp.smooth.fitted);
        for (auto& v : comp.smooth.values) v -= center;
        for (auto& v : comp.smooth.fitted) v -= center;
        comp.knot_se.resize(comp.smooth.knot_se_scale.size());
        for (std::size_t t = 0; t < comp.knot_se.size(); ++t)
            comp.knot_se[t] = out.sigma_hat * comp.smooth.knot_se_scale[t];
        comp.partial_residuals.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            comp.partial_residuals[i] = out.residuals_log[i] + f[j][i];
        out.partials.push_back(std::move(comp));
    }
    return out;
}

AdditiveCvResult additive_cv(const Dataset& d, bool include_size, int folds,
                             std::uint64_t seed, const BackfitSettings& s) {
    AdditiveCvResult out;
    out.folds = folds;
    out.seed = seed;
    const std::vector<int> fold = fold_assignment(d, folds, seed);

    double add_sse = 0.0, pow_sse = 0.0;
    std::size_t count = 0;
    for (int fidx = 0; fidx < folds; ++fidx) {
        Dataset train;
        train.label = d.label;
        train.deflator = d.deflator;
        std::vector<std::size_t> held;
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (fold[i] == fidx) held.push_back(i);
            else train.records.push_back(d.records[i]);
        }
        if (held.empty()) continue;

        const AdditiveFit gam = fit_additive(train, include_size, s);
        const ScalingFit power = fit_power_per_capita(train);

        double fold_add = 0.0, fold_pow = 0.0;
        for (std::size_t i : held) {
            const auto& rec = d.records[i];
            const double w = std::log(rec.per_capita_output());
            double pred = gam.intercept + gam.size_exponent * std::log(rec.population);
            for (std::size_t j = 0; j < gam.partials.size(); ++j)
                pred += gam.partial_value(j, *rec.sector_shares[gam.partials[j].sector_index]);
            const double ea = w - pred;
            const double ep = w - predict_log_per_capita(power, rec.population);
            fold_add += ea * ea;
            fold_pow += ep * ep;
        }
        out.additive_fold_mse.push_back(fold_add / static_cast<double>(held.size()));
        out.power_fold_mse.push_back(fold_pow / static_cast<double>(held.size()));
        add_sse += fold_add;
        pow_sse += fold_pow;
        count += held.size();
    }
    out.additive_mse = add_sse / static_cast<double>(count);
    out.power_mse = pow_sse / static_cast<double>(count);
    return out;
}

}  // namespace metroscale
