#include "metroscale/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "metroscale/errors.hpp"
#include "metroscale/model_eval.hpp"
#include "metroscale/rng.hpp"

namespace metroscale {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

double log_normal_density(double x, double mean, double sigma) {
    const double z = (x - mean) / sigma;
    return -0.5 * (kLogTwoPi + z * z) - std::log(sigma);
}

struct EmRun {
    std::vector<double> weights, intercepts, slopes, sigmas;
    std::vector<std::vector<double>> resp;
    double loglik = -std::numeric_limits<double>::infinity();
    bool converged = false;
    bool degenerate = false;
    int iterations = 0;
    std::vector<double> trace;
};

// One EM run from a random responsibility assignment.
EmRun run_em(const std::vector<double>& u, const std::vector<double>& w, std::size_t K,
             const EmSettings& s, Rng& rng) {
    const std::size_t n = u.size();
    EmRun run;
    run.weights.assign(K, 1.0 / static_cast<double>(K));
    run.intercepts.assign(K, 0.0);
    run.slopes.assign(K, 0.0);
    run.sigmas.assign(K, 1.0);
    run.resp.assign(n, std::vector<double>(K, 0.0));

    for (std::size_t i = 0; i < n; ++i) {
        double total = 0.0;
        for (std::size_t z = 0; z < K; ++z) {
            run.resp[i][z] = 0.1 + rng.uniform();
            total += run.resp[i][z];
        }
        for (std::size_t z = 0; z < K; ++z) run.resp[i][z] /= total;
    }

    for (int iter = 0; iter < s.max_iterations; ++iter) {
        run.iterations = iter + 1;
        // M-step: weighted OLS per component.
        for (std::size_t z = 0; z < K; ++z) {
            double wsum = 0.0, su = 0.0, sw = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                wsum += run.resp[i][z];
                su += run.resp[i][z] * u[i];
                sw += run.resp[i][z] * w[i];
            }
            if (wsum < 1e-10) {
                run.degenerate = true;
                return run;
            }
            const double mu = su / wsum, mw = sw / wsum;
            double sxx = 0.0, sxy = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                sxx += run.resp[i][z] * (u[i] - mu) * (u[i] - mu);
                sxy += run.resp[i][z] * (u[i] - mu) * (w[i] - mw);
            }
            const double slope = (sxx > 0.0) ? sxy / sxx : 0.0;
            const double intercept = mw - slope * mu;
            double rss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double e = w[i] - intercept - slope * u[i];
                rss += run.resp[i][z] * e * e;
            }
            run.weights[z] = wsum / static_cast<double>(n);
            run.intercepts[z] = intercept;
            run.slopes[z] = slope;
            run.sigmas[z] = std::sqrt(rss / wsum);
            if (!(run.sigmas[z] > s.sigma_floor)) {
                run.degenerate = true;
                return run;
            }
        }
        // E-step with the log-sum-exp trick.
        double loglik = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double max_term = -std::numeric_limits<double>::infinity();
            std::vector<double>& r = run.resp[i];
            for (std::size_t z = 0; z < K; ++z) {
                r[z] = std::log(run.weights[z]) +
                       log_normal_density(w[i], run.intercepts[z] + run.slopes[z] * u[i],
                                          run.sigmas[z]);
                max_term = std::max(max_term, r[z]);
            }
            double total = 0.0;
            for (std::size_t z = 0; z < K; ++z) total += std::exp(r[z] - max_term);
            loglik += max_term + std::log(total);
            for (std::size_t z = 0; z < K; ++z)
                r[z] = std::exp(r[z] - max_term) / total;
        }
        run.trace.push_back(loglik);
        const double prev = run.loglik;
        run.loglik = loglik;
        if (std::isfinite(prev) &&
            std::fabs(loglik - prev) <= s.tolerance * (std::fabs(prev) + 1.0)) {
            run.converged = true;
            break;
        }
    }
    return run;
}

}  // namespace

MixtureFit fit_mixture(const Dataset& d, std::size_t K, const EmSettings& s) {
    if (K < 1) throw DomainError("K must be at least 1");
    const std::size_t n = d.size();
    if (n < 5 * K) throw ValidationError("mixture fit needs n >= 5K");
    const std::vector<double> u = d.log_populations();
    const std::vector<double> w = d.log_per_capita();

    EmRun best;
    bool any = false;
    for (int r = 0; r < std::max(s.restarts, 1); ++r) {
        Rng rng = Rng::stream(s.seed, static_cast<std::uint64_t>(r));
        EmRun run = run_em(u, w, K, s, rng);
        if (run.degenerate) continue;
        if (!any || run.loglik > best.loglik) {
            best = std::move(run);
            any = true;
        }
    }
    if (!any) throw FitError("all mixture restarts degenerate");

    // Sort components by intercept for a permutation-invariant report.
    std::vector<std::size_t> order(K);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return best.intercepts[a] < best.intercepts[b];
    });

    MixtureFit fit;
    fit.K = K;
    fit.seed = s.seed;
    fit.converged = best.converged;
    fit.iterations = best.iterations;
    fit.log_likelihood = best.loglik;
    fit.log_likelihood_trace = best.trace;
    const double p = 4.0 * static_cast<double>(K) - 1.0;
    fit.bic = -2.0 * best.loglik + p * std::log(static_cast<double>(n));
    for (std::size_t z : order) {
        fit.weights.push_back(best.weights[z]);
        fit.intercepts.push_back(best.intercepts[z]);
        fit.slopes.push_back(best.slopes[z]);
        fit.sigmas.push_back(best.sigmas[z]);
    }
    fit.responsibilities.assign(n, std::vector<double>(K, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t zi = 0; zi < K; ++zi)
            fit.responsibilities[i][zi] = best.resp[i][order[zi]];
    return fit;
}

double mixture_log_density(const MixtureFit& fit, double log_pop, double log_pc) {
    double max_term = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(fit.K);
    for (std::size_t z = 0; z < fit.K; ++z) {
        terms[z] = std::log(fit.weights[z]) +
                   log_normal_density(log_pc, fit.intercepts[z] + fit.slopes[z] * log_pop,
                                      fit.sigmas[z]);
        max_term = std::max(max_term, terms[z]);
    }
    double total = 0.0;
    for (double t : terms) total += std::exp(t - max_term);
    return max_term + std::log(total);
}

ComponentSelection select_components(const Dataset& d, std::size_t K_max, int folds,
                                     int restarts, std::uint64_t seed) {
    if (K_max < 1) throw DomainError("K_max must be at least 1");
    ComponentSelection sel;
    const std::vector<int> fold = fold_assignment(d, folds, seed);

    double best_bic = std::numeric_limits<double>::infinity();
    double best_cv = -std::numeric_limits<double>::infinity();
    for (std::size_t K = 1; K <= K_max; ++K) {
        EmSettings s;
        s.restarts = restarts;
        s.seed = mix64(seed ^ (0xabcdULL + K));
        MixtureFit full;
        try {
            full = fit_mixture(d, K, s);
        } catch (const Error&) {
            sel.failed_K.push_back(K);
            continue;
        }
        double cv = 0.0;
        bool cv_ok = true;
        for (int f = 0; f < folds && cv_ok; ++f) {
            Dataset train;
            train.label = d.label;
            std::vector<std::size_t> held;
            for (std::size_t i = 0; i < d.size(); ++i) {
                if (fold[i] == f) held.push_back(i);
                else train.records.push_back(d.records[i]);
            }
            if (held.empty()) continue;
            try {
                const MixtureFit m = fit_mixture(train, K, s);
                for (std::size_t i : held)
                    cv += mixture_log_density(m, std::log(d.records[i].population),
                                              std::log(d.records[i].per_capita_output()));
            } catch (const Error&) {
                cv_ok = false;
            }
        }
        if (!cv_ok) {
            sel.failed_K.push_back(K);
            continue;
        }
        sel.K_values.push_back(K);
        sel.bic.push_back(full.bic);
        sel.cv_loglik.push_back(cv);
        if (full.bic < best_bic) {
            best_bic = full.bic;
            sel.chosen_by_bic = K;
        }
        if (cv > best_cv) {
            best_cv = cv;
            sel.chosen_by_cv = K;
        }
    }
    if (sel.K_values.empty()) throw FitError("no mixture order could be fit");
    return sel;
}

}  // namespace metroscale
