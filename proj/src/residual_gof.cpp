#include "metroscale/residual_gof.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "metroscale/errors.hpp"
#include "metroscale/rng.hpp"
#include "metroscale/stats.hpp"

namespace metroscale {

namespace {

constexpr std::size_t kMaxDimension = 10;

struct LocationScale {
    double location = 0.0;
    double scale = 0.0;
};

LocationScale mle(const std::vector<double>& x, GofFamily family) {
    LocationScale ls;
    if (family == GofFamily::Gaussian) {
        ls.location = stats::mean(x);
        ls.scale = std::sqrt(stats::variance_n(x));
    } else {
        ls.location = stats::median(x);
        double mad = 0.0;
        for (double v : x) mad += std::fabs(v - ls.location);
        ls.scale = mad / static_cast<double>(x.size());
    }
    return ls;
}

double cdf(double x, const LocationScale& ls, GofFamily family) {
    if (family == GofFamily::Gaussian)
        return stats::standard_normal_cdf((x - ls.location) / ls.scale);
    const double z = (x - ls.location) / ls.scale;
    return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
}

// Normalized Legendre polynomials on [0,1]: phi_j(u) = sqrt(2j+1) P_j(2u-1).
void legendre_components(const std::vector<double>& u, std::vector<double>& m) {
    const std::size_t n = u.size();
    m.assign(kMaxDimension, 0.0);
    for (double ui : u) {
        const double t = 2.0 * ui - 1.0;
        double p_prev = 1.0, p = t;
        for (std::size_t j = 1; j <= kMaxDimension; ++j) {
            m[j - 1] += std::sqrt(2.0 * static_cast<double>(j) + 1.0) * p;
            const double jj = static_cast<double>(j);
            const double p_next = ((2.0 * jj + 1.0) * t * p - jj * p_prev) / (jj + 1.0);
            p_prev = p;
            p = p_next;
        }
    }
    for (double& v : m) v /= static_cast<double>(n);
}

struct Statistic {
    std::size_t dimension = 1;
    double value = 0.0;
    std::vector<double> components;
};

Statistic smooth_statistic(const std::vector<double>& x, GofFamily family) {
    const std::size_t n = x.size();
    const LocationScale ls = mle(x, family);
    if (!(ls.scale > 0.0)) throw FitError("degenerate residual scale");
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = cdf(x[i], ls, family);

    std::vector<double> m;
    legendre_components(u, m);

    const double penalty = std::log(static_cast<double>(n));
    Statistic best;
    double cumulative = 0.0, best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j <= kMaxDimension; ++j) {
        cumulative += static_cast<double>(n) * m[j - 1] * m[j - 1];
        const double score = cumulative - static_cast<double>(j) * penalty;
        if (score > best_score) {
            best_score = score;
            best.dimension = j;
            best.value = cumulative;
        }
    }
    best.components.assign(m.begin(), m.begin() + best.dimension);
    return best;
}

double draw(Rng& rng, const LocationScale& ls, GofFamily family) {
    if (family == GofFamily::Gaussian) return rng.normal(ls.location, ls.scale);
    return rng.laplace(ls.location, ls.scale);
}

}  // namespace

std::string family_name(GofFamily f) {
    return f == GofFamily::Gaussian ? "gaussian" : "laplace";
}

DistributionFit fit_gaussian_mle(const std::vector<double>& residuals) {
    if (residuals.size() < 2) throw ValidationError("need at least 2 residuals");
    const LocationScale ls = mle(residuals, GofFamily::Gaussian);
    return {ls.location, ls.scale, -1.0};
}

DistributionFit fit_laplace_mle(const std::vector<double>& residuals) {
    if (residuals.size() < 2) throw ValidationError("need at least 2 residuals");
    const LocationScale ls = mle(residuals, GofFamily::Laplace);
    return {ls.location, ls.scale, -1.0};
}

KdeEstimate kernel_density(const std::vector<double>& residuals) {
    const std::size_t n = residuals.size();
    if (n < 2) throw ValidationError("need at least 2 residuals");
    const double sd = std::sqrt(stats::variance_n(residuals));
    const double spread = std::min(sd, stats::iqr(residuals) / 1.34);
    if (!(spread > 0.0)) throw FitError("degenerate residual spread for KDE");
    KdeEstimate kde;
    kde.bandwidth =
        0.9 * spread * std::pow(static_cast<double>(n), -0.2);  // Silverman
    const auto [lo_it, hi_it] = std::minmax_element(residuals.begin(), residuals.end());
    const double lo = *lo_it - 3.0 * kde.bandwidth;
    const double hi = *hi_it + 3.0 * kde.bandwidth;
    constexpr std::size_t kGridSize = 512;
    kde.grid.resize(kGridSize);
    kde.density.resize(kGridSize);
    const double norm =
        1.0 / (static_cast<double>(n) * kde.bandwidth * std::sqrt(2.0 * M_PI));
    for (std::size_t g = 0; g < kGridSize; ++g) {
        const double x =
            lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(kGridSize - 1);
        double s = 0.0;
        for (double r : residuals) {
            const double z = (x - r) / kde.bandwidth;
            s += std::exp(-0.5 * z * z);
        }
        kde.grid[g] = x;
        kde.density[g] = norm * s;
    }
    return kde;
}

GofReport fit_residual_distributions(const std::vector<double>& residuals) {
    GofReport report;
    report.gaussian = fit_gaussian_mle(residuals);
    report.laplace = fit_laplace_mle(residuals);
    report.kde = kernel_density(residuals);
    return report;
}

SmoothTestResult smooth_test(const std::vector<double>& residuals, GofFamily family,
                             int replicates, std::uint64_t seed) {
    const std::size_t n = residuals.size();
    if (n < 8) throw ValidationError("smooth test needs at least 8 residuals");
    if (replicates < 1) throw DomainError("smooth test needs at least 1 replicate");

    const Statistic observed = smooth_statistic(residuals, family);
    const LocationScale ls = mle(residuals, family);

    int exceed = 0;
    std::vector<double> sample(n);
    for (int r = 0; r < replicates; ++r) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
        for (std::size_t i = 0; i < n; ++i) sample[i] = draw(rng, ls, family);
        const Statistic rep = smooth_statistic(sample, family);
        if (rep.value >= observed.value) ++exceed;
    }

    SmoothTestResult out;
    out.family = family;
    out.dimension = observed.dimension;
    out.statistic = observed.value;
    out.components = observed.components;
    out.replicates = replicates;
    out.seed = seed;
    out.p_value =
        (1.0 + static_cast<double>(exceed)) / (static_cast<double>(replicates) + 1.0);
    return out;
}

double rank_comparison(const std::vector<double>& residuals,
                       const std::vector<double>& per_capita) {
    if (residuals.size() != per_capita.size())
        throw ValidationError("rank comparison: length mismatch");
    return stats::spearman(residuals, per_capita);
}

}  // namespace metroscale
