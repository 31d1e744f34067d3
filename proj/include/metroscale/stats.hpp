#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "metroscale/errors.hpp"

namespace metroscale::stats {

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Population variance (denominator n).
inline double variance_n(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
}

// Sample variance (denominator n-1).
inline double variance(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

inline double rms(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s / static_cast<double>(v.size()));
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw DomainError("median of empty vector");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Empirical quantile by the nearest-rank (ceil) convention: the smallest
// order statistic whose rank is at least p*n.
inline double quantile_nearest_rank(std::vector<double> v, double p) {
    if (v.empty()) throw DomainError("quantile of empty vector");
    std::sort(v.begin(), v.end());
    const double np = p * static_cast<double>(v.size());
    std::size_t rank = static_cast<std::size_t>(std::ceil(np));
    if (rank < 1) rank = 1;
    if (rank > v.size()) rank = v.size();
    return v[rank - 1];
}

// Interpolating quantile (R type 7); used where no order-statistic
// convention is pinned, e.g. IQR for bandwidths and initializations.
inline double quantile_interp(std::vector<double> v, double p) {
    if (v.empty()) throw DomainError("quantile of empty vector");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 1) return v[0];
    const double h = (static_cast<double>(n) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = h - static_cast<double>(lo);
    return v[lo] + frac * (v[hi] - v[lo]);
}

inline double iqr(const std::vector<double>& v) {
    return quantile_interp(v, 0.75) - quantile_interp(v, 0.25);
}

// Midranks: ties get the average of the ranks they span; ranks are 1-based.
inline std::vector<double> midranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double r = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw DomainError("pearson: mismatched or too-short vectors");
    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) throw DomainError("pearson: constant vector");
    return sxy / std::sqrt(sxx * syy);
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    return pearson(midranks(x), midranks(y));
}

inline double standard_normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

}  // namespace metroscale::stats
