#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "metroscale/dataset.hpp"
#include "metroscale/rng.hpp"

namespace metroscale::testsupport {

// Dataset with Y = c * N^b * exp(noise), populations log-spaced.
inline Dataset power_law_dataset(std::size_t n, double c, double b,
                                 double noise_sd, std::uint64_t seed,
                                 double n_lo = 5e4, double n_hi = 2e7) {
    Dataset d;
    d.label = "synthetic";
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        CityRecord rec;
        rec.id = "s" + std::to_string(i);
        rec.population =
            n_lo * std::pow(n_hi / n_lo,
                            n == 1 ? 0.0
                                   : static_cast<double>(i) /
                                         static_cast<double>(n - 1));
        rec.aggregate_output =
            c * std::pow(rec.population, b) * std::exp(noise_sd * rng.normal());
        d.records.push_back(std::move(rec));
    }
    return d;
}

// Dataset whose per-capita output follows y = r ln(N/k) exactly.
inline Dataset logarithmic_dataset(std::size_t n, double r, double k,
                                   double noise_sd, std::uint64_t seed) {
    Dataset d;
    d.label = "synthetic-log";
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        CityRecord rec;
        rec.id = "l" + std::to_string(i);
        rec.population =
            5e4 * std::pow(400.0, static_cast<double>(i) /
                                      static_cast<double>(n - 1));
        const double y = r * std::log(rec.population / k) *
                         std::exp(noise_sd * rng.normal());
        rec.aggregate_output = y * rec.population;
        d.records.push_back(std::move(rec));
    }
    return d;
}

// ln y = d1 + d2 / (1 + exp(-(N - d3)/d4)), optionally noisy.
inline Dataset logistic_dataset(std::size_t n, double d1, double d2, double d3,
                                double d4, double noise_sd, std::uint64_t seed) {
    Dataset d;
    d.label = "synthetic-logistic";
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        CityRecord rec;
        rec.id = "g" + std::to_string(i);
        rec.population =
            5e4 * std::pow(400.0, static_cast<double>(i) /
                                      static_cast<double>(n - 1));
        const double s = 1.0 / (1.0 + std::exp(-(rec.population - d3) / d4));
        const double lny = d1 + d2 * s + noise_sd * rng.normal();
        rec.aggregate_output = std::exp(lny) * rec.population;
        d.records.push_back(std::move(rec));
    }
    return d;
}

// Additive design: ln y = a + b ln N + sum_j f_j(x_j) + noise with known
// monotone component functions and sector shares that vary independently.
inline Dataset additive_dataset(std::size_t n, double intercept, double b,
                                double noise_sd, std::uint64_t seed) {
    Dataset d;
    d.label = "synthetic-additive";
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        CityRecord rec;
        rec.id = "a" + std::to_string(i);
        rec.population = 5e4 * std::exp(5.5 * rng.uniform());
        const double u = std::log(rec.population);
        std::array<double, kNumSectors> x{};
        for (std::size_t j = 0; j < kNumSectors; ++j) {
            x[j] = 0.01 + 0.08 * rng.uniform();
            rec.sector_shares[j] = x[j];
        }
        double lny = intercept + b * u + noise_sd * rng.normal();
        lny += 4.0 * x[0];                       // linear component
        lny += 2.0 * std::sqrt(x[1]);            // concave component
        lny += 30.0 * x[2] * x[2];               // convex component
        lny += 1.5 * std::log1p(10.0 * x[3]);    // saturating component
        rec.aggregate_output = std::exp(lny) * rec.population;
        d.records.push_back(std::move(rec));
    }
    return d;
}

// Two regression lines with equal slope and intercepts differing by `gap`.
inline Dataset two_component_dataset(std::size_t n, double slope, double gap,
                                     double sigma, std::uint64_t seed,
                                     std::vector<int>* labels = nullptr) {
    Dataset d;
    d.label = "synthetic-mixture";
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        CityRecord rec;
        rec.id = "m" + std::to_string(i);
        rec.population = 5e4 * std::exp(5.5 * rng.uniform());
        const int z = (rng.uniform() < 0.5) ? 0 : 1;
        if (labels) labels->push_back(z);
        const double lny = 1.0 + gap * z + slope * std::log(rec.population) +
                           sigma * rng.normal();
        rec.aggregate_output = std::exp(lny) * rec.population;
        d.records.push_back(std::move(rec));
    }
    return d;
}

}  // namespace metroscale::testsupport
