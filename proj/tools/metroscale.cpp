#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "metroscale/csv.hpp"
#include "metroscale/dataset.hpp"
#include "metroscale/errors.hpp"
#include "metroscale/hierarchy_gam.hpp"
#include "metroscale/mixture.hpp"
#include "metroscale/model_eval.hpp"
#include "metroscale/report.hpp"
#include "metroscale/rng.hpp"
#include "metroscale/residual_gof.hpp"
#include "metroscale/scaling_models.hpp"
#include "metroscale/stats.hpp"
#include "metroscale/surrogate.hpp"
#include "metroscale/svg.hpp"

namespace fs = std::filesystem;
using metroscale::report::Json;

namespace {

struct RunConfig {
    std::string input;
    std::string label;
    std::string schema_path;
    double deflator = 1.0;
    std::vector<std::string> models = {"power", "logarithmic", "logistic", "spline"};
    int folds = 6;
    std::size_t bootstrap = 1000;
    std::size_t surrogates = 1000;
    std::size_t k_max = 10;
    std::uint64_t seed = 0;
    std::string out = ".";
    bool figures = false;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void write_columns(const std::string& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns) {
    metroscale::csv::Table table;
    table.header = header;
    const std::size_t n = columns.empty() ? 0 : columns.front().size();
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::string> row;
        row.reserve(columns.size());
        for (const auto& col : columns) row.push_back(fmt(col[i]));
        table.rows.push_back(std::move(row));
    }
    metroscale::csv::write_file(path, table);
}

metroscale::Dataset load_input(const RunConfig& cfg) {
    metroscale::CsvSchema schema;
    if (!cfg.schema_path.empty()) schema = metroscale::load_schema(cfg.schema_path);
    return metroscale::load_city_csv(cfg.input, cfg.deflator, schema, cfg.label);
}

std::vector<metroscale::ModelKind> parse_models(const std::vector<std::string>& names) {
    std::vector<metroscale::ModelKind> kinds;
    for (const auto& name : names) kinds.push_back(metroscale::model_from_name(name));
    return kinds;
}

std::vector<double> population_grid(const metroscale::Dataset& d, std::size_t points) {
    const auto pops = d.populations();
    const double lo = *std::min_element(pops.begin(), pops.end());
    const double hi = *std::max_element(pops.begin(), pops.end());
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i)
        grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) /
                                             static_cast<double>(points - 1));
    return grid;
}

const std::vector<std::string> kCurveColors = {"#d62728", "#1f77b4", "#2ca02c",
                                               "#9467bd"};

double aggregate_r_squared(const metroscale::ScalingFit& fit,
                           const metroscale::Dataset& d) {
    const double rms = fit.rms_log();
    return 1.0 - rms * rms / metroscale::stats::variance_n(d.log_aggregate());
}

// ---- figures ---------------------------------------------------------------

void figure_aggregate(const metroscale::Dataset& d, const metroscale::ScalingFit& fit,
                      const fs::path& out) {
    const auto grid = population_grid(d, 100);
    std::vector<double> curve;
    for (double nn : grid) curve.push_back(std::exp(metroscale::predict_log_aggregate(
        fit, nn)));
    metroscale::svg::Figure fig("Aggregate output vs population", "population",
                                "aggregate output ($/yr)", true, true);
    fig.add_points(d.populations(), d.aggregate_outputs(), "#444444");
    fig.add_line(grid, curve, kCurveColors[0]);
    fig.write((out / "fig_aggregate.svg").string());
    write_columns((out / "fig_aggregate.csv").string(),
                  {"population", "aggregate_output", "fitted_aggregate"},
                  {d.populations(), d.aggregate_outputs(),
                   [&] {
                       std::vector<double> f;
                       for (double nn : d.populations())
                           f.push_back(std::exp(
                               metroscale::predict_log_aggregate(fit, nn)));
                       return f;
                   }()});
}

void figure_per_capita(const metroscale::Dataset& d,
                       const std::vector<metroscale::ScalingFit>& fits,
                       const std::string& stem, const std::string& y_label,
                       const fs::path& out, bool aggregate_scale) {
    const auto grid = population_grid(d, 100);
    metroscale::svg::Figure fig(
        aggregate_scale ? "Extrapolated aggregate curves" : "Per-capita output",
        "population", y_label, true, aggregate_scale);
    fig.add_points(d.populations(),
                   aggregate_scale ? d.aggregate_outputs() : d.per_capita_outputs(),
                   "#444444");
    std::vector<std::string> header = {"population"};
    std::vector<std::vector<double>> columns = {grid};
    for (std::size_t m = 0; m < fits.size(); ++m) {
        std::vector<double> curve;
        for (double nn : grid)
            curve.push_back(std::exp(
                aggregate_scale ? metroscale::predict_log_aggregate(fits[m], nn)
                                : metroscale::predict_log_per_capita(fits[m], nn)));
        fig.add_line(grid, curve, kCurveColors[m % kCurveColors.size()]);
        header.push_back(metroscale::model_name(fits[m].model_kind));
        columns.push_back(std::move(curve));
    }
    fig.write((out / (stem + ".svg")).string());
    write_columns((out / (stem + ".csv")).string(), header, columns);
}

void figure_surrogate(const metroscale::SurrogateSummary& summary,
                      const fs::path& out) {
    // 30-bin histogram of the refit exponents.
    const auto& x = summary.exponents;
    const double lo = *std::min_element(x.begin(), x.end());
    const double hi = *std::max_element(x.begin(), x.end());
    constexpr int kBins = 30;
    const double w = (hi - lo) / kBins > 0 ? (hi - lo) / kBins : 1.0;
    std::vector<double> centers(kBins), counts(kBins, 0.0);
    for (int b = 0; b < kBins; ++b) centers[b] = lo + (b + 0.5) * w;
    for (double v : x) {
        int b = static_cast<int>((v - lo) / w);
        counts[std::clamp(b, 0, kBins - 1)] += 1.0;
    }
    metroscale::svg::Figure fig("Surrogate refit exponents", "exponent", "count");
    fig.add_line(centers, counts, kCurveColors[1]);
    fig.write((out / "fig_surrogate_exponents.svg").string());
    write_columns((out / "fig_surrogate_exponents.csv").string(),
                  {"bin_center", "count"}, {centers, counts});
}

void figure_gam(const metroscale::AdditiveFit& fit, const metroscale::Dataset& d,
                const fs::path& out) {
    for (std::size_t j = 0; j < fit.partials.size(); ++j) {
        const auto& comp = fit.partials[j];
        const auto& knots = comp.smooth.knots;
        std::vector<double> lo(knots.size()), hi(knots.size());
        for (std::size_t t = 0; t < knots.size(); ++t) {
            lo[t] = comp.smooth.values[t] - 2.0 * comp.knot_se[t];
            hi[t] = comp.smooth.values[t] + 2.0 * comp.knot_se[t];
        }
        std::vector<double> shares;
        for (const auto& rec : d.records)
            shares.push_back(*rec.sector_shares[comp.sector_index]);
        const std::string stem =
            "fig_gam_sector" + std::to_string(comp.sector_index + 1);
        metroscale::svg::Figure fig("Partial response, sector " +
                                        std::to_string(comp.sector_index + 1),
                                    "sector share", "partial effect (ln $)");
        fig.add_band(knots, lo, hi, kCurveColors[2]);
        fig.add_points(shares, comp.partial_residuals, "#444444", 2.0);
        fig.add_line(knots, comp.smooth.values, kCurveColors[2]);
        fig.write((out / (stem + ".svg")).string());
        write_columns((out / (stem + ".csv")).string(),
                      {"share", "partial_effect", "se_low", "se_high"},
                      {knots, comp.smooth.values, lo, hi});
    }
}

void figure_residuals(const metroscale::GofReport& gof, const fs::path& out) {
    const auto& grid = gof.kde.grid;
    std::vector<double> gauss(grid.size()), laplace(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double zg = (grid[i] - gof.gaussian.location) / gof.gaussian.scale;
        gauss[i] = std::exp(-0.5 * zg * zg) /
                   (gof.gaussian.scale * std::sqrt(2.0 * M_PI));
        laplace[i] = std::exp(-std::fabs(grid[i] - gof.laplace.location) /
                              gof.laplace.scale) /
                     (2.0 * gof.laplace.scale);
    }
    metroscale::svg::Figure fig("Residual density", "residual (ln scale)", "density");
    fig.add_line(grid, gof.kde.density, "#444444");
    fig.add_line(grid, gauss, kCurveColors[0]);
    fig.add_line(grid, laplace, kCurveColors[1]);
    fig.write((out / "fig_residual_density.svg").string());
    write_columns((out / "fig_residual_density.csv").string(),
                  {"residual", "kde", "gaussian", "laplace"},
                  {grid, gof.kde.density, gauss, laplace});
}

void figure_pace(const std::vector<metroscale::SpeedRecord>& records,
                 const metroscale::SpeedFits& fits, const fs::path& out) {
    std::vector<double> pops, speeds;
    for (const auto& r : records) {
        pops.push_back(r.population);
        speeds.push_back(r.speed());
    }
    const double lo = *std::min_element(pops.begin(), pops.end());
    const double hi = *std::max_element(pops.begin(), pops.end());
    std::vector<double> grid(100);
    for (std::size_t i = 0; i < grid.size(); ++i)
        grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / 99.0);
    metroscale::svg::Figure fig("Walking speed vs population", "population",
                                "speed (m/s)", true, false);
    fig.add_points(pops, speeds, "#444444");
    std::vector<std::string> header = {"population"};
    std::vector<std::vector<double>> columns = {grid};
    const metroscale::ScalingFit* all[] = {&fits.power, &fits.logarithmic,
                                           &fits.logistic};
    for (std::size_t m = 0; m < 3; ++m) {
        std::vector<double> curve;
        for (double nn : grid)
            curve.push_back(std::exp(metroscale::predict_log_per_capita(*all[m], nn)));
        fig.add_line(grid, curve, kCurveColors[m]);
        header.push_back(metroscale::model_name(all[m]->model_kind));
        columns.push_back(std::move(curve));
    }
    fig.write((out / "fig_pace.svg").string());
    write_columns((out / "fig_pace.csv").string(), header, columns);
}

// ---- subcommand payloads ---------------------------------------------------

Json run_fit(const RunConfig& cfg, const fs::path& out) {
    const metroscale::Dataset d = load_input(cfg);
    metroscale::NlsSettings nls;
    nls.seed = cfg.seed;
    Json payload;
    for (metroscale::ModelKind kind : parse_models(cfg.models)) {
        const metroscale::ScalingFit fit =
            kind == metroscale::ModelKind::PowerAggregate
                ? metroscale::fit_power_aggregate(d)
                : metroscale::fit_model(d, kind, nls);
        payload[metroscale::model_name(kind)] = metroscale::report::to_json(fit);
    }
    (void)out;
    return payload;
}

Json run_compare(const RunConfig& cfg, const fs::path& out) {
    const metroscale::Dataset d = load_input(cfg);
    const auto kinds = parse_models(cfg.models);
    const metroscale::ComparisonReport cmp =
        metroscale::compare_models(d, kinds, cfg.folds, cfg.seed);
    const metroscale::ScalingFit agg = metroscale::fit_power_aggregate(d);
    const metroscale::BootstrapResult boot =
        metroscale::bootstrap_exponent(d, cfg.bootstrap, cfg.seed);

    Json payload;
    payload["aggregate_power"] = metroscale::report::to_json(agg, false);
    payload["aggregate_power"]["r_squared_log"] = aggregate_r_squared(agg, d);
    payload["bootstrap"] = metroscale::report::to_json(boot);
    payload["comparison"] = metroscale::report::to_json(cmp);
    payload["independence_r2_bound"] = metroscale::independence_r2_bound(d);

    metroscale::NlsSettings nls;
    nls.seed = cfg.seed;
    std::vector<metroscale::ScalingFit> fits;
    Json extrapolated = Json::object();
    for (metroscale::ModelKind kind : kinds) {
        fits.push_back(metroscale::fit_model(d, kind, nls));
        const auto ext = metroscale::extrapolate_to_aggregate(fits.back(), d);
        extrapolated[metroscale::model_name(kind)] = ext.r_squared_log;
    }
    payload["extrapolated_aggregate_r2"] = extrapolated;

    if (cfg.figures) {
        figure_aggregate(d, agg, out);
        figure_per_capita(d, fits, "fig_per_capita", "per-capita output ($/yr)", out,
                          false);
        figure_per_capita(d, fits, "fig_extrapolated", "aggregate output ($/yr)", out,
                          true);
    }
    return payload;
}

Json run_surrogate(const RunConfig& cfg, const fs::path& out) {
    const metroscale::Dataset d = load_input(cfg);
    const metroscale::SurrogateSummary summary =
        metroscale::surrogate_refit_distribution(metroscale::ModelKind::PowerAggregate,
                                                 metroscale::ModelKind::PowerAggregate,
                                                 d, cfg.surrogates, cfg.seed);
    const metroscale::GapTestResult gap =
        metroscale::rms_gap_test(d, cfg.surrogates, cfg.seed);
    Json payload;
    payload["refit_distribution"] = metroscale::report::to_json(summary);
    payload["rms_gap_test"] = metroscale::report::to_json(gap);
    if (cfg.figures) figure_surrogate(summary, out);
    return payload;
}

Json run_gam(const RunConfig& cfg, const fs::path& out) {
    const metroscale::Dataset full = load_input(cfg);
    const metroscale::Dataset d = metroscale::complete_sector_subset(full);
    const metroscale::AdditiveFit with_size = metroscale::fit_additive(d, true);
    const metroscale::AdditiveFit no_size = metroscale::fit_additive(d, false);
    const metroscale::AdditiveCvResult cv =
        metroscale::additive_cv(d, true, cfg.folds, cfg.seed);
    Json payload;
    payload["n_complete"] = d.size();
    payload["fit"] = metroscale::report::to_json(with_size, false);
    payload["fit_without_size"] = metroscale::report::to_json(no_size, false);
    double max_shift = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        max_shift = std::max(max_shift, std::fabs(with_size.fitted_log[i] -
                                                  no_size.fitted_log[i]));
    payload["max_fitted_shift_without_size"] = max_shift;
    payload["cross_validation"] = metroscale::report::to_json(cv);
    if (cfg.figures) figure_gam(with_size, d, out);
    return payload;
}

Json run_mixture(const RunConfig& cfg, const fs::path& out) {
    const metroscale::Dataset d = load_input(cfg);
    const metroscale::ComponentSelection sel = metroscale::select_components(
        d, cfg.k_max, cfg.folds, 20, cfg.seed);
    metroscale::EmSettings em;
    em.seed = metroscale::mix64(cfg.seed ^ (0xabcdULL + sel.chosen_by_bic));
    const metroscale::MixtureFit best =
        metroscale::fit_mixture(d, sel.chosen_by_bic, em);
    Json payload;
    payload["selection"] = metroscale::report::to_json(sel);
    payload["best_fit"] = metroscale::report::to_json(best);

    metroscale::csv::Table resp;
    resp.header = {"id"};
    for (std::size_t z = 0; z < best.K; ++z)
        resp.header.push_back("component_" + std::to_string(z + 1));
    for (std::size_t i = 0; i < d.size(); ++i) {
        std::vector<std::string> row = {d.records[i].id};
        for (std::size_t z = 0; z < best.K; ++z)
            row.push_back(fmt(best.responsibilities[i][z]));
        resp.rows.push_back(std::move(row));
    }
    metroscale::csv::write_file((out / "responsibilities.csv").string(), resp);
    return payload;
}

Json run_residuals(const RunConfig& cfg, const fs::path& out) {
    const metroscale::Dataset d = load_input(cfg);
    const metroscale::ScalingFit agg = metroscale::fit_power_aggregate(d);
    metroscale::GofReport gof =
        metroscale::fit_residual_distributions(agg.residuals_log);
    gof.residual_source = "power_aggregate:" + d.label;
    gof.seed = cfg.seed;
    const int replicates = static_cast<int>(cfg.surrogates);
    gof.gaussian_test = metroscale::smooth_test(
        agg.residuals_log, metroscale::GofFamily::Gaussian, replicates, cfg.seed);
    gof.laplace_test = metroscale::smooth_test(
        agg.residuals_log, metroscale::GofFamily::Laplace, replicates,
        metroscale::mix64(cfg.seed ^ 0x1a1aULL));
    gof.gaussian.p_value = gof.gaussian_test.p_value;
    gof.laplace.p_value = gof.laplace_test.p_value;
    gof.spearman_vs_per_capita =
        metroscale::rank_comparison(agg.residuals_log, d.per_capita_outputs());
    if (cfg.figures) figure_residuals(gof, out);
    return metroscale::report::to_json(gof, false);
}

Json run_pace(const RunConfig& cfg, const fs::path& out) {
    const std::vector<metroscale::SpeedRecord> records =
        metroscale::load_speed_fixture(cfg.input);
    metroscale::NlsSettings nls;
    nls.seed = cfg.seed;
    const metroscale::SpeedFits fits = metroscale::fit_speed_models(records, nls);
    Json payload = metroscale::report::to_json(fits);
    double max_gap = 0.0, max_sd = 0.0;
    for (const auto& rec : records) {
        const double a =
            metroscale::predict_log_per_capita(fits.power, rec.population);
        const double b =
            metroscale::predict_log_per_capita(fits.logarithmic, rec.population);
        const double c =
            metroscale::predict_log_per_capita(fits.logistic, rec.population);
        const double va = std::exp(a), vb = std::exp(b), vc = std::exp(c);
        max_gap = std::max({max_gap, std::fabs(va - vb), std::fabs(va - vc),
                            std::fabs(vb - vc)});
        max_sd = std::max(max_sd, rec.speed_sd());
    }
    payload["max_curve_gap"] = max_gap;
    payload["max_speed_sd"] = max_sd;
    if (cfg.figures) figure_pace(records, fits, out);
    return payload;
}

Json run_report(const RunConfig& cfg, const fs::path& out) {
    Json payload;
    payload["compare"] = run_compare(cfg, out);
    payload["surrogate"] = run_surrogate(cfg, out);
    payload["mixture"] = run_mixture(cfg, out);
    payload["residuals"] = run_residuals(cfg, out);
    // The hierarchy model needs complete sector shares; skip when the input
    // has none.
    const metroscale::Dataset d = load_input(cfg);
    if (metroscale::complete_sector_subset(d).size() >= 30)
        payload["gam"] = run_gam(cfg, out);
    return payload;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scaling-law model comparison for city economic data"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string mode;

    struct Sub {
        const char* name;
        const char* help;
        bool needs_seed;
        Json (*fn)(const RunConfig&, const fs::path&);
    };
    const std::vector<Sub> subs = {
        {"fit", "Fit scaling models and emit parameter JSON", false, run_fit},
        {"compare", "Model comparison table, bootstrap CI, diagnostics", true,
         run_compare},
        {"surrogate", "Surrogate-data refit distribution and RMS-gap test", true,
         run_surrogate},
        {"gam", "Backfitted additive hierarchy model", true, run_gam},
        {"mixture", "Mixture-of-regressions component selection", true, run_mixture},
        {"residuals", "Residual distribution fits and smooth tests", true,
         run_residuals},
        {"pace", "Walking-speed model comparison", false, run_pace},
        {"report", "Run the full pipeline and write one manifest", true, run_report},
    };

    for (const Sub& sub : subs) {
        CLI::App* cmd = app.add_subcommand(sub.name, sub.help);
        cmd->add_option("--input", cfg.input, "Input CSV path")
            ->envname("METROSCALE_INPUT")
            ->required();
        cmd->add_option("--label", cfg.label, "Dataset label")
            ->envname("METROSCALE_LABEL");
        cmd->add_option("--schema", cfg.schema_path, "Column-name schema file")
            ->envname("METROSCALE_SCHEMA");
        cmd->add_option("--deflator", cfg.deflator, "Output deflator")
            ->envname("METROSCALE_DEFLATOR");
        cmd->add_option("--models", cfg.models,
                        "Models: power logarithmic logistic spline power_aggregate")
            ->envname("METROSCALE_MODELS");
        cmd->add_option("--folds", cfg.folds, "Cross-validation folds")
            ->envname("METROSCALE_FOLDS");
        cmd->add_option("--bootstrap", cfg.bootstrap, "Bootstrap replicates")
            ->envname("METROSCALE_BOOTSTRAP");
        cmd->add_option("--surrogates", cfg.surrogates,
                        "Surrogate / test replicates")
            ->envname("METROSCALE_SURROGATES");
        cmd->add_option("--kmax", cfg.k_max, "Largest mixture order to try")
            ->envname("METROSCALE_KMAX");
        auto* seed = cmd->add_option("--seed", cfg.seed, "RNG seed")
                         ->envname("METROSCALE_SEED");
        if (sub.needs_seed) seed->required();
        cmd->add_option("--out", cfg.out, "Output directory")
            ->envname("METROSCALE_OUT");
        cmd->add_flag("--figures", cfg.figures, "Emit SVG figures with CSV siblings")
            ->envname("METROSCALE_FIGURES");
        cmd->callback([&mode, name = std::string(sub.name)] { mode = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const fs::path out(cfg.out);
        fs::create_directories(out);
        for (const auto& sub : subs) {
            if (mode != sub.name) continue;
            Json payload = sub.fn(cfg, out);
            const std::string label = cfg.label.empty() ? cfg.input : cfg.label;
            const fs::path path = out / (mode + ".json");
            metroscale::report::write_json(path.string(), label, std::move(payload));
            std::cout << path.string() << "\n";
        }
        return 0;
    } catch (const metroscale::Error& e) {
        Json err;
        err["error"] = {{"command", mode}, {"message", e.what()}};
        std::cerr << err.dump(2) << "\n";
        return 1;
    } catch (const std::exception& e) {
        Json err;
        err["error"] = {{"command", mode}, {"message", e.what()}};
        std::cerr << err.dump(2) << "\n";
        return 1;
    }
}
