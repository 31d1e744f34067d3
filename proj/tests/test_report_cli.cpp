#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "metroscale/model_eval.hpp"
#include "metroscale/report.hpp"
#include "metroscale/svg.hpp"
#include "support/synthetic.hpp"

using namespace metroscale;
using testsupport::power_law_dataset;

TEST_CASE("seeded comparison serializes byte-identically across runs") {
    const Dataset d = power_law_dataset(80, 150.0, 1.12, 0.25, 1);
    const auto run = [&] {
        const auto cmp = compare_models(
            d, {ModelKind::PowerPerCapita, ModelKind::Logarithmic,
                ModelKind::Logistic, ModelKind::Spline},
            6, 42);
        return report::render_json("test", report::to_json(cmp));
    };
    const std::string a = run();
    const std::string b = run();
    CHECK(a == b);
    CHECK(a.find("\"schema_version\": 1") != std::string::npos);
}

TEST_CASE("bootstrap JSON carries the seed and CI fields") {
    const Dataset d = power_law_dataset(60, 150.0, 1.1, 0.2, 2);
    const auto boot = bootstrap_exponent(d, 50, 9);
    const auto j = report::to_json(boot);
    CHECK(j["seed"] == 9);
    CHECK(j["replicates"] == 50);
    CHECK(j.contains("ci_low"));
    CHECK(j.contains("ci_high"));
}

TEST_CASE("write_json emits parseable versioned output") {
    const Dataset d = power_law_dataset(40, 150.0, 1.1, 0.2, 3);
    const auto fit = fit_model(d, ModelKind::PowerPerCapita);
    const std::string path = "report_test.json";
    report::write_json(path, "label-x", report::to_json(fit, false));
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    const auto parsed = nlohmann::json::parse(buf.str());
    CHECK(parsed["schema_version"] == report::kSchemaVersion);
    CHECK(parsed["label"] == "label-x");
    CHECK(parsed["payload"]["model"] == "power");
    std::remove(path.c_str());
}

TEST_CASE("svg figure renders points, lines, and log ticks") {
    svg::Figure fig("demo", "population", "output", true, true);
    fig.add_points({1e3, 1e4, 1e5}, {10.0, 100.0, 1000.0}, "#000000");
    fig.add_line({1e3, 1e5}, {10.0, 1000.0}, "#ff0000");
    const std::string s = fig.render();
    CHECK(s.find("<svg") != std::string::npos);
    CHECK(s.find("circle") != std::string::npos);
    CHECK(s.find("polyline") != std::string::npos);
    CHECK(s.find("demo") != std::string::npos);
    // Log ticks at powers of ten.
    CHECK(s.find("10000") != std::string::npos);
    // Deterministic rendering.
    CHECK(s == fig.render());
}

TEST_CASE("svg band stays between its envelopes and writes to disk") {
    svg::Figure fig("band", "x", "y");
    fig.add_band({0.0, 1.0, 2.0}, {-1.0, -0.5, -1.0}, {1.0, 0.5, 1.0}, "#00ff00");
    fig.add_line({0.0, 1.0, 2.0}, {0.0, 0.0, 0.0}, "#000000");
    const std::string path = "band_test.svg";
    fig.write(path);
    std::ifstream in(path);
    CHECK(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str().find("fill-opacity") != std::string::npos);
    std::remove(path.c_str());
}
