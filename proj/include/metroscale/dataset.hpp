#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace metroscale {

inline constexpr std::size_t kNumSectors = 4;

// One observation unit: a metropolitan area in a given year.
// aggregate_output is stored in dollars per year after deflation.
struct CityRecord {
    std::string id;
    std::string name;
    double population = 0.0;
    double aggregate_output = 0.0;
    std::array<std::optional<double>, kNumSectors> sector_shares{};

    double per_capita_output() const { return aggregate_output / population; }

    bool has_all_shares() const {
        for (const auto& s : sector_shares)
            if (!s) return false;
        return true;
    }
};

// Immutable after construction; record order is stable and meaningful
// (fold assignment and reporting depend on it).
struct Dataset {
    std::vector<CityRecord> records;
    std::string label;
    double deflator = 1.0;

    std::size_t size() const { return records.size(); }

    std::vector<double> populations() const;
    std::vector<double> aggregate_outputs() const;
    std::vector<double> per_capita_outputs() const;
    std::vector<double> log_populations() const;
    std::vector<double> log_per_capita() const;
    std::vector<double> log_aggregate() const;
};

// Column-name mapping for city CSV files.  Sector columns are optional;
// an empty name means "no such column".
struct CsvSchema {
    std::string id = "id";
    std::string name = "name";
    std::string population = "population";
    std::string output = "output";
    std::array<std::string, kNumSectors> sectors = {
        "share_ict", "share_finance", "share_prof_services", "share_management"};
};

// Parses a small key=value file ('#' comments allowed) overriding the
// default column names; keys: id, name, population, output, sector1..4.
CsvSchema load_schema(const std::string& path);

// Loads and validates a city CSV.  Outputs are multiplied by the deflator.
// Rows with non-positive population or output are rejected collectively,
// with the offending ids listed in the error message.  Missing sector
// cells (empty fields) stay missing.
Dataset load_city_csv(const std::string& path, double deflator,
                      const CsvSchema& schema = {}, const std::string& label = "");

// Inverse of load_city_csv at deflator 1 up to numeric formatting.
void save_city_csv(const std::string& path, const Dataset& d,
                   const CsvSchema& schema = {});

// Records with all four sector shares present, order preserved.
Dataset complete_sector_subset(const Dataset& d);

// One timed-walk observation; course_length_m is fixed by the source study.
struct SpeedRecord {
    std::string location;
    double population = 0.0;
    double mean_time_s = 0.0;
    double sd_time_s = 0.0;
    double course_length_m = 15.2;

    double speed() const { return course_length_m / mean_time_s; }
    // First-order error propagation through v = L / t.
    double speed_sd() const {
        return course_length_m * sd_time_s / (mean_time_s * mean_time_s);
    }
};

// Loads the bundled walking-speed table (location, population, mean and sd
// of the time to walk the course).
std::vector<SpeedRecord> load_speed_fixture(const std::string& path);

}  // namespace metroscale
