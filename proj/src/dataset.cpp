#include "metroscale/dataset.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "metroscale/csv.hpp"
#include "metroscale/errors.hpp"

namespace metroscale {

std::vector<double> Dataset::populations() const {
    std::vector<double> v;
    v.reserve(records.size());
    for (const auto& r : records) v.push_back(r.population);
    return v;
}

std::vector<double> Dataset::aggregate_outputs() const {
    std::vector<double> v;
    v.reserve(records.size());
    for (const auto& r : records) v.push_back(r.aggregate_output);
    return v;
}

std::vector<double> Dataset::per_capita_outputs() const {
    std::vector<double> v;
    v.reserve(records.size());
    for (const auto& r : records) v.push_back(r.per_capita_output());
    return v;
}

std::vector<double> Dataset::log_populations() const {
    std::vector<double> v;
    v.reserve(records.size());
    for (const auto& r : records) v.push_back(std::log(r.population));
    return v;
}

std::vector<double> Dataset::log_per_capita() const {
    std::vector<double> v;
    v.reserve(records.size());
    for (const auto& r : records) v.push_back(std::log(r.per_capita_output()));
    return v;
}

std::vector<double> Dataset::log_aggregate() const {
    std::vector<double> v;
    v.reserve(records.size());
    for (const auto& r : records) v.push_back(std::log(r.aggregate_output));
    return v;
}

CsvSchema load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open schema file: " + path);
    CsvSchema schema;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected key=value in schema file", lineno);
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "id") schema.id = value;
        else if (key == "name") schema.name = value;
        else if (key == "population") schema.population = value;
        else if (key == "output") schema.output = value;
        else if (key == "sector1") schema.sectors[0] = value;
        else if (key == "sector2") schema.sectors[1] = value;
        else if (key == "sector3") schema.sectors[2] = value;
        else if (key == "sector4") schema.sectors[3] = value;
        else throw SchemaError("unknown schema key '" + key + "'");
    }
    return schema;
}

Dataset load_city_csv(const std::string& path, double deflator,
                      const CsvSchema& schema, const std::string& label) {
    if (!(deflator > 0.0)) throw ValidationError("deflator must be positive");
    const csv::Table table = csv::read_file(path);

    const auto id_col = table.column(schema.id);
    const auto pop_col = table.column(schema.population);
    const auto out_col = table.column(schema.output);
    if (!id_col) throw SchemaError("missing mandatory column '" + schema.id + "'");
    if (!pop_col) throw SchemaError("missing mandatory column '" + schema.population + "'");
    if (!out_col) throw SchemaError("missing mandatory column '" + schema.output + "'");
    const auto name_col = table.column(schema.name);
    std::array<std::optional<std::size_t>, kNumSectors> sector_cols;
    for (std::size_t j = 0; j < kNumSectors; ++j)
        if (!schema.sectors[j].empty()) sector_cols[j] = table.column(schema.sectors[j]);

    Dataset d;
    d.label = label.empty() ? path : label;
    d.deflator = deflator;
    std::set<std::string> seen;
    std::vector<std::string> bad_ids;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        CityRecord rec;
        rec.id = row[*id_col];
        if (!seen.insert(rec.id).second)
            throw ValidationError("duplicate id '" + rec.id + "'");
        if (name_col) rec.name = row[*name_col];
        try {
            rec.population = csv::parse_number(row[*pop_col]);
            rec.aggregate_output = csv::parse_number(row[*out_col]) * deflator;
        } catch (const ParseError& e) {
            throw ParseError(std::string(e.what()) + " (id '" + rec.id + "')", i + 2);
        }
        if (!(rec.population > 0.0) || !(rec.aggregate_output > 0.0)) {
            bad_ids.push_back(rec.id);
            continue;
        }
        for (std::size_t j = 0; j < kNumSectors; ++j) {
            if (!sector_cols[j]) continue;
            const std::string& cell = row[*sector_cols[j]];
            if (cell.empty()) continue;  // explicitly missing
            const double share = csv::parse_number(cell);
            if (share < 0.0 || share > 1.0)
                throw ValidationError("sector share out of [0,1] for id '" + rec.id + "'");
            rec.sector_shares[j] = share;
        }
        d.records.push_back(std::move(rec));
    }
    if (!bad_ids.empty()) {
        std::ostringstream msg;
        msg << "non-positive population or output for ids:";
        for (const auto& id : bad_ids) msg << ' ' << id;
        throw ValidationError(msg.str());
    }
    return d;
}

void save_city_csv(const std::string& path, const Dataset& d, const CsvSchema& schema) {
    csv::Table table;
    table.header = {schema.id, schema.name, schema.population, schema.output};
    for (std::size_t j = 0; j < kNumSectors; ++j)
        if (!schema.sectors[j].empty()) table.header.push_back(schema.sectors[j]);
    auto fmt = [](double v) {
        std::ostringstream out;
        out.precision(17);
        out << v;
        return out.str();
    };
    for (const auto& rec : d.records) {
        std::vector<std::string> row = {rec.id, rec.name, fmt(rec.population),
                                        fmt(rec.aggregate_output)};
        for (std::size_t j = 0; j < kNumSectors; ++j) {
            if (schema.sectors[j].empty()) continue;
            row.push_back(rec.sector_shares[j] ? fmt(*rec.sector_shares[j]) : "");
        }
        table.rows.push_back(std::move(row));
    }
    csv::write_file(path, table);
}

Dataset complete_sector_subset(const Dataset& d) {
    Dataset out;
    out.label = d.label + " (complete sectors)";
    out.deflator = d.deflator;
    for (const auto& rec : d.records)
        if (rec.has_all_shares()) out.records.push_back(rec);
    return out;
}

std::vector<SpeedRecord> load_speed_fixture(const std::string& path) {
    const csv::Table table = csv::read_file(path);
    const auto loc = table.column("location");
    const auto pop = table.column("population");
    const auto mean_t = table.column("mean_time_s");
    const auto sd_t = table.column("sd_time_s");
    const auto len = table.column("course_length_m");
    if (!loc || !pop || !mean_t || !sd_t || !len)
        throw SchemaError("walking-speed fixture is missing a mandatory column");
    std::vector<SpeedRecord> out;
    for (const auto& row : table.rows) {
        SpeedRecord r;
        r.location = row[*loc];
        r.population = csv::parse_number(row[*pop]);
        r.mean_time_s = csv::parse_number(row[*mean_t]);
        r.sd_time_s = csv::parse_number(row[*sd_t]);
        r.course_length_m = csv::parse_number(row[*len]);
        if (!(r.population > 0.0) || !(r.mean_time_s > 0.0) || r.sd_time_s < 0.0)
            throw ValidationError("bad walking-speed row for '" + r.location + "'");
        const double v = r.speed();
        if (v <= 0.1 || v >= 5.0)
            throw ValidationError("implausible walking speed for '" + r.location + "'");
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace metroscale
