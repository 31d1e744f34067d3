#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "metroscale/hierarchy_gam.hpp"
#include "metroscale/mixture.hpp"
#include "metroscale/model_eval.hpp"
#include "metroscale/residual_gof.hpp"
#include "metroscale/scaling_models.hpp"
#include "metroscale/surrogate.hpp"

namespace metroscale::report {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

Json to_json(const ScalingFit& fit, bool include_vectors = true);
Json to_json(const ComparisonReport& report);
Json to_json(const BootstrapResult& result);
Json to_json(const SurrogateSummary& summary, bool include_vectors = false);
Json to_json(const GapTestResult& result);
Json to_json(const AdditiveFit& fit, bool include_vectors = true);
Json to_json(const AdditiveCvResult& result);
Json to_json(const MixtureFit& fit);
Json to_json(const ComponentSelection& selection);
Json to_json(const GofReport& report, bool include_vectors = true);
Json to_json(const SpeedFits& fits);

// Wraps a payload with schema_version and the dataset label, then writes
// it with a trailing newline (stable key order, byte-reproducible).
void write_json(const std::string& path, const std::string& label, Json payload);
std::string render_json(const std::string& label, Json payload);

}  // namespace metroscale::report
