#pragma once

#include <json.hpp>
#include <string>

#include "vstatns/limit_laws.hpp"
#include "vstatns/mc.hpp"
#include "vstatns/pls.hpp"
#include "vstatns/weights.hpp"

// One JSON dialect shared across the CLI; every document carries
// schema_version = 1. Custom curves/filters are code-only and never
// appear in configs.

namespace vstatns::config {

inline constexpr int kSchemaVersion = 1;

nlohmann::json curve_to_json(const Curve& c);
Curve curve_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const PlsModel& m);
PlsModel model_from_json(const nlohmann::json& j);

nlohmann::json weights_to_json(const WeightSpec& s);
WeightSpec weights_from_json(const nlohmann::json& j);

nlohmann::json mc_to_json(const McConfig& c);
McConfig mc_from_json(const nlohmann::json& j);

nlohmann::json mixture_to_json(const MixtureLaw& law);

nlohmann::json report_to_json(const McReport& rep, bool include_timing);

/// Loads a JSON file; if `section` is present at top level, returns that
/// subobject, otherwise the whole document. Checks schema_version when
/// present.
nlohmann::json load_section(const std::string& path, const std::string& section);

}  // namespace vstatns::config
