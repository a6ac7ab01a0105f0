#pragma once

#include <string>

#include <json.hpp>

#include "binfam/family.hpp"

namespace binfam {

// Parameter files are JSON with a pinned schema version, a family
// discriminator and the family payload, plus an optional fit report.
// Component and variable indices are 1-based in the files. Unknown fields
// are rejected; doubles round-trip exactly.
inline constexpr const char* kParamSchemaVersion = "1";

nlohmann::json params_to_json(const FamilyParams& params);
FamilyParams params_from_json(const nlohmann::json& doc);

void save_params(const std::string& path, const FamilyParams& params,
                 const nlohmann::json& fit_report = nlohmann::json());

struct LoadedParams {
  FamilyParams params;
  nlohmann::json fit_report;  // null when absent
};
LoadedParams load_params(const std::string& path);

}  // namespace binfam
