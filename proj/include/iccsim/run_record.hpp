#pragma once

#include <json.hpp>
#include <string>

#include "iccsim/visibility.hpp"

namespace iccsim {

inline constexpr const char* kSoftwareVersion = "0.1.0";

// JSON building blocks for self-contained run records.
nlohmann::json structure_json(const CrystalStructure& s, const UnitSystem& units);
nlohmann::json basis_json(const ModeBasis& b);
nlohmann::json map_json(const BogoliubovMap& m);
nlohmann::json pipeline_json(const QuenchPipeline& p);
nlohmann::json diagnostics_json(const TraceDiagnostics& d);

void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

}  // namespace iccsim
