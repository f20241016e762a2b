#pragma once

#include "dualquad/simulation.hpp"

#include <filesystem>
#include <string>

namespace dualquad {

/// Parse or validation failure; what() carries the key path or line/column.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Scenario file layout: sections `system`, `controller`, `admittance`, `allocation`,
/// `forces[]`, `disturbances[]`, `sim`. Every key is optional; missing keys keep the
/// reference configuration. Unknown keys are rejected.
ScenarioConfig parse_scenario(const std::string& text, const std::string& source = "<string>");
ScenarioConfig load_scenario(const std::filesystem::path& path);

}  // namespace dualquad
