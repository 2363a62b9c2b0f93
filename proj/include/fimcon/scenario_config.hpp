#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "fimcon/simulation.hpp"

namespace fimcon {

/// Configuration document errors (syntax, schema, dimensions). Carries the
/// JSON path of the offending element where available.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OutputSpec {
    std::string csv_path;
    std::string svg_path;
    int precision = 17;
};

/// Parsed and structurally validated scenario configuration. The schema is
/// strict: unknown keys are rejected everywhere.
struct ScenarioConfig {
    Scenario scenario;
    bool internal_model_enabled = false;
    OutputSpec output;
};

/// Parses a configuration document. Throws ConfigError on syntax errors,
/// unknown keys, missing fields, or inconsistent dimensions.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig load_config(const std::string& path);

/// True iff the plant, reference, controller and sim sections of the two
/// documents are identical (the sections cmd_compare requires to be shared).
bool shared_sections_match(const nlohmann::json& a, const nlohmann::json& b);

nlohmann::json read_json_file(const std::string& path);

}  // namespace fimcon
