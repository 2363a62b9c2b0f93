#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fimcon/scenario_config.hpp"

namespace fimcon {

/// Exit codes shared by the command layer and the CLI binary.
enum ExitCode : int {
    kExitOk = 0,
    kExitValidationFailure = 2,
    kExitFunnelViolation = 3,
    kExitConfigError = 4,
};

/// Runs the full validation pipeline and prints an itemized report with
/// every margin and funnel bound. Writes no files and mutates nothing.
int cmd_check(const ScenarioConfig& cfg, std::ostream& out);

/// Validates, integrates, writes the CSV (and the SVG when configured) and
/// prints a metrics summary.
int cmd_run(const ScenarioConfig& cfg, std::ostream& out);

/// Runs the two scenarios (shared plant/reference/controller/sim sections
/// are the caller's responsibility to have verified) and prints the
/// comparison: tail-error ratio, gain and controller-output oscillation,
/// and a verdict line.
int cmd_compare(const ScenarioConfig& cfg_with, const ScenarioConfig& cfg_without,
                std::ostream& out);

/// kr_sweep over the given values with a per-value report line.
int cmd_sweep(const ScenarioConfig& cfg, const std::vector<double>& kr_values, std::ostream& out);

/// Randomized batch: `count` seeded scenarios, each validated, integrated
/// and checked against its funnel bounds.
int cmd_mc(int count, std::uint64_t seed, double k_r, std::ostream& out);

}  // namespace fimcon
