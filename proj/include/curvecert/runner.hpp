#pragma once

#include <cstdint>
#include <string>

#include "curvecert/scenario.hpp"

namespace curvecert {

// Exit codes shared by the CLI and the scenario runner.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNoConvergence = 3;
inline constexpr int kExitCertification = 4;
inline constexpr int kExitConsistency = 5;

// Executes one scenario: solves, certifies, writes trajectory table(s) and
// certificate.json into out_dir. Returns the exit code; 0 iff every
// certificate in the run passes. Output is deterministic given (config, seed).
int run_scenario(const ScenarioConfig& config, const std::string& out_dir,
                 std::uint64_t seed);

// Validation-only mode: checks the declared constants (vector-space kinds)
// or chart-field consistency (manifold kind) and writes a report without
// solving.
int run_check(const ScenarioConfig& config, const std::string& out_dir,
              std::uint64_t seed);

}  // namespace curvecert
