#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hyperc/design.hpp"
#include "hyperc/sim.hpp"

namespace hyperc {

inline constexpr const char* kConfigSchema = "hyperc-config/1";
inline constexpr const char* kToolVersion = "hyperc 1.0.0";

/// A parsed and validated run configuration with every default materialized.
struct ResolvedConfig {
    std::string name;
    DesignConfig design;
    SignalSpec reference;
    SignalSpec disturbance;                     // empty when unused
    SimulationOptions sim;
    std::optional<TransferFunction> perturbation; // Delta for `robust`
    std::vector<double> probe_omegas;

    /// Peak frequencies of the weights (design targets), used for reports.
    std::vector<double> reference_peaks;
    std::vector<double> disturbance_peaks;
};

/// Parses the JSON config file, validates, and fills defaults.
/// Throws ConfigError with the offending field named.
ResolvedConfig load_config(const std::string& path);

/// The fully resolved configuration, re-runnable as a config file.
std::string resolved_config_json(const ResolvedConfig& cfg);

} // namespace hyperc
