#pragma once

#include <string>

#include "hyperc/sim.hpp"
#include "hyperc/state_space.hpp"

namespace hyperc {

inline constexpr const char* kControllerSchema = "hyperc-controller/1";

struct ControllerArtifact {
    DiscreteStateSpace controller; // frame rate, 1 input, M outputs
    int M = 1;
    double gamma = 0.0;
};

/// Full-precision text form: schema line, scalars, then labeled row-major matrices.
void write_controller_artifact(const std::string& path, const ControllerArtifact& artifact);
ControllerArtifact read_controller_artifact(const std::string& path);

/// One row per fast-grid point, 17-significant-digit columns:
/// t, r, r_delayed, target_normalized, y, e_tilde, u.
void write_trajectory_csv(const std::string& path, const SimulationResult& result);

/// %.17g rendering used for every number the tool emits.
std::string format_full(double v);

} // namespace hyperc
