#pragma once

#include <optional>
#include <string>

#include "hyperc/design.hpp"
#include "hyperc/state_space.hpp"

namespace hyperc {

struct SynthesisDiagnostics {
    double x_residual = 0.0;              // Riccati residual, control side
    double y_residual = 0.0;              // Riccati residual, filter side
    double coupling_spectral_radius = 0.0; // rho(X Y) / gamma^2
    double closed_loop_spectral_radius = 0.0;
    bool norm_bound_verified = false;      // pencil test at gamma*(1+1e-6)
};

struct HinfResult {
    DiscreteStateSpace controller;  // frame rate, 1 input, M outputs
    double gamma_achieved = 0.0;
    DiscreteStateSpace closed_loop; // exogenous -> performance, frame rate
    SynthesisDiagnostics diagnostics;
};

struct SynthesisOutcome {
    std::optional<HinfResult> result;
    std::string infeasible_condition;

    bool feasible() const { return result.has_value(); }
};

/// Central controller at a fixed attenuation level, or the failed condition.
/// The discrete plant is mapped through the Cayley transform, the continuous
/// two-Riccati central controller is formed, mapped back, and the resulting
/// closed loop is verified (Schur stability + norm bound) before returning.
SynthesisOutcome synthesize_fixed_gamma(const DiscreteGeneralizedPlant& plant, double gamma);

/// Bisection over attenuation levels down to relative width `tol`.
/// Throws InfeasibleError when gamma_hi itself is infeasible.
HinfResult gamma_bisect(const DiscreteGeneralizedPlant& plant, double gamma_lo, double gamma_hi,
                        double tol = 1e-3);

/// Closed loop of the plant with a controller u = K y (D22 = 0 assumed).
DiscreteStateSpace close_loop(const DiscreteGeneralizedPlant& plant,
                              const DiscreteStateSpace& controller);

/// Bilinear (Cayley) map z = (1+s)/(1-s): unit disc to left half plane and
/// back.  Norm- and stability-preserving; requires -1 (resp. +1) outside the
/// spectrum of A.
ContinuousStateSpace bilinear_to_continuous(const DiscreteStateSpace& sys);
DiscreteStateSpace bilinear_to_discrete(const ContinuousStateSpace& sys, double period);

} // namespace hyperc
