#pragma once

#include "hyperc/design.hpp"
#include "hyperc/sim.hpp"
#include "hyperc/synthesis.hpp"

namespace hyperc {

/// True iff the tracking delay is an integer multiple of the signal period 2*pi/omega.
bool check_delay_compatibility(double delay_seconds, double omega, double tol = 1e-9);

struct InternalModelReport {
    double min_distance = 2.0; // distance of spectrum(barA) to e^{±j omega h}; 2 = empty spectrum
    bool pass = false;
};

/// How close the frame-rate controller spectrum comes to the internal-model
/// eigenvalues e^{±j omega h}.
InternalModelReport check_internal_model(const LiftedController& controller, double omega,
                                         double tol);

/// Folds a frequency into the base band [0, pi/h] by reflection modulo 2*pi/h.
double alias_frequency(double omega, double h);

struct RobustnessReport {
    double omega = 0.0;        // primary test frequency
    double delay_seconds = 0.0;
    bool compatible = false;
    double gamma_achieved = 0.0;
    SteadyStateMetrics nominal_metrics;
    SteadyStateMetrics perturbed_metrics;
    double degradation_ratio = 0.0; // perturbed / nominal relative RMS
    bool nominal_stable = false;
    bool perturbed_stable = false;
    double nominal_spectral_radius = 0.0;
    double perturbed_spectral_radius = 0.0;
};

/// Designs on the nominal plant, then simulates the fixed controller against
/// both the nominal plant and the additively perturbed plant P + Delta.
RobustnessReport robustness_experiment(const DesignConfig& cfg, const TransferFunction& delta,
                                       const SignalSpec& reference,
                                       const SimulationOptions& opts);

} // namespace hyperc
