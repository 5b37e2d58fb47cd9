#pragma once

#include <optional>
#include <vector>

#include "hyperc/lifting.hpp"
#include "hyperc/state_space.hpp"

namespace hyperc {

struct SignalComponent {
    double amplitude = 1.0;
    double omega = 1.0; // rad/s, > 0
    double phase = 0.0;
};

struct SignalSpec {
    std::vector<SignalComponent> components;

    bool empty() const { return components.empty(); }
    double value_at(double t) const;
};

struct SteadyStateMetrics {
    double rms = 0.0;
    double peak = 0.0;
    double rel_rms = 0.0;  // normalized by the RMS of the tracked target
    double rel_peak = 0.0;
    double window_start = 0.0;
    Eigen::Index window_samples = 0;
};

struct SimulationResult {
    Eigen::VectorXd t;
    Eigen::VectorXd r;                 // raw reference
    Eigen::VectorXd r_delayed;         // r(t - L), exact on the grid
    Eigen::VectorXd target_normalized; // tracked target (filter-gain scaled when F_r in loop)
    Eigen::VectorXd y;
    Eigen::VectorXd e;       // r - y
    Eigen::VectorXd e_tilde; // target - y
    Eigen::VectorXd u;       // staircase, constant on each h/M interval
    double h = 0.0;
    int M = 1;
    int n_sim = 1;
    double delay = 0.0;
    SteadyStateMetrics metrics;
};

struct SimulationOptions {
    double duration = 60.0;
    int n_sim = 0;                  // fast steps per frame; 0 -> 4*M
    double window_fraction = 1.0 / 3.0;
    double overflow_guard = 1e12;
    Eigen::VectorXd plant_initial_state; // empty -> zero
};

/// Exact hybrid closed-loop simulation: continuous plant advanced by exact
/// discretization per fast step, sinusoids generated by rotation exosystems,
/// controller updated once per frame from the sampled (optionally pre-filtered)
/// error, M hold values per frame.
SimulationResult simulate_closed_loop(const ContinuousStateSpace& plant,
                                      const LiftedController& controller,
                                      const SignalSpec& reference,
                                      const SignalSpec* input_disturbance,
                                      const ContinuousStateSpace* reference_prefilter,
                                      double delay_seconds, const SimulationOptions& opts);

/// Metrics of e_tilde over the trailing `window_fraction` of the run.
SteadyStateMetrics steady_state_metrics(const SimulationResult& result, double window_fraction);

struct GainProbeSample {
    double omega = 0.0;
    double gain = 0.0; // steady-state RMS(e_tilde) / RMS(target)
    bool converged = false;
};

/// Steady-state error gain of the closed loop probed with unit sinusoids.
/// Scenarios run as an independent map (optionally on `threads` workers)
/// and merge in input order.
std::vector<GainProbeSample> frequency_gain_probe(const ContinuousStateSpace& plant,
                                                  const LiftedController& controller,
                                                  double delay_seconds,
                                                  const std::vector<double>& omegas,
                                                  const SimulationOptions& opts, int threads = 1);

} // namespace hyperc
