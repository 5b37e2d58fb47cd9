#include "hyperc/analysis.hpp"

#include <cmath>

#include "hyperc/errors.hpp"
#include "hyperc/linalg.hpp"

namespace hyperc {

bool check_delay_compatibility(double delay_seconds, double omega, double tol) {
    if (!(omega > 0.0))
        throw ConfigError("check_delay_compatibility: omega must be positive");
    if (delay_seconds < 0.0)
        throw ConfigError("check_delay_compatibility: delay must be >= 0");
    const double cycles = delay_seconds * omega / (2.0 * M_PI);
    return std::abs(cycles - std::round(cycles)) <= tol;
}

InternalModelReport check_internal_model(const LiftedController& controller, double omega,
                                         double tol) {
    InternalModelReport rep;
    if (controller.states() == 0)
        return rep; // empty spectrum: maximal distance, fail
    const Eigen::VectorXcd eigs = eigenvalues(controller.barA);
    const std::complex<double> target(std::cos(omega * controller.h),
                                      std::sin(omega * controller.h));
    double best = 2.0;
    for (Eigen::Index i = 0; i < eigs.size(); ++i) {
        best = std::min(best, std::abs(eigs[i] - target));
        best = std::min(best, std::abs(eigs[i] - std::conj(target)));
    }
    rep.min_distance = best;
    rep.pass = best <= tol;
    return rep;
}

double alias_frequency(double omega, double h) {
    if (omega < 0.0)
        throw ConfigError("alias_frequency: omega must be >= 0");
    if (h <= 0.0)
        throw ConfigError("alias_frequency: period must be positive");
    const double full = 2.0 * M_PI / h;
    double x = std::fmod(omega, full);
    if (x > 0.5 * full)
        x = full - x;
    return x;
}

RobustnessReport robustness_experiment(const DesignConfig& cfg, const TransferFunction& delta,
                                       const SignalSpec& reference,
                                       const SimulationOptions& opts) {
    if (reference.empty())
        throw ConfigError("robustness_experiment: reference must have at least one component");
    const DiscreteGeneralizedPlant gp = build_generalized_plant(cfg);
    const HinfResult design = gamma_bisect(gp, cfg.gamma_lo, cfg.gamma_hi, cfg.gamma_tol);
    const LiftedController K = unlift_controller(design.controller, cfg.M);

    const ContinuousStateSpace nominal = to_state_space(cfg.plant);
    const ContinuousStateSpace perturbed = parallel(nominal, to_state_space(delta));

    RobustnessReport rep;
    rep.omega = reference.components.front().omega;
    rep.delay_seconds = cfg.delay_seconds();
    rep.gamma_achieved = design.gamma_achieved;
    rep.compatible = true;
    for (const auto& c : reference.components)
        rep.compatible = rep.compatible && check_delay_compatibility(rep.delay_seconds, c.omega);

    // Stability of the true sampled-data loops, nominal and perturbed.
    Eigen::VectorXd grid(1);
    grid << 0.0;
    rep.nominal_spectral_radius = build_lifted_closed_loop(nominal, K, grid).spectral_radius();
    rep.perturbed_spectral_radius = build_lifted_closed_loop(perturbed, K, grid).spectral_radius();
    rep.nominal_stable = rep.nominal_spectral_radius < 1.0;
    rep.perturbed_stable = rep.perturbed_spectral_radius < 1.0;

    const SimulationResult nom =
        simulate_closed_loop(nominal, K, reference, nullptr, nullptr, cfg.delay_seconds(), opts);
    rep.nominal_metrics = nom.metrics;
    if (rep.perturbed_stable) {
        const SimulationResult per = simulate_closed_loop(perturbed, K, reference, nullptr,
                                                          nullptr, cfg.delay_seconds(), opts);
        rep.perturbed_metrics = per.metrics;
        rep.degradation_ratio = rep.nominal_metrics.rel_rms > 0.0
                                    ? rep.perturbed_metrics.rel_rms / rep.nominal_metrics.rel_rms
                                    : 0.0;
    } else {
        rep.degradation_ratio = std::numeric_limits<double>::infinity();
    }
    return rep;
}

} // namespace hyperc
