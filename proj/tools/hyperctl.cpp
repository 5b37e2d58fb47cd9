// Batch front end: controller design, closed-loop simulation, spectrum and
// delay-compatibility analysis, robustness experiments, and error-gain probes.
// All outputs are plain text / CSV with full-precision numbers; a fixed config
// yields byte-identical outputs.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hyperc/analysis.hpp"
#include "hyperc/artifact_io.hpp"
#include "hyperc/config.hpp"
#include "hyperc/design.hpp"
#include "hyperc/errors.hpp"
#include "hyperc/hinf_norm.hpp"
#include "hyperc/linalg.hpp"
#include "hyperc/sim.hpp"
#include "hyperc/synthesis.hpp"

namespace fs = std::filesystem;
using namespace hyperc;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumerical = 4;

int thread_count() {
    if (const char* env = std::getenv("HYPERC_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1)
            return n;
    }
    return 1;
}

TransferFunction parse_tf_spec(const std::string& spec) {
    // "num/den" with comma-separated ascending coefficients, e.g. "0.05/1,1".
    const auto slash = spec.find('/');
    if (slash == std::string::npos)
        throw ConfigError("--perturb: expected \"num/den\" coefficient lists");
    auto parse_list = [](const std::string& s) {
        std::vector<double> out;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ','))
            out.push_back(std::stod(tok));
        if (out.empty())
            throw ConfigError("--perturb: empty coefficient list");
        return out;
    };
    return TransferFunction(parse_list(spec.substr(0, slash)), parse_list(spec.substr(slash + 1)));
}

struct OutputDir {
    fs::path dir;

    explicit OutputDir(const std::string& path) : dir(path) {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec)
            throw ConfigError("cannot create output directory: " + path);
    }
    std::string file(const std::string& name) const { return (dir / name).string(); }
};

void write_manifest(const OutputDir& out, const std::string& command,
                    const std::string& config_path) {
    std::ofstream f(out.file("run_manifest.json"));
    f << "{\n"
      << "  \"tool\": \"" << kToolVersion << "\",\n"
      << "  \"command\": \"" << command << "\",\n"
      << "  \"config\": \"" << config_path << "\",\n"
      << "  \"output_dir\": \"" << out.dir.string() << "\",\n"
      << "  \"deterministic\": true\n"
      << "}\n";
}

void write_resolved_config(const OutputDir& out, const ResolvedConfig& cfg) {
    std::ofstream f(out.file("resolved_config.json"));
    f << resolved_config_json(cfg);
}

void append_config_block(std::ostream& rep, const ResolvedConfig& cfg) {
    rep << "\n--- resolved config (re-runnable) ---\n" << resolved_config_json(cfg);
}

void report_compatibility(std::ostream& rep, const ResolvedConfig& cfg) {
    const double L = cfg.design.delay_seconds();
    rep << "delay L = " << format_full(L) << " s (" << cfg.design.delay_frames << " frames)\n";
    for (const auto& c : cfg.reference.components) {
        rep << "reference omega = " << format_full(c.omega)
            << "  alias = " << format_full(alias_frequency(c.omega, cfg.design.h))
            << "  delay_compatible = " << (check_delay_compatibility(L, c.omega) ? "true" : "false")
            << "\n";
    }
    for (const auto& c : cfg.disturbance.components) {
        rep << "disturbance omega = " << format_full(c.omega)
            << "  alias = " << format_full(alias_frequency(c.omega, cfg.design.h))
            << "  delay_compatible = " << (check_delay_compatibility(L, c.omega) ? "true" : "false")
            << "\n";
    }
}

void report_internal_model(std::ostream& rep, const ResolvedConfig& cfg,
                           const DiscreteStateSpace& controller) {
    const LiftedController K = unlift_controller(controller, cfg.design.M);
    std::vector<double> freqs = cfg.reference_peaks;
    freqs.insert(freqs.end(), cfg.disturbance_peaks.begin(), cfg.disturbance_peaks.end());
    for (double w : freqs) {
        const auto imr = check_internal_model(K, w, 0.05);
        rep << "internal-model distance to e^{±j*" << format_full(w)
            << "*h}: " << format_full(imr.min_distance) << (imr.pass ? "  (pass)" : "  (fail)")
            << "\n";
    }
}

int cmd_design(const std::string& config_path, const std::string& out_path, double gamma_hi_cli) {
    ResolvedConfig cfg = load_config(config_path);
    if (gamma_hi_cli > 0.0)
        cfg.design.gamma_hi = gamma_hi_cli;
    cfg.design.validate();
    const OutputDir out(out_path);
    write_manifest(out, "design", config_path);
    write_resolved_config(out, cfg);

    const DiscreteGeneralizedPlant plant = build_generalized_plant(cfg.design);
    const HinfResult result =
        gamma_bisect(plant, cfg.design.gamma_lo, cfg.design.gamma_hi, cfg.design.gamma_tol);

    ControllerArtifact artifact;
    artifact.controller = result.controller;
    artifact.M = cfg.design.M;
    artifact.gamma = result.gamma_achieved;
    write_controller_artifact(out.file("controller.txt"), artifact);

    std::ofstream rep(out.file("design_report.txt"));
    rep << kToolVersion << "  design report: " << cfg.name << "\n";
    rep << "gamma_achieved = " << format_full(result.gamma_achieved) << "\n";
    rep << "closed_loop_stable = true\n";
    rep << "closed_loop_spectral_radius = "
        << format_full(result.diagnostics.closed_loop_spectral_radius) << "\n";
    rep << "riccati_residual_control = " << format_full(result.diagnostics.x_residual) << "\n";
    rep << "riccati_residual_filter = " << format_full(result.diagnostics.y_residual) << "\n";
    rep << "coupling_spectral_radius = "
        << format_full(result.diagnostics.coupling_spectral_radius) << "\n";
    rep << "norm_bound_verified = " << (result.diagnostics.norm_bound_verified ? "true" : "false")
        << "\n";
    rep << "plant_states = " << plant.states() << "  exogenous_inputs = " << plant.exo_inputs()
        << "  controls = " << plant.controls() << "\n";
    report_internal_model(rep, cfg, result.controller);
    report_compatibility(rep, cfg);
    append_config_block(rep, cfg);
    std::cout << "design: gamma = " << format_full(result.gamma_achieved) << ", controller -> "
              << out.file("controller.txt") << "\n";
    return 0;
}

SimulationResult run_simulation(const ResolvedConfig& cfg, const ControllerArtifact& artifact,
                                const TransferFunction* perturb) {
    ContinuousStateSpace plant = to_state_space(cfg.design.plant);
    if (perturb)
        plant = parallel(plant, to_state_space(*perturb));
    const LiftedController K = unlift_controller(artifact.controller, artifact.M);
    const SignalSpec* dist = cfg.disturbance.empty() ? nullptr : &cfg.disturbance;
    return simulate_closed_loop(plant, K, cfg.reference, dist, nullptr,
                                cfg.design.delay_seconds(), cfg.sim);
}

void write_metrics_report(const OutputDir& out, const ResolvedConfig& cfg,
                          const SimulationResult& res, const char* filename) {
    std::ofstream rep(out.file(filename));
    rep << kToolVersion << "  simulation metrics: " << cfg.name << "\n";
    rep << "duration = " << format_full(cfg.sim.duration)
        << "  fast_factor = " << cfg.sim.n_sim << "\n";
    rep << "window_start = " << format_full(res.metrics.window_start)
        << "  window_samples = " << res.metrics.window_samples << "\n";
    rep << "steady_rms_e_tilde = " << format_full(res.metrics.rms) << "\n";
    rep << "steady_peak_e_tilde = " << format_full(res.metrics.peak) << "\n";
    rep << "steady_rel_rms = " << format_full(res.metrics.rel_rms) << "\n";
    rep << "steady_rel_peak = " << format_full(res.metrics.rel_peak) << "\n";
    append_config_block(rep, cfg);
}

int cmd_simulate(const std::string& config_path, const std::string& controller_path,
                 const std::string& out_path, double duration_cli,
                 const std::string& perturb_spec) {
    ResolvedConfig cfg = load_config(config_path);
    if (duration_cli >= 0.0)
        cfg.sim.duration = duration_cli;
    const ControllerArtifact artifact = read_controller_artifact(controller_path);
    if (artifact.M != cfg.design.M)
        throw ConfigError("controller artifact M does not match the config");
    if (std::abs(artifact.controller.period - cfg.design.h) >
        1e-12 * std::max(1.0, cfg.design.h))
        throw ConfigError("controller artifact frame period does not match the config");
    std::optional<TransferFunction> perturb;
    if (!perturb_spec.empty())
        perturb = parse_tf_spec(perturb_spec);

    const OutputDir out(out_path);
    write_manifest(out, "simulate", config_path);
    write_resolved_config(out, cfg);
    const SimulationResult res = run_simulation(cfg, artifact, perturb ? &*perturb : nullptr);
    write_trajectory_csv(out.file("trajectory.csv"), res);
    write_metrics_report(out, cfg, res, "simulation_report.txt");
    std::cout << "simulate: steady relative RMS = " << format_full(res.metrics.rel_rms)
              << ", trajectory -> " << out.file("trajectory.csv") << "\n";
    return 0;
}

int cmd_analyze(const std::string& config_path, const std::string& controller_path,
                const std::string& out_path) {
    const ResolvedConfig cfg = load_config(config_path);
    const OutputDir out(out_path);
    write_manifest(out, "analyze", config_path);
    write_resolved_config(out, cfg);
    std::ofstream rep(out.file("analysis_report.txt"));
    rep << kToolVersion << "  analysis report: " << cfg.name << "\n";
    rep << "nyquist_frequency = " << format_full(M_PI / cfg.design.h) << " rad/s\n";
    report_compatibility(rep, cfg);
    if (!controller_path.empty()) {
        const ControllerArtifact artifact = read_controller_artifact(controller_path);
        report_internal_model(rep, cfg, artifact.controller);
    }
    append_config_block(rep, cfg);
    std::cout << "analyze: report -> " << out.file("analysis_report.txt") << "\n";
    return 0;
}

int cmd_robust(const std::string& config_path, const std::string& out_path,
               const std::string& perturb_spec) {
    ResolvedConfig cfg = load_config(config_path);
    std::optional<TransferFunction> delta = cfg.perturbation;
    if (!perturb_spec.empty())
        delta = parse_tf_spec(perturb_spec);
    if (!delta)
        throw ConfigError("robust: no perturbation given (config \"perturbation\" or --perturb)");

    const OutputDir out(out_path);
    write_manifest(out, "robust", config_path);
    write_resolved_config(out, cfg);
    const RobustnessReport rep = robustness_experiment(cfg.design, *delta, cfg.reference, cfg.sim);

    std::ofstream f(out.file("robustness_report.txt"));
    f << kToolVersion << "  robustness report: " << cfg.name << "\n";
    f << "omega = " << format_full(rep.omega) << " rad/s\n";
    f << "delay L = " << format_full(rep.delay_seconds) << " s\n";
    f << "delay_compatible = " << (rep.compatible ? "true" : "false") << "\n";
    f << "gamma_achieved = " << format_full(rep.gamma_achieved) << "\n";
    f << "nominal_stable = " << (rep.nominal_stable ? "true" : "false")
      << "  spectral_radius = " << format_full(rep.nominal_spectral_radius) << "\n";
    f << "perturbed_stable = " << (rep.perturbed_stable ? "true" : "false")
      << "  spectral_radius = " << format_full(rep.perturbed_spectral_radius) << "\n";
    f << "nominal_rel_rms = " << format_full(rep.nominal_metrics.rel_rms) << "\n";
    f << "perturbed_rel_rms = " << format_full(rep.perturbed_metrics.rel_rms) << "\n";
    f << "degradation_ratio = " << format_full(rep.degradation_ratio) << "\n";
    f << "verdict = "
      << (rep.compatible ? "compatible delay: robust tracking expected"
                         : "incompatible delay: tracking degrades under perturbation")
      << "\n";
    append_config_block(f, cfg);
    std::cout << "robust: compatible = " << (rep.compatible ? "true" : "false")
              << ", degradation ratio = " << format_full(rep.degradation_ratio) << "\n";
    return 0;
}

int cmd_probe(const std::string& config_path, const std::string& controller_path,
              const std::string& out_path) {
    const ResolvedConfig cfg = load_config(config_path);
    const ControllerArtifact artifact = read_controller_artifact(controller_path);
    if (artifact.M != cfg.design.M)
        throw ConfigError("controller artifact M does not match the config");
    const OutputDir out(out_path);
    write_manifest(out, "probe", config_path);
    write_resolved_config(out, cfg);

    const ContinuousStateSpace plant = to_state_space(cfg.design.plant);
    const LiftedController K = unlift_controller(artifact.controller, artifact.M);
    const auto samples = frequency_gain_probe(plant, K, cfg.design.delay_seconds(),
                                              cfg.probe_omegas, cfg.sim, thread_count());

    std::ofstream csv(out.file("gain_profile.csv"));
    csv << "omega,gain,converged\n";
    for (const auto& s : samples)
        csv << format_full(s.omega) << ',' << format_full(s.gain) << ','
            << (s.converged ? 1 : 0) << '\n';
    std::ofstream rep(out.file("probe_report.txt"));
    rep << kToolVersion << "  error-gain probe: " << cfg.name << "\n";
    for (const auto& s : samples)
        rep << "omega = " << format_full(s.omega) << "  gain = " << format_full(s.gain)
            << (s.converged ? "" : "  (not converged)") << "\n";
    append_config_block(rep, cfg);
    std::cout << "probe: " << samples.size() << " frequencies -> "
              << out.file("gain_profile.csv") << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multirate sampled-data control design beyond the Nyquist frequency"};
    app.require_subcommand(1);

    std::string config_path, out_path = "out", controller_path, perturb_spec;
    double gamma_hi = -1.0, duration = -1.0;

    auto add_common = [&](CLI::App* sub, bool needs_controller) {
        sub->add_option("--config", config_path, "config file (JSON)")->required();
        sub->add_option("--out", out_path, "output directory");
        if (needs_controller)
            sub->add_option("--controller", controller_path, "controller artifact")->required();
    };

    CLI::App* design = app.add_subcommand("design", "synthesize a controller");
    add_common(design, false);
    design->add_option("--gamma-hi", gamma_hi, "override the upper attenuation bound");

    CLI::App* simulate = app.add_subcommand("simulate", "closed-loop trajectory CSV");
    add_common(simulate, true);
    simulate->add_option("--duration", duration, "override the simulation duration [s]");
    simulate->add_option("--perturb", perturb_spec, "additive plant perturbation num/den");

    CLI::App* analyze = app.add_subcommand("analyze", "aliasing / compatibility / spectrum report");
    analyze->add_option("--config", config_path, "config file (JSON)")->required();
    analyze->add_option("--out", out_path, "output directory");
    analyze->add_option("--controller", controller_path, "controller artifact (optional)");

    CLI::App* robust = app.add_subcommand("robust", "nominal vs perturbed tracking experiment");
    add_common(robust, false);
    robust->add_option("--perturb", perturb_spec, "additive plant perturbation num/den");

    CLI::App* probe = app.add_subcommand("probe", "steady-state error gain over frequencies");
    add_common(probe, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(design))
            return cmd_design(config_path, out_path, gamma_hi);
        if (app.got_subcommand(simulate))
            return cmd_simulate(config_path, controller_path, out_path, duration, perturb_spec);
        if (app.got_subcommand(analyze))
            return cmd_analyze(config_path, controller_path, out_path);
        if (app.got_subcommand(robust))
            return cmd_robust(config_path, out_path, perturb_spec);
        if (app.got_subcommand(probe))
            return cmd_probe(config_path, controller_path, out_path);
    } catch (const ConfigError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible design: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
