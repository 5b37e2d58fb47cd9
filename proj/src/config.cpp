#include "hyperc/config.hpp"

#include <fstream>

#include <json.hpp>

#include "hyperc/errors.hpp"

namespace hyperc {

namespace {

using json = nlohmann::ordered_json;

std::vector<double> as_doubles(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty())
        throw ConfigError(field + ": expected a nonempty number array");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number())
            throw ConfigError(field + ": expected numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

TransferFunction parse_tf(const json& j, const std::string& field) {
    if (!j.is_object() || !j.contains("num") || !j.contains("den"))
        throw ConfigError(field + ": expected an object with \"num\" and \"den\"");
    try {
        return TransferFunction(as_doubles(j["num"], field + ".num"),
                                as_doubles(j["den"], field + ".den"));
    } catch (const ConfigError& e) {
        throw ConfigError(field + ": " + e.what());
    }
}

// A weight is either an explicit rational function or {omegas, zeta}.
TransferFunction parse_weight(const json& j, const std::string& field,
                              std::vector<double>* peaks) {
    if (j.contains("num"))
        return parse_tf(j, field);
    if (!j.contains("omegas"))
        throw ConfigError(field + ": expected {omegas, zeta} or {num, den}");
    const std::vector<double> omegas = as_doubles(j["omegas"], field + ".omegas");
    const double zeta = j.value("zeta", 0.01);
    if (peaks)
        *peaks = omegas;
    try {
        return omegas.size() == 1 ? make_weight(omegas[0], zeta)
                                  : make_weight_product(omegas, zeta);
    } catch (const ConfigError& e) {
        throw ConfigError(field + ": " + e.what());
    }
}

SignalSpec parse_signal(const json& j, const std::string& field) {
    SignalSpec spec;
    if (!j.is_array())
        throw ConfigError(field + ": expected an array of components");
    for (const auto& c : j) {
        SignalComponent comp;
        if (!c.contains("omega"))
            throw ConfigError(field + ": component requires \"omega\"");
        comp.omega = c["omega"].get<double>();
        comp.amplitude = c.value("amplitude", 1.0);
        comp.phase = c.value("phase", 0.0);
        if (!(comp.omega > 0.0))
            throw ConfigError(field + ".omega: must be positive");
        spec.components.push_back(comp);
    }
    return spec;
}

json tf_json(const TransferFunction& tf) {
    json j;
    j["num"] = std::vector<double>(tf.num.data(), tf.num.data() + tf.num.size());
    j["den"] = std::vector<double>(tf.den.data(), tf.den.data() + tf.den.size());
    return j;
}

json signal_json(const SignalSpec& s) {
    json arr = json::array();
    for (const auto& c : s.components) {
        json j;
        j["amplitude"] = c.amplitude;
        j["omega"] = c.omega;
        j["phase"] = c.phase;
        arr.push_back(j);
    }
    return arr;
}

} // namespace

ResolvedConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }

    if (j.value("schema", std::string()) != kConfigSchema)
        throw ConfigError(std::string("schema: expected \"") + kConfigSchema + "\"");

    ResolvedConfig cfg;
    cfg.name = j.value("name", std::string("unnamed"));
    if (!j.contains("plant"))
        throw ConfigError("plant: missing");
    cfg.design.plant = parse_tf(j["plant"], "plant");

    if (!j.contains("sampling"))
        throw ConfigError("sampling: missing");
    const auto& samp = j["sampling"];
    cfg.design.h = samp.value("h", 1.0);
    cfg.design.M = samp.value("M", 8);
    cfg.design.N = samp.value("N", cfg.design.M);
    cfg.design.delay_frames = j.value("delay_frames", 0);

    if (!j.contains("reference_weight"))
        throw ConfigError("reference_weight: missing");
    cfg.design.reference_weight =
        parse_weight(j["reference_weight"], "reference_weight", &cfg.reference_peaks);
    if (j.contains("disturbance_weight") && !j["disturbance_weight"].is_null())
        cfg.design.disturbance_weight =
            parse_weight(j["disturbance_weight"], "disturbance_weight", &cfg.disturbance_peaks);

    // Explicit design frequencies override the ones implied by weight specs,
    // so a resolved config (which stores weights as num/den) round-trips.
    if (j.contains("design_frequencies")) {
        const auto& f = j["design_frequencies"];
        if (f.contains("reference"))
            cfg.reference_peaks = as_doubles(f["reference"], "design_frequencies.reference");
        if (f.contains("disturbance") && f["disturbance"].is_array() && !f["disturbance"].empty())
            cfg.disturbance_peaks = as_doubles(f["disturbance"], "design_frequencies.disturbance");
    }

    if (j.contains("gamma")) {
        const auto& g = j["gamma"];
        cfg.design.gamma_lo = g.value("lo", cfg.design.gamma_lo);
        cfg.design.gamma_hi = g.value("hi", cfg.design.gamma_hi);
        cfg.design.gamma_tol = g.value("tol", cfg.design.gamma_tol);
    }
    if (j.contains("regularization")) {
        const auto& r = j["regularization"];
        cfg.design.eps_u = r.value("eps_u", cfg.design.eps_u);
        cfg.design.eps_n = r.value("eps_n", cfg.design.eps_n);
    }
    cfg.design.validate();

    // Simulation defaults: unit sinusoids at the weight peaks.
    cfg.sim.n_sim = 4 * cfg.design.M;
    if (j.contains("simulation")) {
        const auto& s = j["simulation"];
        cfg.sim.duration = s.value("duration", cfg.sim.duration);
        cfg.sim.n_sim = s.value("fast_factor", cfg.sim.n_sim);
        cfg.sim.window_fraction = s.value("window_fraction", cfg.sim.window_fraction);
        if (s.contains("reference"))
            cfg.reference = parse_signal(s["reference"], "simulation.reference");
        if (s.contains("disturbance"))
            cfg.disturbance = parse_signal(s["disturbance"], "simulation.disturbance");
    }
    if (cfg.reference.empty())
        for (double w : cfg.reference_peaks)
            cfg.reference.components.push_back({1.0, w, 0.0});
    if (cfg.disturbance.empty() && !cfg.disturbance_peaks.empty())
        for (double w : cfg.disturbance_peaks)
            cfg.disturbance.components.push_back({1.0, w, 0.0});
    if (cfg.reference.empty())
        throw ConfigError("simulation.reference: no components and no weight peaks to default to");
    if (cfg.sim.n_sim <= 0 || cfg.sim.n_sim % cfg.design.M != 0)
        throw ConfigError("simulation.fast_factor: must be a positive multiple of M");
    if (cfg.sim.duration < 0.0)
        throw ConfigError("simulation.duration: must be >= 0");
    if (!(cfg.sim.window_fraction > 0.0) || cfg.sim.window_fraction > 1.0)
        throw ConfigError("simulation.window_fraction: must lie in (0, 1]");

    if (j.contains("perturbation") && !j["perturbation"].is_null())
        cfg.perturbation = parse_tf(j["perturbation"], "perturbation");

    if (j.contains("probe") && j["probe"].contains("omegas")) {
        cfg.probe_omegas = as_doubles(j["probe"]["omegas"], "probe.omegas");
    } else {
        for (double w : cfg.reference_peaks)
            for (double fac : {0.9, 0.95, 1.0, 1.05, 1.1})
                cfg.probe_omegas.push_back(w * fac);
    }
    return cfg;
}

std::string resolved_config_json(const ResolvedConfig& cfg) {
    json j;
    j["schema"] = kConfigSchema;
    j["name"] = cfg.name;
    j["plant"] = tf_json(cfg.design.plant);
    j["sampling"] = {{"h", cfg.design.h}, {"M", cfg.design.M}, {"N", cfg.design.N}};
    j["delay_frames"] = cfg.design.delay_frames;
    j["reference_weight"] = tf_json(cfg.design.reference_weight);
    if (cfg.design.disturbance_weight)
        j["disturbance_weight"] = tf_json(*cfg.design.disturbance_weight);
    j["design_frequencies"] = {{"reference", cfg.reference_peaks},
                               {"disturbance", cfg.disturbance_peaks}};
    j["gamma"] = {{"lo", cfg.design.gamma_lo},
                  {"hi", cfg.design.gamma_hi},
                  {"tol", cfg.design.gamma_tol}};
    j["regularization"] = {{"eps_u", cfg.design.eps_u}, {"eps_n", cfg.design.eps_n}};
    json sim;
    sim["duration"] = cfg.sim.duration;
    sim["fast_factor"] = cfg.sim.n_sim;
    sim["window_fraction"] = cfg.sim.window_fraction;
    sim["reference"] = signal_json(cfg.reference);
    sim["disturbance"] = signal_json(cfg.disturbance);
    j["simulation"] = sim;
    if (cfg.perturbation)
        j["perturbation"] = tf_json(*cfg.perturbation);
    j["probe"] = {{"omegas", cfg.probe_omegas}};
    return j.dump(2) + "\n";
}

} // namespace hyperc
