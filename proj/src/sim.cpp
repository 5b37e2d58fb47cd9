#include "hyperc/sim.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include <Eigen/Dense>

#include "hyperc/errors.hpp"
#include "hyperc/linalg.hpp"

namespace hyperc {

double SignalSpec::value_at(double t) const {
    double v = 0.0;
    for (const auto& c : components)
        v += c.amplitude * std::sin(c.omega * t + c.phase);
    return v;
}

namespace {

void validate_spec(const SignalSpec& s, const char* what) {
    for (const auto& c : s.components)
        if (!(c.omega > 0.0))
            throw ConfigError(std::string(what) + ": component frequency must be positive");
}

} // namespace

SimulationResult simulate_closed_loop(const ContinuousStateSpace& plant,
                                      const LiftedController& controller,
                                      const SignalSpec& reference,
                                      const SignalSpec* input_disturbance,
                                      const ContinuousStateSpace* reference_prefilter,
                                      double delay_seconds, const SimulationOptions& opts) {
    if (plant.inputs() != 1 || plant.outputs() != 1)
        throw ConfigError("simulate_closed_loop: plant must be SISO");
    validate_spec(reference, "reference");
    if (input_disturbance)
        validate_spec(*input_disturbance, "disturbance");
    const int M = controller.M;
    const double h = controller.h;
    int n_sim = opts.n_sim > 0 ? opts.n_sim : 4 * M;
    if (n_sim % M != 0)
        throw ConfigError("simulate_closed_loop: n_sim must be a multiple of M");
    if (opts.duration < 0.0)
        throw ConfigError("simulate_closed_loop: negative duration");

    const Eigen::Index nP = plant.states();
    const Eigen::Index nF = reference_prefilter ? reference_prefilter->states() : 0;
    const size_t n_ref = reference.components.size();
    const size_t n_dist = input_disturbance ? input_disturbance->components.size() : 0;
    const Eigen::Index n_total = nP + nF + 2 * static_cast<Eigen::Index>(n_ref + n_dist);

    // Combined autonomous-plus-held-input continuous system.
    Eigen::MatrixXd Ac = Eigen::MatrixXd::Zero(n_total, n_total);
    Ac.topLeftCorner(nP, nP) = plant.A;
    if (reference_prefilter)
        Ac.block(nP, nP, nF, nF) = reference_prefilter->A;
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n_total);
    if (opts.plant_initial_state.size() > 0) {
        if (opts.plant_initial_state.size() != nP)
            throw ConfigError("simulate_closed_loop: initial state size must match the plant");
        x0.head(nP) = opts.plant_initial_state;
    }
    std::vector<Eigen::Index> ref_rows, dist_rows;
    Eigen::Index off = nP + nF;
    for (size_t i = 0; i < n_ref; ++i) {
        const auto& c = reference.components[i];
        Ac(off, off + 1) = c.omega;
        Ac(off + 1, off) = -c.omega;
        x0[off] = c.amplitude * std::sin(c.phase);
        x0[off + 1] = c.amplitude * std::cos(c.phase);
        if (reference_prefilter)
            Ac.block(nP, off, nF, 1) += reference_prefilter->B;
        ref_rows.push_back(off);
        off += 2;
    }
    for (size_t i = 0; i < n_dist; ++i) {
        const auto& c = input_disturbance->components[i];
        Ac(off, off + 1) = c.omega;
        Ac(off + 1, off) = -c.omega;
        x0[off] = c.amplitude * std::sin(c.phase);
        x0[off + 1] = c.amplitude * std::cos(c.phase);
        Ac.block(0, off, nP, 1) += plant.B; // disturbance enters at the plant input
        dist_rows.push_back(off);
        off += 2;
    }
    Eigen::MatrixXd Bc = Eigen::MatrixXd::Zero(n_total, 1);
    Bc.topRows(nP) = plant.B;

    const double dt = h / n_sim;
    const DiscreteStateSpace step = c2d_zoh(ContinuousStateSpace(Ac, Bc,
                                            Eigen::MatrixXd::Zero(1, n_total),
                                            Eigen::MatrixXd::Zero(1, 1)), dt);

    const Eigen::Index n_steps = static_cast<Eigen::Index>(std::llround(opts.duration / dt));
    SimulationResult res;
    res.h = h;
    res.M = M;
    res.n_sim = n_sim;
    res.delay = delay_seconds;
    res.t.resize(n_steps);
    res.r.resize(n_steps);
    res.r_delayed.resize(n_steps);
    res.target_normalized.resize(n_steps);
    res.y.resize(n_steps);
    res.e.resize(n_steps);
    res.e_tilde.resize(n_steps);
    res.u.resize(n_steps);

    // The tracked target: the delayed reference, scaled per component by the
    // prefilter's complex gain when the loop measures the filtered error.
    std::vector<SignalComponent> target_comps;
    for (const auto& c : reference.components) {
        SignalComponent tc = c;
        if (reference_prefilter) {
            const Eigen::MatrixXcd g = frequency_response(*reference_prefilter, c.omega);
            tc.amplitude *= std::abs(g(0, 0));
            tc.phase += std::arg(g(0, 0));
        }
        target_comps.push_back(tc);
    }

    Eigen::VectorXd x = x0;
    Eigen::VectorXd xk = Eigen::VectorXd::Zero(controller.states());
    Eigen::VectorXd u_frame = Eigen::VectorXd::Zero(M);
    const int steps_per_move = n_sim / M;

    for (Eigen::Index i = 0; i < n_steps; ++i) {
        const double t = i * dt;
        if (i % n_sim == 0) {
            double meas = 0.0;
            if (reference_prefilter)
                meas = (reference_prefilter->C * x.segment(nP, nF))(0, 0);
            else
                for (auto rr : ref_rows)
                    meas += x[rr];
            const double y0 = (plant.C * x.head(nP))(0, 0);
            const double e0 = meas - y0;
            u_frame = controller.barC * xk + controller.barD.col(0) * e0;
            xk = controller.barA * xk + controller.barB.col(0) * e0;
        }
        double r_now = 0.0;
        for (auto rr : ref_rows)
            r_now += x[rr];
        double rd = 0.0;
        for (const auto& c : reference.components)
            rd += c.amplitude * std::sin(c.omega * (t - delay_seconds) + c.phase);
        double target = 0.0;
        for (const auto& c : target_comps)
            target += c.amplitude * std::sin(c.omega * (t - delay_seconds) + c.phase);
        const double y = (plant.C * x.head(nP))(0, 0);
        const double u = u_frame[(i % n_sim) / steps_per_move];
        res.t[i] = t;
        res.r[i] = r_now;
        res.r_delayed[i] = rd;
        res.target_normalized[i] = target;
        res.y[i] = y;
        res.e[i] = r_now - y;
        res.e_tilde[i] = target - y;
        res.u[i] = u;
        x = step.A * x + step.B * u;
        if (x.cwiseAbs().maxCoeff() > opts.overflow_guard) {
            res.t.conservativeResize(i + 1);
            res.r.conservativeResize(i + 1);
            res.r_delayed.conservativeResize(i + 1);
            res.target_normalized.conservativeResize(i + 1);
            res.y.conservativeResize(i + 1);
            res.e.conservativeResize(i + 1);
            res.e_tilde.conservativeResize(i + 1);
            res.u.conservativeResize(i + 1);
            throw NumericalError("closed-loop simulation diverged at t = " + std::to_string(t) +
                                 " (" + std::to_string(i + 1) + " grid points computed)");
        }
    }
    if (n_steps > 0)
        res.metrics = steady_state_metrics(res, opts.window_fraction);
    return res;
}

SteadyStateMetrics steady_state_metrics(const SimulationResult& result, double window_fraction) {
    if (window_fraction <= 0.0 || window_fraction > 1.0)
        throw ConfigError("steady_state_metrics: window fraction must lie in (0, 1]");
    const Eigen::Index n = result.t.size();
    const Eigen::Index start = static_cast<Eigen::Index>(
        std::floor((1.0 - window_fraction) * static_cast<double>(n)));
    if (start >= n)
        throw ConfigError("steady_state_metrics: window longer than trajectory");
    const Eigen::Index len = n - start;
    const Eigen::VectorXd err = result.e_tilde.tail(len);
    const Eigen::VectorXd tgt = result.target_normalized.tail(len);
    SteadyStateMetrics m;
    m.window_samples = len;
    m.window_start = result.t[start];
    m.rms = std::sqrt(err.squaredNorm() / len);
    m.peak = err.cwiseAbs().maxCoeff();
    const double tgt_rms = std::sqrt(tgt.squaredNorm() / len);
    const double tgt_peak = tgt.cwiseAbs().maxCoeff();
    m.rel_rms = tgt_rms > 0.0 ? m.rms / tgt_rms : m.rms;
    m.rel_peak = tgt_peak > 0.0 ? m.peak / tgt_peak : m.peak;
    return m;
}

std::vector<GainProbeSample> frequency_gain_probe(const ContinuousStateSpace& plant,
                                                  const LiftedController& controller,
                                                  double delay_seconds,
                                                  const std::vector<double>& omegas,
                                                  const SimulationOptions& opts, int threads) {
    auto probe_one = [&](double w) {
        GainProbeSample sample;
        sample.omega = w;
        SignalSpec ref;
        ref.components.push_back({1.0, w, 0.0});
        SimulationOptions local = opts;
        for (int attempt = 0; attempt < 3; ++attempt) {
            SimulationResult r =
                simulate_closed_loop(plant, controller, ref, nullptr, nullptr, delay_seconds, local);
            // Converged when the two halves of the steady window agree.
            const auto full = steady_state_metrics(r, local.window_fraction);
            const auto half = steady_state_metrics(r, local.window_fraction / 2.0);
            const double diff = std::abs(full.rel_rms - half.rel_rms);
            sample.gain = half.rel_rms;
            if (diff <= 0.05 * std::max({full.rel_rms, half.rel_rms, 1e-12})) {
                sample.converged = true;
                break;
            }
            local.duration *= 2.0;
        }
        return sample;
    };

    std::vector<GainProbeSample> out(omegas.size());
    if (threads <= 1 || omegas.size() <= 1) {
        for (size_t i = 0; i < omegas.size(); ++i)
            out[i] = probe_one(omegas[i]);
        return out;
    }
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (size_t i = next.fetch_add(1); i < omegas.size(); i = next.fetch_add(1))
            out[i] = probe_one(omegas[i]);
    };
    std::vector<std::thread> pool;
    const int n_workers = std::min<int>(threads, static_cast<int>(omegas.size()));
    pool.reserve(n_workers);
    for (int i = 0; i < n_workers; ++i)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();
    return out;
}

} // namespace hyperc
