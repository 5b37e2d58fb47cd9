#include "hyperc/lifting.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "hyperc/errors.hpp"
#include "hyperc/linalg.hpp"

namespace hyperc {

std::vector<double> upsample(const std::vector<double>& input, int factor) {
    if (factor < 1)
        throw ConfigError("upsample: factor must be >= 1");
    std::vector<double> out(input.size() * static_cast<size_t>(factor), 0.0);
    for (size_t m = 0; m < input.size(); ++m)
        out[m * factor] = input[m];
    return out;
}

int GeneralizedHold::active_segment(double theta) const {
    const int i = static_cast<int>(std::floor(theta * M / h));
    return std::min(std::max(i, 0), M - 1);
}

LiftedController lift_controller(const DiscreteStateSpace& fast_controller, int factor) {
    if (factor < 1)
        throw ConfigError("lift_controller: factor must be >= 1");
    if (fast_controller.inputs() != 1 || fast_controller.outputs() != 1)
        throw ConfigError("lift_controller: controller must be SISO");
    const auto& K = fast_controller;
    const auto n = K.states();
    LiftedController out;
    out.M = factor;
    out.h = K.period * factor;
    out.barC.resize(factor, n);
    out.barD.resize(factor, 1);
    // Outputs within one frame of upsampled input e: y[0] = C x + D e,
    // y[i] = C A^i x + C A^{i-1} B e for i >= 1.
    out.barC.row(0) = K.C;
    out.barD.row(0) = K.D;
    Eigen::MatrixXd Apow = Eigen::MatrixXd::Identity(n, n); // A^{i-1} at row i
    for (int i = 1; i < factor; ++i) {
        out.barD.row(i) = K.C * Apow * K.B;
        Apow = K.A * Apow;
        out.barC.row(i) = K.C * Apow;
    }
    out.barB = Apow * K.B; // A^{M-1} B
    out.barA = K.A * Apow; // A^M
    return out;
}

Eigen::MatrixXd hold_response(const ContinuousStateSpace& plant, double theta, int M, double h) {
    if (M < 1 || h <= 0.0)
        throw ConfigError("hold_response: need M >= 1 and h > 0");
    if (theta < 0.0 || theta > h)
        throw ConfigError("hold_response: offset must lie in [0, h]");
    const auto n = plant.states();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, M);
    const double seg = h / M;
    const Eigen::MatrixXd gamma_seg = zoh_input_integral(plant.A, plant.B, seg);
    for (int j = 0; j < M; ++j) {
        const double lo = j * seg;
        const double hi = (j + 1) * seg;
        if (theta <= lo)
            continue;
        if (theta >= hi)
            out.col(j) = expm(plant.A, theta - hi) * gamma_seg;
        else
            out.col(j) = zoh_input_integral(plant.A, plant.B, theta - lo);
    }
    return out;
}

double LiftedClosedLoop::spectral_radius() const {
    return hyperc::spectral_radius(state_a);
}

bool LiftedClosedLoop::stable() const {
    return spectral_radius() < 1.0;
}

LiftedClosedLoop build_lifted_closed_loop(const ContinuousStateSpace& plant,
                                          const LiftedController& controller,
                                          const Eigen::VectorXd& theta_grid) {
    if (plant.inputs() != 1 || plant.outputs() != 1)
        throw ConfigError("build_lifted_closed_loop: plant must be SISO");
    if (plant.D.size() != 0 && plant.D.cwiseAbs().maxCoeff() != 0.0)
        throw ConfigError("build_lifted_closed_loop: plant must be strictly proper");
    if (controller.barC.rows() != controller.M)
        throw ConfigError("build_lifted_closed_loop: controller output rows != M");
    if (theta_grid.size() == 0)
        throw ConfigError("build_lifted_closed_loop: empty offset grid");
    for (Eigen::Index i = 0; i < theta_grid.size(); ++i) {
        if (theta_grid[i] < 0.0 || theta_grid[i] >= controller.h)
            throw ConfigError("build_lifted_closed_loop: offsets must lie in [0, h)");
        if (i > 0 && theta_grid[i] <= theta_grid[i - 1])
            throw ConfigError("build_lifted_closed_loop: offsets must be strictly increasing");
    }

    const auto nd = controller.states();
    const auto nc = plant.states();
    const double h = controller.h;
    const Eigen::MatrixXd Bh = hold_response(plant, h, controller.M, h);
    const Eigen::MatrixXd eAh = expm(plant.A, h);
    const Eigen::MatrixXd& Cc = plant.C;

    LiftedClosedLoop loop;
    loop.h = h;
    loop.controller_states = nd;
    loop.plant_states = nc;
    loop.theta_grid = theta_grid;
    loop.state_a.resize(nd + nc, nd + nc);
    loop.state_a.topLeftCorner(nd, nd) = controller.barA;
    loop.state_a.topRightCorner(nd, nc) = -controller.barB * Cc;
    loop.state_a.bottomLeftCorner(nc, nd) = Bh * controller.barC;
    loop.state_a.bottomRightCorner(nc, nc) = eAh - Bh * controller.barD * Cc;
    loop.state_b.resize(nd + nc, 1);
    loop.state_b.topRows(nd) = controller.barB;
    loop.state_b.bottomRows(nc) = Bh * controller.barD;

    const auto G = theta_grid.size();
    loop.output_c.resize(G, nd + nc);
    loop.output_d = Eigen::MatrixXd::Zero(G, G);
    for (Eigen::Index g = 0; g < G; ++g) {
        const double theta = theta_grid[g];
        const Eigen::MatrixXd Bt = hold_response(plant, theta, controller.M, h);
        loop.output_c.block(g, 0, 1, nd) = -Cc * Bt * controller.barC;
        loop.output_c.block(g, nd, 1, nc) =
            -Cc * expm(plant.A, theta) + Cc * Bt * controller.barD * Cc;
        loop.output_d(g, g) += 1.0;
        loop.output_d(g, 0) -= (Cc * Bt * controller.barD)(0, 0);
    }
    return loop;
}

Eigen::MatrixXd lifted_simulate(const LiftedClosedLoop& loop, const Eigen::MatrixXd& frame_inputs) {
    if (frame_inputs.cols() != loop.theta_grid.size())
        throw ConfigError("lifted_simulate: input columns must match the offset grid");
    const auto frames = frame_inputs.rows();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(loop.state_a.rows());
    Eigen::MatrixXd e(frames, frame_inputs.cols());
    for (Eigen::Index k = 0; k < frames; ++k) {
        e.row(k) = (loop.output_c * x).transpose() + frame_inputs.row(k) * loop.output_d.transpose();
        x = loop.state_a * x + loop.state_b * frame_inputs(k, 0);
    }
    return e;
}

} // namespace hyperc
