#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hyperc/lifting.hpp"
#include "hyperc/state_space.hpp"
#include "hyperc/transfer_function.hpp"

namespace hyperc {

/// Band-emphasis weight s/(s^2 + zeta*s + omega^2): sharp peak near omega,
/// zero at the origin, strictly proper.
TransferFunction make_weight(double omega, double zeta_coeff);

/// Numerator s over the product of the quadratic factors, one peak per frequency.
TransferFunction make_weight_product(const std::vector<double>& omegas, double zeta_coeff);

struct DesignConfig {
    TransferFunction plant;
    TransferFunction reference_weight;                  // F_r, strictly proper
    std::optional<TransferFunction> disturbance_weight; // F_d, strictly proper
    double h = 1.0;       // frame period
    int M = 8;            // control upsampling factor
    int N = 8;            // fast-sample factor, multiple of M
    int delay_frames = 0; // tracking delay L = delay_frames * h
    double gamma_lo = 0.05;
    double gamma_hi = 100.0;
    double gamma_tol = 1e-3;
    double eps_u = 1e-4; // control regularization in the performance vector
    double eps_n = 1e-4; // fictitious measurement noise weight

    double delay_seconds() const { return delay_frames * h; }
    double fast_step() const { return h / N; }

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Single fast-step discrete model of the design interconnection:
/// plant, reference/disturbance filters and the delay line, all clocked at h/N.
/// Inputs per fast step: [r; d; u]; outputs: delayed error (performance) and
/// undelayed filtered error (measurement), both without feedthrough.
struct FastRatePlant {
    Eigen::MatrixXd A;
    Eigen::VectorXd b_ref;
    Eigen::VectorXd b_dist; // size 0 when no disturbance channel
    Eigen::VectorXd b_ctrl;
    Eigen::RowVectorXd c_perf;
    Eigen::RowVectorXd c_meas;
    double delta = 0.0;
    Eigen::Index n_plant = 0, n_ref_filter = 0, n_dist_filter = 0, n_delay = 0;

    bool has_disturbance() const { return b_dist.size() > 0; }
    Eigen::Index states() const { return A.rows(); }
};

FastRatePlant build_fast_plant(const DesignConfig& cfg);

/// Column/row bookkeeping of the frame-lifted two-port plant.
struct ChannelLegend {
    int ref_cols = 0;     // leading B1 columns: fast samples of r
    int dist_cols = 0;    // next B1 columns: fast samples of d
    int noise_cols = 1;   // trailing B1 column: measurement noise
    int perf_rows = 0;    // leading C1 rows: fast samples of the delayed error
    int control_rows = 0; // trailing C1 rows: eps_u * u
};

/// Frame-lifted FSFH design plant fed to the H-infinity synthesis.
struct DiscreteGeneralizedPlant {
    Eigen::MatrixXd A, B1, B2, C1, C2, D11, D12, D21, D22;
    double h = 0.0;
    ChannelLegend legend;

    Eigen::Index states() const { return A.rows(); }
    Eigen::Index exo_inputs() const { return B1.cols(); }
    Eigen::Index controls() const { return B2.cols(); }
};

DiscreteGeneralizedPlant build_generalized_plant(const DesignConfig& cfg);

/// Repackages a frame-rate synthesis controller (1 input, M outputs) for simulation.
LiftedController unlift_controller(const DiscreteStateSpace& frame_controller, int M);

} // namespace hyperc
