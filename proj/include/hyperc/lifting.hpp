#pragma once

#include <vector>

#include <Eigen/Core>

#include "hyperc/state_space.hpp"

namespace hyperc {

/// Inserts factor-1 samples: output[m*factor] = input[m], zero elsewhere.
std::vector<double> upsample(const std::vector<double>& input, int factor);

/// Frame-rate form of a fast-rate SISO controller run on upsampled input:
/// one scalar input per frame of length h, M outputs distributed over the frame.
struct LiftedController {
    Eigen::MatrixXd barA; // n x n
    Eigen::MatrixXd barB; // n x 1
    Eigen::MatrixXd barC; // M x n
    Eigen::MatrixXd barD; // M x 1
    int M = 1;
    double h = 0.0;

    Eigen::Index states() const { return barA.rows(); }
};

/// Generalized hold distributing M values over one frame [0, h).
/// Only the zero-order kind (M indicator functions partitioning [0, h))
/// is implemented; the enum leaves room for other hold shapes.
struct GeneralizedHold {
    enum class Kind { ZeroOrder };

    int M = 1;
    double h = 0.0;
    Kind kind = Kind::ZeroOrder;

    /// Index of the interval containing theta, in [0, M).
    int active_segment(double theta) const;
};

/// Frame-lifts a fast-rate SISO controller clocked at h/M (Ad^M, Ad^{M-1}Bd, ...).
LiftedController lift_controller(const DiscreteStateSpace& fast_controller, int factor);

/// Response matrix of the plant to the generalized hold over [0, theta]:
/// B(theta) = integral_0^theta e^{A(theta-tau)} B H(tau) dtau, one column per segment.
Eigen::MatrixXd hold_response(const ContinuousStateSpace& plant, double theta, int M, double h);

/// Frame-lifted closed loop of sampler + upsampler + hold + plant with
/// intersample error maps evaluated on a grid of offsets in [0, h).
struct LiftedClosedLoop {
    Eigen::MatrixXd state_a;   // (n_d + n_c) x (n_d + n_c)
    Eigen::MatrixXd state_b;   // (n_d + n_c) x 1, acts on r[k](0)
    Eigen::MatrixXd output_c;  // G x (n_d + n_c), error map per grid offset
    Eigen::MatrixXd output_d;  // G x G, maps grid samples of r[k](.) to e[k](.)
    Eigen::VectorXd theta_grid;
    double h = 0.0;
    Eigen::Index controller_states = 0;
    Eigen::Index plant_states = 0;

    double spectral_radius() const;
    bool stable() const;
};

LiftedClosedLoop build_lifted_closed_loop(const ContinuousStateSpace& plant,
                                          const LiftedController& controller,
                                          const Eigen::VectorXd& theta_grid);

/// Iterates the lifted recursion over `frame_inputs` (one row per frame,
/// columns = r[k](theta_i) on the loop's grid); returns e[k](theta_i) rows.
Eigen::MatrixXd lifted_simulate(const LiftedClosedLoop& loop, const Eigen::MatrixXd& frame_inputs);

} // namespace hyperc
