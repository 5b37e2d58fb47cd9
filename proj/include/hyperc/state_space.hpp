#pragma once

#include <complex>

#include <Eigen/Core>

#include "hyperc/transfer_function.hpp"

namespace hyperc {

/// dx/dt = A x + B u, y = C x + D u
struct ContinuousStateSpace {
    Eigen::MatrixXd A, B, C, D;

    ContinuousStateSpace() = default;
    ContinuousStateSpace(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c,
                         Eigen::MatrixXd d);

    Eigen::Index states() const { return A.rows(); }
    Eigen::Index inputs() const { return B.cols(); }
    Eigen::Index outputs() const { return C.rows(); }
};

/// x[k+1] = A x[k] + B u[k], y[k] = C x[k] + D u[k], one step per `period` seconds.
struct DiscreteStateSpace {
    Eigen::MatrixXd A, B, C, D;
    double period = 0.0;

    DiscreteStateSpace() = default;
    DiscreteStateSpace(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c,
                       Eigen::MatrixXd d, double period_s);

    Eigen::Index states() const { return A.rows(); }
    Eigen::Index inputs() const { return B.cols(); }
    Eigen::Index outputs() const { return C.rows(); }
};

/// Minimal-order controllable-canonical realization of a proper transfer function.
ContinuousStateSpace to_state_space(const TransferFunction& tf);
DiscreteStateSpace to_state_space(const TransferFunction& tf, double period);

/// Exact zero-order-hold discretization: A_d = e^{A delta}, B_d = Gamma(delta).
DiscreteStateSpace c2d_zoh(const ContinuousStateSpace& sys, double delta);

ContinuousStateSpace series(const ContinuousStateSpace& first, const ContinuousStateSpace& second);
ContinuousStateSpace parallel(const ContinuousStateSpace& a, const ContinuousStateSpace& b);
/// Closes the loop u1 = w + sign*y2 with u2 = y1; output is y1.
ContinuousStateSpace feedback(const ContinuousStateSpace& forward,
                              const ContinuousStateSpace& loop, int sign = -1);

DiscreteStateSpace series(const DiscreteStateSpace& first, const DiscreteStateSpace& second);
DiscreteStateSpace parallel(const DiscreteStateSpace& a, const DiscreteStateSpace& b);
DiscreteStateSpace feedback(const DiscreteStateSpace& forward, const DiscreteStateSpace& loop,
                            int sign = -1);

/// C (x I - A)^{-1} B + D at a complex point.
Eigen::MatrixXcd evaluate_at(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                             const Eigen::MatrixXd& C, const Eigen::MatrixXd& D,
                             std::complex<double> point);

Eigen::MatrixXcd frequency_response(const ContinuousStateSpace& sys, double omega);
Eigen::MatrixXcd frequency_response(const DiscreteStateSpace& sys, double omega);

} // namespace hyperc
