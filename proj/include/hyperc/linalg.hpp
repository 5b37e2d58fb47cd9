#pragma once

#include <complex>

#include <Eigen/Core>

namespace hyperc {

/// Matrix exponential e^A by scaling-and-squaring with a diagonal Pade kernel.
/// Inputs are scaled until ||A||_1 <= 0.5 before the kernel is applied.
Eigen::MatrixXd expm(const Eigen::MatrixXd& A);
Eigen::MatrixXd expm(const Eigen::MatrixXd& A, double t);

/// Gamma(delta) = integral_0^delta e^{A tau} B dtau via one augmented exponential.
Eigen::MatrixXd zoh_input_integral(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                   double delta);

/// Full spectrum with multiplicity.
Eigen::VectorXcd eigenvalues(const Eigen::MatrixXd& A);

struct EigenPairs {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors; // columns, normalized
};
EigenPairs eigen_pairs(const Eigen::MatrixXd& A);

double spectral_radius(const Eigen::MatrixXd& A);

/// Solves L^T X + X L = W for X, with L stable (used for Newton refinement).
Eigen::MatrixXd solve_sylvester_stable(const Eigen::MatrixXd& L, const Eigen::MatrixXd& W);

struct CareResult {
    Eigen::MatrixXd X;          // symmetric stabilizing solution
    double residual = 0.0;      // ||E'X + XE + XSX + Q||_F
    double rel_residual = 0.0;  // residual / max(1, ||X||_F)
    Eigen::VectorXcd closed_loop_eigs; // spectrum of E + S X
};

/// Solves E'X + XE + XSX + Q = 0 for the stabilizing X via the ordered Schur
/// form of the Hamiltonian [E S; -Q -E'], followed by one Newton step.
/// Throws InfeasibleError when the Hamiltonian has eigenvalues on (or numerically
/// at) the imaginary axis, NumericalError when the subspace is ill-conditioned.
CareResult solve_care(const Eigen::MatrixXd& E, const Eigen::MatrixXd& S,
                      const Eigen::MatrixXd& Q);

/// Orthonormal real basis (2n x n) of the stable invariant subspace of a
/// real 2n x 2n matrix with no eigenvalues on the imaginary axis.
Eigen::MatrixXd stable_invariant_subspace(const Eigen::MatrixXd& H);

} // namespace hyperc
