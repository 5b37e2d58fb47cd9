#include "hyperc/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "hyperc/errors.hpp"

namespace hyperc {

namespace {

// Diagonal [7/7] Pade approximant; with ||A||_1 <= 0.5 the truncation error is
// far below double round-off.
Eigen::MatrixXd expm_pade7(const Eigen::MatrixXd& A) {
    static const double b[] = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                               25200.0,    1512.0,    56.0,      1.0};
    const auto n = A.rows();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd A2 = A * A;
    const Eigen::MatrixXd A4 = A2 * A2;
    const Eigen::MatrixXd A6 = A4 * A2;
    const Eigen::MatrixXd U = A * (b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
    const Eigen::MatrixXd V = b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
    return (V - U).partialPivLu().solve(V + U);
}

} // namespace

Eigen::MatrixXd expm(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols())
        throw ConfigError("expm: matrix must be square");
    if (A.rows() == 0)
        return A;
    if (!A.allFinite())
        throw ConfigError("expm: matrix has non-finite entries");
    const double norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > 0.5)
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
    Eigen::MatrixXd E = expm_pade7(A / std::pow(2.0, squarings));
    for (int i = 0; i < squarings; ++i)
        E = E * E;
    return E;
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& A, double t) {
    return expm((A * t).eval());
}

Eigen::MatrixXd zoh_input_integral(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                   double delta) {
    const auto n = A.rows();
    const auto m = B.cols();
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
    aug.topLeftCorner(n, n) = A;
    aug.topRightCorner(n, m) = B;
    return expm(aug, delta).topRightCorner(n, m);
}

Eigen::VectorXcd eigenvalues(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols())
        throw ConfigError("eigenvalues: matrix must be square");
    if (A.rows() == 0)
        return Eigen::VectorXcd();
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw NumericalError("eigenvalue iteration failed to converge");
    return es.eigenvalues();
}

EigenPairs eigen_pairs(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols())
        throw ConfigError("eigen_pairs: matrix must be square");
    EigenPairs out;
    if (A.rows() == 0)
        return out;
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, /*computeEigenvectors=*/true);
    if (es.info() != Eigen::Success)
        throw NumericalError("eigenvalue iteration failed to converge");
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
    return out;
}

double spectral_radius(const Eigen::MatrixXd& A) {
    if (A.rows() == 0)
        return 0.0;
    return eigenvalues(A).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd solve_sylvester_stable(const Eigen::MatrixXd& L, const Eigen::MatrixXd& W) {
    // L^H Y + Y L = W via complex Schur of L and a columnwise triangular sweep.
    const auto n = L.rows();
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(L.cast<std::complex<double>>());
    if (schur.info() != Eigen::Success)
        throw NumericalError("Schur decomposition failed in Sylvester solve");
    const Eigen::MatrixXcd T = schur.matrixT();
    const Eigen::MatrixXcd U = schur.matrixU();
    Eigen::MatrixXcd Wt = U.adjoint() * W.cast<std::complex<double>>() * U;
    Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(n, n);
    const Eigen::MatrixXcd Th = T.adjoint(); // lower triangular
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::VectorXcd rhs = Wt.col(k);
        for (Eigen::Index i = 0; i < k; ++i)
            rhs -= T(i, k) * Y.col(i);
        Eigen::MatrixXcd Mk = Th;
        Mk.diagonal().array() += T(k, k);
        Y.col(k) = Mk.triangularView<Eigen::Lower>().solve(rhs);
    }
    return (U * Y * U.adjoint()).real();
}

Eigen::MatrixXd stable_invariant_subspace(const Eigen::MatrixXd& H) {
    const Eigen::Index nn = H.rows();
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(H.cast<std::complex<double>>());
    if (schur.info() != Eigen::Success)
        throw NumericalError("Schur decomposition of Hamiltonian failed");
    Eigen::MatrixXcd T = schur.matrixT();
    Eigen::MatrixXcd U = schur.matrixU();

    const double scale = std::max(1.0, T.diagonal().cwiseAbs().maxCoeff());
    Eigen::Index n_stable = 0;
    for (Eigen::Index i = 0; i < nn; ++i) {
        if (std::abs(T(i, i).real()) <= 1e-9 * scale)
            throw InfeasibleError("Hamiltonian eigenvalue on the imaginary axis");
        if (T(i, i).real() < 0.0)
            ++n_stable;
    }
    if (n_stable != nn / 2)
        throw InfeasibleError("Hamiltonian spectrum is not split evenly about the axis");

    // Bubble the stable eigenvalues to the leading diagonal positions with
    // unitary swaps of adjacent 1x1 blocks.
    auto swap_adjacent = [&](Eigen::Index k) {
        const std::complex<double> alpha = T(k, k);
        const std::complex<double> beta = T(k + 1, k + 1);
        const std::complex<double> gamma = T(k, k + 1);
        // Eigenvector of [[alpha, gamma], [0, beta]] for beta.
        Eigen::Vector2cd v(gamma, beta - alpha);
        const double nv = v.norm();
        if (nv == 0.0)
            return; // identical entries, nothing to do
        v /= nv;
        Eigen::Matrix2cd G;
        G.col(0) = v;
        G.col(1) << -std::conj(v(1)), std::conj(v(0));
        T.block(k, k, 2, nn - k) = G.adjoint() * T.block(k, k, 2, nn - k);
        T.block(0, k, k + 2, 2) = T.block(0, k, k + 2, 2) * G;
        T(k + 1, k) = 0.0;
        U.middleCols(k, 2) = U.middleCols(k, 2) * G;
    };
    bool moved = true;
    while (moved) {
        moved = false;
        for (Eigen::Index k = 0; k + 1 < nn; ++k) {
            if (T(k, k).real() >= 0.0 && T(k + 1, k + 1).real() < 0.0) {
                swap_adjacent(k);
                moved = true;
            }
        }
    }

    const Eigen::Index n = nn / 2;
    Eigen::MatrixXcd V = U.leftCols(n);
    // The selected spectrum is closed under conjugation, so [Re V, Im V]
    // spans an n-dimensional real subspace.
    Eigen::MatrixXd W(nn, 2 * n);
    W << V.real(), V.imag();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(W);
    qr.setThreshold(1e-12);
    if (qr.rank() < n)
        throw NumericalError("stable invariant subspace is rank deficient");
    Eigen::MatrixXd Qfull = qr.householderQ();
    return Qfull.leftCols(n);
}

CareResult solve_care(const Eigen::MatrixXd& E, const Eigen::MatrixXd& S,
                      const Eigen::MatrixXd& Q) {
    const Eigen::Index n = E.rows();
    if (E.cols() != n || S.rows() != n || S.cols() != n || Q.rows() != n || Q.cols() != n)
        throw ConfigError("solve_care: dimension mismatch");
    CareResult out;
    if (n == 0) {
        out.X.resize(0, 0);
        return out;
    }
    Eigen::MatrixXd H(2 * n, 2 * n);
    H << E, S, -Q, -E.transpose();

    const Eigen::MatrixXd basis = stable_invariant_subspace(H);
    const Eigen::MatrixXd U1 = basis.topRows(n);
    const Eigen::MatrixXd U2 = basis.bottomRows(n);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(U1);
    lu.setThreshold(1e-11);
    if (!lu.isInvertible())
        throw NumericalError("stable subspace ill-conditioned: X = U2 U1^{-1} not solvable");
    Eigen::MatrixXd X = U2 * lu.inverse();
    X = 0.5 * (X + X.transpose()).eval();

    auto residual_of = [&](const Eigen::MatrixXd& Xc) {
        return (E.transpose() * Xc + Xc * E + Xc * S * Xc + Q).eval();
    };

    // One Newton (defect correction) step; keep it only if it helps.
    const Eigen::MatrixXd R0 = residual_of(X);
    const Eigen::MatrixXd closed = E + S * X;
    Eigen::MatrixXd X_ref = X;
    double res0 = R0.norm();
    double res1 = res0;
    try {
        const Eigen::MatrixXd dX = solve_sylvester_stable(closed, -R0);
        Eigen::MatrixXd Xn = X + 0.5 * (dX + dX.transpose());
        const double rn = residual_of(Xn).norm();
        if (rn < res0) {
            X_ref = Xn;
            res1 = rn;
        }
    } catch (const NumericalError&) {
        // refinement is best-effort
    }

    out.X = X_ref;
    out.residual = res1;
    out.rel_residual = res1 / std::max(1.0, X_ref.norm());
    out.closed_loop_eigs = eigenvalues(E + S * X_ref);
    return out;
}

} // namespace hyperc
