#include "hyperc/hinf_norm.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "hyperc/errors.hpp"
#include "hyperc/linalg.hpp"

namespace hyperc {

namespace {

double largest_singular_value(const Eigen::MatrixXcd& G) {
    if (G.rows() == 0 || G.cols() == 0)
        return 0.0;
    return G.jacobiSvd().singularValues()(0);
}

double gain_at(const DiscreteStateSpace& sys, double theta) {
    return largest_singular_value(
        evaluate_at(sys.A, sys.B, sys.C, sys.D, std::exp(std::complex<double>(0.0, theta))));
}

// Moduli of the finite generalized eigenvalues of (M, L) via real QZ.
std::vector<std::complex<double>> pencil_eigenvalues(const Eigen::MatrixXd& M,
                                                     const Eigen::MatrixXd& L) {
    Eigen::RealQZ<Eigen::MatrixXd> qz(M, L);
    if (qz.info() != Eigen::Success)
        throw NumericalError("QZ iteration failed in norm computation");
    const Eigen::MatrixXd& S = qz.matrixS();
    const Eigen::MatrixXd& T = qz.matrixT();
    const Eigen::Index n = S.rows();
    const double tiny = 1e-14 * std::max(1.0, T.cwiseAbs().maxCoeff());
    std::vector<std::complex<double>> out;
    Eigen::Index k = 0;
    while (k < n) {
        const bool pair = (k + 1 < n) && (std::abs(S(k + 1, k)) > 1e-14 * (1.0 + std::abs(S(k, k)) + std::abs(S(k + 1, k + 1))));
        if (!pair) {
            if (std::abs(T(k, k)) > tiny)
                out.emplace_back(S(k, k) / T(k, k), 0.0);
            ++k;
        } else {
            // det(lambda*Tb - Sb) = a l^2 + b l + c with T lower-left zero
            const double a = T(k, k) * T(k + 1, k + 1);
            const double b = T(k, k + 1) * S(k + 1, k) - T(k, k) * S(k + 1, k + 1) -
                             T(k + 1, k + 1) * S(k, k);
            const double c = S(k, k) * S(k + 1, k + 1) - S(k, k + 1) * S(k + 1, k);
            if (std::abs(a) > tiny) {
                const std::complex<double> disc =
                    std::sqrt(std::complex<double>(b * b - 4.0 * a * c, 0.0));
                out.push_back((-b + disc) / (2.0 * a));
                out.push_back((-b - disc) / (2.0 * a));
            } else if (std::abs(b) > tiny) {
                out.emplace_back(-c / b, 0.0);
            }
            k += 2;
        }
    }
    return out;
}

} // namespace

bool norm_level_clear(const DiscreteStateSpace& sys, double gamma) {
    const Eigen::Index n = sys.states();
    const Eigen::Index m = sys.inputs();
    const Eigen::Index p = sys.outputs();
    if (n == 0)
        return gamma > largest_singular_value(sys.D.cast<std::complex<double>>());
    Eigen::MatrixXd R = gamma * gamma * Eigen::MatrixXd::Identity(m, m) - sys.D.transpose() * sys.D;
    Eigen::LLT<Eigen::MatrixXd> llt(R);
    if (llt.info() != Eigen::Success)
        return false; // gamma <= sigma_max(D): level certainly attained or exceeded
    const Eigen::MatrixXd Ri = llt.solve(Eigen::MatrixXd::Identity(m, m));
    const Eigen::MatrixXd Ashift = sys.A + sys.B * Ri * sys.D.transpose() * sys.C;
    const Eigen::MatrixXd Smat =
        Eigen::MatrixXd::Identity(p, p) + sys.D * Ri * sys.D.transpose();

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    M.topLeftCorner(n, n) = Ashift;
    M.bottomLeftCorner(n, n) = -sys.C.transpose() * Smat * sys.C;
    M.bottomRightCorner(n, n).setIdentity();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    L.topLeftCorner(n, n).setIdentity();
    L.topRightCorner(n, n) = -sys.B * Ri * sys.B.transpose();
    L.bottomRightCorner(n, n) = Ashift.transpose();

    for (const auto& ev : pencil_eigenvalues(M, L)) {
        if (std::abs(std::abs(ev) - 1.0) < 1e-7)
            return false;
    }
    return true;
}

double hinf_norm(const DiscreteStateSpace& sys, double tol) {
    const Eigen::Index n = sys.states();
    if (n == 0)
        return largest_singular_value(sys.D.cast<std::complex<double>>());
    const Eigen::VectorXcd eigs = eigenvalues(sys.A);
    if (eigs.cwiseAbs().maxCoeff() >= 1.0)
        return std::numeric_limits<double>::infinity();

    // Lower bound from frequency samples, including the resonance angles.
    double lo = 0.0;
    std::vector<double> angles{0.0, 0.5 * M_PI, M_PI};
    for (Eigen::Index i = 0; i < eigs.size(); ++i)
        angles.push_back(std::abs(std::arg(eigs[i])));
    for (double th : angles)
        lo = std::max(lo, gain_at(sys, th));
    lo = std::max(lo, largest_singular_value(sys.D.cast<std::complex<double>>()));

    const double floor_scale =
        1e-12 * (1.0 + sys.B.norm() * sys.C.norm() + sys.D.norm());
    if (lo <= floor_scale)
        return lo; // numerically the zero system

    double hi = 2.0 * lo;
    int guard = 0;
    while (!norm_level_clear(sys, hi)) {
        hi *= 2.0;
        if (++guard > 60)
            throw NumericalError("hinf_norm: upper bound search did not terminate");
    }
    while ((hi - lo) > tol * lo) {
        const double mid = 0.5 * (lo + hi);
        if (norm_level_clear(sys, mid))
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace hyperc
