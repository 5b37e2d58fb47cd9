#include "hyperc/state_space.hpp"

#include <Eigen/Dense>

#include "hyperc/errors.hpp"
#include "hyperc/linalg.hpp"

namespace hyperc {

namespace {

void check_dims(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& C,
                const Eigen::MatrixXd& D, const char* what) {
    if (A.rows() != A.cols() || B.rows() != A.rows() || C.cols() != A.rows() ||
        D.rows() != C.rows() || D.cols() != B.cols())
        throw ConfigError(std::string(what) + ": inconsistent state-space dimensions");
}

struct Quad {
    Eigen::MatrixXd A, B, C, D;
};

Quad series_quad(const Quad& g1, const Quad& g2) {
    if (g2.B.cols() != g1.C.rows())
        throw ConfigError("series: output/input port mismatch");
    const auto n1 = g1.A.rows(), n2 = g2.A.rows();
    Quad out;
    out.A = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
    out.A.topLeftCorner(n1, n1) = g1.A;
    out.A.bottomLeftCorner(n2, n1) = g2.B * g1.C;
    out.A.bottomRightCorner(n2, n2) = g2.A;
    out.B = Eigen::MatrixXd(n1 + n2, g1.B.cols());
    out.B << g1.B, g2.B * g1.D;
    out.C = Eigen::MatrixXd(g2.C.rows(), n1 + n2);
    out.C << g2.D * g1.C, g2.C;
    out.D = g2.D * g1.D;
    return out;
}

Quad parallel_quad(const Quad& g1, const Quad& g2) {
    if (g1.B.cols() != g2.B.cols() || g1.C.rows() != g2.C.rows())
        throw ConfigError("parallel: port dimension mismatch");
    const auto n1 = g1.A.rows(), n2 = g2.A.rows();
    Quad out;
    out.A = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
    out.A.topLeftCorner(n1, n1) = g1.A;
    out.A.bottomRightCorner(n2, n2) = g2.A;
    out.B = Eigen::MatrixXd(n1 + n2, g1.B.cols());
    out.B << g1.B, g2.B;
    out.C = Eigen::MatrixXd(g1.C.rows(), n1 + n2);
    out.C << g1.C, g2.C;
    out.D = g1.D + g2.D;
    return out;
}

Quad feedback_quad(const Quad& g1, const Quad& g2, int sign) {
    if (g1.C.rows() != g2.B.cols() || g2.C.rows() != g1.B.cols())
        throw ConfigError("feedback: port dimension mismatch");
    const double s = static_cast<double>(sign);
    const auto n1 = g1.A.rows(), n2 = g2.A.rows();
    const auto p = g1.C.rows();
    const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(p, p) - s * g1.D * g2.D;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible())
        throw ConfigError("feedback: algebraic loop, I - D1 D2 sign is singular");
    const Eigen::MatrixXd E = lu.inverse();
    // y1 = E (C1 x1 + s D1 C2 x2 + D1 w)
    Eigen::MatrixXd Cy(p, n1 + n2);
    Cy << E * g1.C, s * E * g1.D * g2.C;
    const Eigen::MatrixXd Dy = E * g1.D;
    Quad out;
    out.A = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
    out.A.topLeftCorner(n1, n1) = g1.A + s * g1.B * g2.D * Cy.leftCols(n1);
    out.A.topRightCorner(n1, n2) = s * g1.B * (g2.C + g2.D * Cy.rightCols(n2));
    out.A.bottomLeftCorner(n2, n1) = g2.B * Cy.leftCols(n1);
    out.A.bottomRightCorner(n2, n2) = g2.A + g2.B * Cy.rightCols(n2);
    out.B = Eigen::MatrixXd(n1 + n2, g1.B.cols());
    out.B << g1.B + s * g1.B * g2.D * Dy, g2.B * Dy;
    out.C = Cy;
    out.D = Dy;
    return out;
}

} // namespace

ContinuousStateSpace::ContinuousStateSpace(Eigen::MatrixXd a, Eigen::MatrixXd b,
                                           Eigen::MatrixXd c, Eigen::MatrixXd d)
    : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)) {
    check_dims(A, B, C, D, "ContinuousStateSpace");
}

DiscreteStateSpace::DiscreteStateSpace(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c,
                                       Eigen::MatrixXd d, double period_s)
    : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)), period(period_s) {
    check_dims(A, B, C, D, "DiscreteStateSpace");
    if (period <= 0.0)
        throw ConfigError("DiscreteStateSpace: period must be positive");
}

namespace {

Quad realize(const TransferFunction& tf) {
    if (!tf.is_proper())
        throw ConfigError("to_state_space: transfer function is improper");
    Eigen::VectorXd den = trim_polynomial(tf.den);
    const int n = static_cast<int>(den.size()) - 1;
    const double lead = den[n];
    den /= lead;
    Eigen::VectorXd num = Eigen::VectorXd::Zero(n + 1);
    num.head(tf.num.size()) = tf.num / lead;

    Quad q;
    if (n == 0) {
        q.A.resize(0, 0);
        q.B.resize(0, 1);
        q.C.resize(1, 0);
        q.D = Eigen::MatrixXd::Constant(1, 1, num[0]);
        return q;
    }
    const double d = num[n];
    const Eigen::VectorXd b = num.head(n) - d * den.head(n);
    q.A = Eigen::MatrixXd::Zero(n, n);
    q.A.topRightCorner(n - 1, n - 1) = Eigen::MatrixXd::Identity(n - 1, n - 1);
    q.A.row(n - 1) = -den.head(n).transpose();
    q.B = Eigen::MatrixXd::Zero(n, 1);
    q.B(n - 1, 0) = 1.0;
    q.C = b.transpose();
    q.D = Eigen::MatrixXd::Constant(1, 1, d);
    return q;
}

} // namespace

ContinuousStateSpace to_state_space(const TransferFunction& tf) {
    if (tf.domain != Domain::Continuous)
        throw ConfigError("to_state_space: expected a continuous-domain transfer function");
    Quad q = realize(tf);
    return ContinuousStateSpace(q.A, q.B, q.C, q.D);
}

DiscreteStateSpace to_state_space(const TransferFunction& tf, double period) {
    if (tf.domain != Domain::Discrete)
        throw ConfigError("to_state_space: expected a discrete-domain transfer function");
    Quad q = realize(tf);
    return DiscreteStateSpace(q.A, q.B, q.C, q.D, period);
}

DiscreteStateSpace c2d_zoh(const ContinuousStateSpace& sys, double delta) {
    if (delta <= 0.0)
        throw ConfigError("c2d_zoh: step must be positive");
    const auto n = sys.states();
    const auto m = sys.inputs();
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
    aug.topLeftCorner(n, n) = sys.A;
    aug.topRightCorner(n, m) = sys.B;
    const Eigen::MatrixXd E = expm(aug, delta);
    return DiscreteStateSpace(E.topLeftCorner(n, n), E.topRightCorner(n, m), sys.C, sys.D,
                              delta);
}

ContinuousStateSpace series(const ContinuousStateSpace& first, const ContinuousStateSpace& second) {
    Quad q = series_quad({first.A, first.B, first.C, first.D},
                         {second.A, second.B, second.C, second.D});
    return ContinuousStateSpace(q.A, q.B, q.C, q.D);
}

ContinuousStateSpace parallel(const ContinuousStateSpace& a, const ContinuousStateSpace& b) {
    Quad q = parallel_quad({a.A, a.B, a.C, a.D}, {b.A, b.B, b.C, b.D});
    return ContinuousStateSpace(q.A, q.B, q.C, q.D);
}

ContinuousStateSpace feedback(const ContinuousStateSpace& forward, const ContinuousStateSpace& loop,
                              int sign) {
    Quad q = feedback_quad({forward.A, forward.B, forward.C, forward.D},
                           {loop.A, loop.B, loop.C, loop.D}, sign);
    return ContinuousStateSpace(q.A, q.B, q.C, q.D);
}

namespace {
double common_period(const DiscreteStateSpace& a, const DiscreteStateSpace& b) {
    if (std::abs(a.period - b.period) > 1e-12 * std::max(a.period, b.period))
        throw ConfigError("interconnect: sampling periods differ");
    return a.period;
}
} // namespace

DiscreteStateSpace series(const DiscreteStateSpace& first, const DiscreteStateSpace& second) {
    const double p = common_period(first, second);
    Quad q = series_quad({first.A, first.B, first.C, first.D},
                         {second.A, second.B, second.C, second.D});
    return DiscreteStateSpace(q.A, q.B, q.C, q.D, p);
}

DiscreteStateSpace parallel(const DiscreteStateSpace& a, const DiscreteStateSpace& b) {
    const double p = common_period(a, b);
    Quad q = parallel_quad({a.A, a.B, a.C, a.D}, {b.A, b.B, b.C, b.D});
    return DiscreteStateSpace(q.A, q.B, q.C, q.D, p);
}

DiscreteStateSpace feedback(const DiscreteStateSpace& forward, const DiscreteStateSpace& loop,
                            int sign) {
    const double p = common_period(forward, loop);
    Quad q = feedback_quad({forward.A, forward.B, forward.C, forward.D},
                           {loop.A, loop.B, loop.C, loop.D}, sign);
    return DiscreteStateSpace(q.A, q.B, q.C, q.D, p);
}

Eigen::MatrixXcd evaluate_at(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                             const Eigen::MatrixXd& C, const Eigen::MatrixXd& D,
                             std::complex<double> point) {
    if (A.rows() == 0)
        return D.cast<std::complex<double>>();
    Eigen::MatrixXcd M = -A.cast<std::complex<double>>();
    M.diagonal().array() += point;
    return C.cast<std::complex<double>>() * M.partialPivLu().solve(B.cast<std::complex<double>>()) +
           D.cast<std::complex<double>>();
}

Eigen::MatrixXcd frequency_response(const ContinuousStateSpace& sys, double omega) {
    return evaluate_at(sys.A, sys.B, sys.C, sys.D, std::complex<double>(0.0, omega));
}

Eigen::MatrixXcd frequency_response(const DiscreteStateSpace& sys, double omega) {
    return evaluate_at(sys.A, sys.B, sys.C, sys.D,
                       std::exp(std::complex<double>(0.0, omega * sys.period)));
}

} // namespace hyperc
