#include "hyperc/synthesis.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "hyperc/errors.hpp"
#include "hyperc/hinf_norm.hpp"
#include "hyperc/linalg.hpp"

namespace hyperc {

namespace {

constexpr double kVerifyMargin = 1e-6;

struct Quad {
    Eigen::MatrixXd A, B, C, D;
};

// Bilinear map z = (1+s)/(1-s); requires -1 outside the spectrum of A.
Quad cayley_to_continuous(const Quad& d) {
    const Eigen::Index n = d.A.rows();
    if (n == 0)
        return d;
    const Eigen::MatrixXd IA =
        (d.A + Eigen::MatrixXd::Identity(n, n)).partialPivLu().inverse();
    Quad c;
    c.A = IA * (d.A - Eigen::MatrixXd::Identity(n, n));
    c.B = std::sqrt(2.0) * IA * d.B;
    c.C = std::sqrt(2.0) * d.C * IA;
    c.D = d.D - d.C * IA * d.B;
    return c;
}

Quad cayley_to_discrete(const Quad& c) {
    const Eigen::Index n = c.A.rows();
    if (n == 0)
        return c;
    const Eigen::MatrixXd IA =
        (Eigen::MatrixXd::Identity(n, n) - c.A).partialPivLu().inverse();
    Quad d;
    d.A = IA * (Eigen::MatrixXd::Identity(n, n) + c.A);
    d.B = std::sqrt(2.0) * IA * c.B;
    d.C = std::sqrt(2.0) * c.C * IA;
    d.D = c.D + c.C * IA * c.B;
    return d;
}

double min_distance_to(const Eigen::VectorXcd& eigs, std::complex<double> point) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < eigs.size(); ++i)
        best = std::min(best, std::abs(eigs[i] - point));
    return best;
}

// Continuous generalized plant in coordinates where D12 = [0; I], D21 = [0, I].
struct PreparedPlant {
    Eigen::MatrixXd A, B1, B2, C1, C2, D11;
    Eigen::MatrixXd D22; // continuous-side feedthrough y <- u, absorbed at the end
    Eigen::MatrixXd Tu, Ty; // undo the channel scalings on the controller ports
    Eigen::Index m1 = 0, m2 = 0, p1 = 0, p2 = 0;
    double spectral_shift = 1.0; // rho of the z -> rho*z guard, 1 when unused
};

PreparedPlant prepare(const DiscreteGeneralizedPlant& plant) {
    PreparedPlant pp;
    pp.m1 = plant.B1.cols();
    pp.m2 = plant.B2.cols();
    pp.p1 = plant.C1.rows();
    pp.p2 = plant.C2.rows();

    Quad d;
    d.A = plant.A;
    // Guard the Cayley singularity: push the spectrum off z = -1 by designing
    // for P(rho z) with rho barely above 1; verification runs on the true plant.
    const Eigen::VectorXcd eigs = eigenvalues(plant.A);
    if (min_distance_to(eigs, std::complex<double>(-1.0, 0.0)) < 1e-7) {
        pp.spectral_shift = 1.0 + 1e-6;
        d.A = plant.A / pp.spectral_shift;
    }
    d.B.resize(plant.states(), pp.m1 + pp.m2);
    d.B << plant.B1, plant.B2;
    d.C.resize(pp.p1 + pp.p2, plant.states());
    d.C << plant.C1, plant.C2;
    d.D.resize(pp.p1 + pp.p2, pp.m1 + pp.m2);
    d.D << plant.D11, plant.D12, plant.D21, plant.D22;

    const Quad c = cayley_to_continuous(d);
    pp.A = c.A;
    Eigen::MatrixXd B1 = c.B.leftCols(pp.m1);
    Eigen::MatrixXd B2 = c.B.rightCols(pp.m2);
    Eigen::MatrixXd C1 = c.C.topRows(pp.p1);
    Eigen::MatrixXd C2 = c.C.bottomRows(pp.p2);
    Eigen::MatrixXd D11 = c.D.topLeftCorner(pp.p1, pp.m1);
    Eigen::MatrixXd D12 = c.D.topRightCorner(pp.p1, pp.m2);
    Eigen::MatrixXd D21 = c.D.bottomLeftCorner(pp.p2, pp.m1);
    pp.D22 = c.D.bottomRightCorner(pp.p2, pp.m2);

    // Orthogonal transform on z and input scaling: D12 -> [0; I].
    Eigen::JacobiSVD<Eigen::MatrixXd> svd12(D12, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd12.singularValues()(pp.m2 - 1) < 1e-12)
        throw NumericalError("synthesis: D12 numerically rank deficient");
    Eigen::MatrixXd Tz(pp.p1, pp.p1);
    Tz.topRows(pp.p1 - pp.m2) = svd12.matrixU().rightCols(pp.p1 - pp.m2).transpose();
    Tz.bottomRows(pp.m2) = svd12.matrixU().leftCols(pp.m2).transpose();
    pp.Tu = svd12.matrixV() * svd12.singularValues().cwiseInverse().asDiagonal();

    // Orthogonal transform on w and output scaling: D21 -> [0, I].
    Eigen::JacobiSVD<Eigen::MatrixXd> svd21(D21, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd21.singularValues()(pp.p2 - 1) < 1e-12)
        throw NumericalError("synthesis: D21 numerically rank deficient");
    Eigen::MatrixXd Tw(pp.m1, pp.m1);
    Tw.leftCols(pp.m1 - pp.p2) = svd21.matrixV().rightCols(pp.m1 - pp.p2);
    Tw.rightCols(pp.p2) = svd21.matrixV().leftCols(pp.p2);
    pp.Ty = svd21.singularValues().cwiseInverse().asDiagonal() * svd21.matrixU().transpose();

    pp.B1 = B1 * Tw;
    pp.B2 = B2 * pp.Tu;
    pp.C1 = Tz * C1;
    pp.C2 = pp.Ty * C2;
    pp.D11 = Tz * D11 * Tw;
    return pp;
}

double sigma_max(const Eigen::MatrixXd& m) {
    if (m.rows() == 0 || m.cols() == 0)
        return 0.0;
    return m.jacobiSvd().singularValues()(0);
}

struct RiccatiPair {
    Eigen::MatrixXd X, Y;
    double x_residual = 0.0, y_residual = 0.0;
    double coupling = 0.0; // rho(XY)/gamma^2
};

// Feasibility core: the D11 bound, the two stabilizing Riccati solutions,
// their positivity, and the spectral coupling condition.
RiccatiPair solve_riccatis(const PreparedPlant& pp, double gamma) {
    const Eigen::Index n = pp.A.rows();
    const Eigen::Index m1 = pp.m1, m2 = pp.m2, p1 = pp.p1, p2 = pp.p2;
    const Eigen::Index k1 = p1 - m2, k2 = m1 - p2;

    Eigen::MatrixXd top(k1, m1);
    top << pp.D11.topLeftCorner(k1, k2), pp.D11.topRightCorner(k1, p2);
    Eigen::MatrixXd left(p1, k2);
    left << pp.D11.topLeftCorner(k1, k2), pp.D11.bottomLeftCorner(m2, k2);
    const double bound = std::max(sigma_max(top), sigma_max(left));
    if (gamma <= bound)
        throw InfeasibleError("gamma at or below the direct-feedthrough lower bound");

    Eigen::MatrixXd B(n, m1 + m2);
    B << pp.B1, pp.B2;
    Eigen::MatrixXd D12s = Eigen::MatrixXd::Zero(p1, m2); // scaled D12 = [0; I]
    D12s.bottomRows(m2).setIdentity();
    Eigen::MatrixXd D1dot(p1, m1 + m2);
    D1dot << pp.D11, D12s;
    Eigen::MatrixXd C(p1 + p2, n);
    C << pp.C1, pp.C2;
    Eigen::MatrixXd D21s = Eigen::MatrixXd::Zero(p2, m1); // scaled D21 = [0, I]
    D21s.rightCols(p2).setIdentity();
    Eigen::MatrixXd Ddot1(p1 + p2, m1);
    Ddot1 << pp.D11, D21s;

    Eigen::MatrixXd R = D1dot.transpose() * D1dot;
    R.topLeftCorner(m1, m1) -= gamma * gamma * Eigen::MatrixXd::Identity(m1, m1);
    Eigen::MatrixXd Rt = Ddot1 * Ddot1.transpose();
    Rt.topLeftCorner(p1, p1) -= gamma * gamma * Eigen::MatrixXd::Identity(p1, p1);

    Eigen::FullPivLU<Eigen::MatrixXd> luR(R), luRt(Rt);
    luR.setThreshold(1e-12);
    luRt.setThreshold(1e-12);
    if (!luR.isInvertible() || !luRt.isInvertible())
        throw InfeasibleError("feedthrough block R singular at this gamma");
    const Eigen::MatrixXd Ri = luR.inverse();
    const Eigen::MatrixXd Rti = luRt.inverse();

    RiccatiPair out;
    if (n == 0) {
        out.X.resize(0, 0);
        out.Y.resize(0, 0);
        return out;
    }

    const Eigen::MatrixXd Ex = pp.A - B * Ri * D1dot.transpose() * pp.C1;
    const Eigen::MatrixXd Sx = -B * Ri * B.transpose();
    Eigen::MatrixXd Qx = pp.C1.transpose() * pp.C1 -
                         pp.C1.transpose() * D1dot * Ri * D1dot.transpose() * pp.C1;
    Qx = 0.5 * (Qx + Qx.transpose()).eval();
    CareResult crx;
    try {
        crx = solve_care(Ex, 0.5 * (Sx + Sx.transpose()), Qx);
    } catch (const InfeasibleError&) {
        throw InfeasibleError("control Riccati: Hamiltonian eigenvalue on the imaginary axis");
    }
    out.X = crx.X;
    out.x_residual = crx.rel_residual;

    const Eigen::MatrixXd Ey = pp.A.transpose() - C.transpose() * Rti * Ddot1 * pp.B1.transpose();
    const Eigen::MatrixXd Sy = -C.transpose() * Rti * C;
    Eigen::MatrixXd Qy = pp.B1 * pp.B1.transpose() -
                         pp.B1 * Ddot1.transpose() * Rti * Ddot1 * pp.B1.transpose();
    Qy = 0.5 * (Qy + Qy.transpose()).eval();
    CareResult cry;
    try {
        cry = solve_care(Ey, 0.5 * (Sy + Sy.transpose()), Qy);
    } catch (const InfeasibleError&) {
        throw InfeasibleError("filter Riccati: Hamiltonian eigenvalue on the imaginary axis");
    }
    out.Y = cry.X;
    out.y_residual = cry.rel_residual;

    const double x_floor = -1e-8 * std::max(1.0, out.X.norm());
    if (Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(out.X).eigenvalues().minCoeff() < x_floor)
        throw InfeasibleError("control Riccati solution is not positive semidefinite");
    const double y_floor = -1e-8 * std::max(1.0, out.Y.norm());
    if (Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(out.Y).eigenvalues().minCoeff() < y_floor)
        throw InfeasibleError("filter Riccati solution is not positive semidefinite");
    out.coupling = spectral_radius(out.X * out.Y) / (gamma * gamma);
    if (out.coupling >= 1.0)
        throw InfeasibleError("spectral coupling rho(XY) >= gamma^2");
    return out;
}

Quad central_controller(const PreparedPlant& pp, double gamma, const RiccatiPair& ric) {
    const Eigen::Index n = pp.A.rows();
    const Eigen::Index m1 = pp.m1, m2 = pp.m2, p1 = pp.p1, p2 = pp.p2;
    const Eigen::Index k1 = p1 - m2, k2 = m1 - p2;

    Eigen::MatrixXd B(n, m1 + m2);
    B << pp.B1, pp.B2;
    Eigen::MatrixXd D12s = Eigen::MatrixXd::Zero(p1, m2); // scaled D12 = [0; I]
    D12s.bottomRows(m2).setIdentity();
    Eigen::MatrixXd D1dot(p1, m1 + m2);
    D1dot << pp.D11, D12s;
    Eigen::MatrixXd C(p1 + p2, n);
    C << pp.C1, pp.C2;
    Eigen::MatrixXd D21s = Eigen::MatrixXd::Zero(p2, m1); // scaled D21 = [0, I]
    D21s.rightCols(p2).setIdentity();
    Eigen::MatrixXd Ddot1(p1 + p2, m1);
    Ddot1 << pp.D11, D21s;

    Eigen::MatrixXd R = D1dot.transpose() * D1dot;
    R.topLeftCorner(m1, m1) -= gamma * gamma * Eigen::MatrixXd::Identity(m1, m1);
    Eigen::MatrixXd Rt = Ddot1 * Ddot1.transpose();
    Rt.topLeftCorner(p1, p1) -= gamma * gamma * Eigen::MatrixXd::Identity(p1, p1);

    const Eigen::MatrixXd F =
        -R.partialPivLu().solve(D1dot.transpose() * pp.C1 + B.transpose() * ric.X);
    const Eigen::MatrixXd H =
        -((pp.B1 * Ddot1.transpose() + ric.Y * C.transpose()) * Rt.partialPivLu().inverse());

    const Eigen::MatrixXd F12 = F.middleRows(k2, p2);
    const Eigen::MatrixXd F2 = F.bottomRows(m2);
    const Eigen::MatrixXd H12 = H.middleCols(k1, m2);
    const Eigen::MatrixXd H2 = H.rightCols(p2);

    const Eigen::MatrixXd D1111 = pp.D11.topLeftCorner(k1, k2);
    const Eigen::MatrixXd D1112 = pp.D11.topRightCorner(k1, p2);
    const Eigen::MatrixXd D1121 = pp.D11.bottomLeftCorner(m2, k2);
    const Eigen::MatrixXd D1122 = pp.D11.bottomRightCorner(m2, p2);

    const Eigen::MatrixXd G1inv =
        (gamma * gamma * Eigen::MatrixXd::Identity(k1, k1) - D1111 * D1111.transpose())
            .partialPivLu()
            .inverse();
    const Eigen::MatrixXd G2inv =
        (gamma * gamma * Eigen::MatrixXd::Identity(k2, k2) - D1111.transpose() * D1111)
            .partialPivLu()
            .inverse();

    const Eigen::MatrixXd Dh11 = -D1121 * D1111.transpose() * G1inv * D1112 - D1122;
    const Eigen::MatrixXd M12 =
        Eigen::MatrixXd::Identity(m2, m2) - D1121 * G2inv * D1121.transpose();
    const Eigen::MatrixXd M21 =
        Eigen::MatrixXd::Identity(p2, p2) - D1112.transpose() * G1inv * D1112;
    Eigen::LLT<Eigen::MatrixXd> llt12(M12), llt21(M21);
    if (llt12.info() != Eigen::Success || llt21.info() != Eigen::Success)
        throw InfeasibleError("controller feedthrough factorization failed");
    const Eigen::MatrixXd Dh12 = Eigen::MatrixXd(llt12.matrixL());
    const Eigen::MatrixXd Dh21 = Eigen::MatrixXd(llt21.matrixL()).transpose();

    Eigen::MatrixXd Z = Eigen::MatrixXd::Identity(n, n) - ric.Y * ric.X / (gamma * gamma);
    Eigen::PartialPivLU<Eigen::MatrixXd> luZ(Z);
    const Eigen::MatrixXd Zinv = luZ.inverse();

    const Eigen::MatrixXd B2h = (pp.B2 + H12) * Dh12;
    const Eigen::MatrixXd C2h = -Dh21 * (pp.C2 + F12) * Zinv;
    const Eigen::MatrixXd B1h =
        -H2 + B2h * Dh12.triangularView<Eigen::Lower>().solve(Dh11);
    const Eigen::MatrixXd C1h =
        F2 * Zinv + Dh11 * Dh21.triangularView<Eigen::Upper>().solve(C2h);
    const Eigen::MatrixXd Ah =
        pp.A + H * C + B2h * Dh12.triangularView<Eigen::Lower>().solve(C1h);

    Quad k;
    k.A = Ah;
    k.B = B1h;
    k.C = C1h;
    k.D = Dh11;

    // Undo the channel scalings, then absorb the continuous-side D22.
    k.B = k.B * pp.Ty;
    k.C = pp.Tu * k.C;
    k.D = pp.Tu * k.D * pp.Ty;

    const Eigen::MatrixXd E =
        (Eigen::MatrixXd::Identity(pp.p2, pp.p2) + pp.D22 * k.D).partialPivLu().inverse();
    Quad kabs;
    kabs.D = k.D * E;
    kabs.C = k.C - k.D * E * pp.D22 * k.C;
    kabs.B = k.B * E;
    kabs.A = k.A - k.B * E * pp.D22 * k.C;
    return kabs;
}

} // namespace

ContinuousStateSpace bilinear_to_continuous(const DiscreteStateSpace& sys) {
    if (sys.states() > 0 &&
        min_distance_to(eigenvalues(sys.A), std::complex<double>(-1.0, 0.0)) < 1e-12)
        throw NumericalError("bilinear_to_continuous: eigenvalue at z = -1");
    const Quad c = cayley_to_continuous({sys.A, sys.B, sys.C, sys.D});
    return ContinuousStateSpace(c.A, c.B, c.C, c.D);
}

DiscreteStateSpace bilinear_to_discrete(const ContinuousStateSpace& sys, double period) {
    if (sys.states() > 0 &&
        min_distance_to(eigenvalues(sys.A), std::complex<double>(1.0, 0.0)) < 1e-12)
        throw NumericalError("bilinear_to_discrete: eigenvalue at s = 1");
    const Quad d = cayley_to_discrete({sys.A, sys.B, sys.C, sys.D});
    return DiscreteStateSpace(d.A, d.B, d.C, d.D, period);
}

DiscreteStateSpace close_loop(const DiscreteGeneralizedPlant& plant,
                              const DiscreteStateSpace& controller) {
    const Eigen::Index n = plant.states();
    const Eigen::Index nk = controller.states();
    const auto& K = controller;
    Eigen::MatrixXd Acl(n + nk, n + nk);
    Acl.topLeftCorner(n, n) = plant.A + plant.B2 * K.D * plant.C2;
    Acl.topRightCorner(n, nk) = plant.B2 * K.C;
    Acl.bottomLeftCorner(nk, n) = K.B * plant.C2;
    Acl.bottomRightCorner(nk, nk) = K.A;
    Eigen::MatrixXd Bcl(n + nk, plant.B1.cols());
    Bcl << plant.B1 + plant.B2 * K.D * plant.D21, K.B * plant.D21;
    Eigen::MatrixXd Ccl(plant.C1.rows(), n + nk);
    Ccl << plant.C1 + plant.D12 * K.D * plant.C2, plant.D12 * K.C;
    Eigen::MatrixXd Dcl = plant.D11 + plant.D12 * K.D * plant.D21;
    return DiscreteStateSpace(Acl, Bcl, Ccl, Dcl, plant.h);
}

SynthesisOutcome synthesize_fixed_gamma(const DiscreteGeneralizedPlant& plant, double gamma) {
    SynthesisOutcome out;
    try {
        const PreparedPlant pp = prepare(plant);
        const RiccatiPair ric = solve_riccatis(pp, gamma);
        const Quad kc = central_controller(pp, gamma, ric);

        // eig(A_K) = 1 would map to an improper discrete controller.
        if (kc.A.rows() > 0 &&
            min_distance_to(eigenvalues(kc.A), std::complex<double>(1.0, 0.0)) < 1e-10) {
            out.infeasible_condition = "controller pole at the Cayley singularity";
            return out;
        }
        Quad kd = cayley_to_discrete(kc);
        DiscreteStateSpace K(kd.A, kd.B, kd.C, kd.D, plant.h);
        DiscreteStateSpace cl = close_loop(plant, K);

        HinfResult res;
        res.diagnostics.x_residual = ric.x_residual;
        res.diagnostics.y_residual = ric.y_residual;
        res.diagnostics.coupling_spectral_radius = ric.coupling;
        res.diagnostics.closed_loop_spectral_radius = spectral_radius(cl.A);
        if (res.diagnostics.closed_loop_spectral_radius >= 1.0) {
            out.infeasible_condition = "closed loop not Schur stable after back-transform";
            return out;
        }
        res.diagnostics.norm_bound_verified = norm_level_clear(cl, gamma * (1.0 + kVerifyMargin));
        if (!res.diagnostics.norm_bound_verified) {
            out.infeasible_condition = "closed-loop norm bound failed independent verification";
            return out;
        }
        res.controller = std::move(K);
        res.closed_loop = std::move(cl);
        res.gamma_achieved = gamma;
        out.result = std::move(res);
        return out;
    } catch (const InfeasibleError& e) {
        out.infeasible_condition = e.what();
        return out;
    } catch (const NumericalError& e) {
        out.infeasible_condition = std::string("numerical failure: ") + e.what();
        return out;
    }
}

HinfResult gamma_bisect(const DiscreteGeneralizedPlant& plant, double gamma_lo, double gamma_hi,
                        double tol) {
    if (!(gamma_lo > 0.0) || !(gamma_hi > gamma_lo))
        throw ConfigError("gamma_bisect: need 0 < gamma_lo < gamma_hi");
    SynthesisOutcome at_hi = synthesize_fixed_gamma(plant, gamma_hi);
    if (!at_hi.feasible())
        throw InfeasibleError(
            "infeasible at gamma_hi (" + at_hi.infeasible_condition +
            "); enlarge the gamma range or increase the delay/upsampling factor");
    HinfResult best = std::move(*at_hi.result);
    double lo = gamma_lo;
    double hi = gamma_hi;
    double last_infeasible = 0.0;
    while ((hi - lo) > tol * lo) {
        const double mid = std::sqrt(lo * hi);
        SynthesisOutcome probe = synthesize_fixed_gamma(plant, mid);
        if (probe.feasible()) {
            // Feasibility is monotone in gamma along the trace.
            if (mid < last_infeasible)
                throw NumericalError("gamma_bisect: non-monotone feasibility trace");
            best = std::move(*probe.result);
            hi = mid;
        } else {
            last_infeasible = std::max(last_infeasible, mid);
            lo = mid;
        }
    }
    return best;
}

} // namespace hyperc
