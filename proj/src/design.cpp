#include "hyperc/design.hpp"

#include <cmath>
#include <set>

#include <Eigen/Dense>

#include "hyperc/errors.hpp"
#include "hyperc/linalg.hpp"

namespace hyperc {

TransferFunction make_weight(double omega, double zeta_coeff) {
    if (omega <= 0.0)
        throw ConfigError("make_weight: omega must be positive");
    if (zeta_coeff <= 0.0)
        throw ConfigError("make_weight: damping coefficient must be positive");
    return TransferFunction({0.0, 1.0}, {omega * omega, zeta_coeff, 1.0});
}

TransferFunction make_weight_product(const std::vector<double>& omegas, double zeta_coeff) {
    if (omegas.empty())
        throw ConfigError("make_weight_product: need at least one frequency");
    std::set<double> seen;
    for (double w : omegas) {
        if (w <= 0.0)
            throw ConfigError("make_weight_product: frequencies must be positive");
        if (!seen.insert(w).second)
            throw ConfigError("make_weight_product: duplicate frequency");
    }
    if (zeta_coeff <= 0.0)
        throw ConfigError("make_weight_product: damping coefficient must be positive");
    Eigen::VectorXd den = Eigen::VectorXd::Ones(1);
    for (double w : omegas) {
        Eigen::Vector3d factor(w * w, zeta_coeff, 1.0);
        den = polynomial_product(den, factor);
    }
    Eigen::VectorXd num = Eigen::VectorXd::Zero(2);
    num[1] = 1.0;
    TransferFunction tf;
    tf.num = num;
    tf.den = den;
    tf.domain = Domain::Continuous;
    return tf;
}

void DesignConfig::validate() const {
    if (h <= 0.0)
        throw ConfigError("sampling.h: frame period must be positive");
    if (M < 1)
        throw ConfigError("sampling.M: upsampling factor must be >= 1");
    if (N < 1 || N % M != 0)
        throw ConfigError("sampling.N: fast factor must be a positive multiple of M");
    if (delay_frames < 0)
        throw ConfigError("delay_frames: must be >= 0");
    if (!(gamma_lo > 0.0) || !(gamma_hi > gamma_lo))
        throw ConfigError("gamma: need 0 < lo < hi");
    if (gamma_tol <= 0.0)
        throw ConfigError("gamma.tol: must be positive");
    if (eps_u <= 0.0)
        throw ConfigError("regularization.eps_u: must be positive");
    if (eps_n <= 0.0)
        throw ConfigError("regularization.eps_n: must be positive");
    if (!plant.is_strictly_proper())
        throw ConfigError("plant: must be strictly proper");
    if (!reference_weight.is_strictly_proper())
        throw ConfigError("reference_weight: must be strictly proper");
    if (disturbance_weight && !disturbance_weight->is_strictly_proper())
        throw ConfigError("disturbance_weight: must be strictly proper");
}

FastRatePlant build_fast_plant(const DesignConfig& cfg) {
    cfg.validate();
    const ContinuousStateSpace P = to_state_space(cfg.plant);
    const ContinuousStateSpace Fr = to_state_space(cfg.reference_weight);
    std::optional<ContinuousStateSpace> Fd;
    if (cfg.disturbance_weight)
        Fd = to_state_space(*cfg.disturbance_weight);

    const double delta = cfg.fast_step();
    const DiscreteStateSpace Pd = c2d_zoh(P, delta);
    const DiscreteStateSpace Frd = c2d_zoh(Fr, delta);

    FastRatePlant fp;
    fp.delta = delta;
    fp.n_plant = P.states();
    fp.n_ref_filter = Fr.states();
    fp.n_dist_filter = Fd ? Fd->states() : 0;
    fp.n_delay = static_cast<Eigen::Index>(cfg.delay_frames) * cfg.N;
    const Eigen::Index n = fp.n_plant + fp.n_ref_filter + fp.n_dist_filter + fp.n_delay;

    // State order: [plant; reference filter; disturbance filter; delay line].
    fp.A = Eigen::MatrixXd::Zero(n, n);
    fp.A.topLeftCorner(fp.n_plant, fp.n_plant) = Pd.A;
    const Eigen::Index iF = fp.n_plant;
    fp.A.block(iF, iF, fp.n_ref_filter, fp.n_ref_filter) = Frd.A;
    const Eigen::Index iFd = iF + fp.n_ref_filter;
    if (Fd) {
        const DiscreteStateSpace Fdd = c2d_zoh(*Fd, delta);
        fp.A.block(iFd, iFd, fp.n_dist_filter, fp.n_dist_filter) = Fdd.A;
        // The filtered disturbance enters the plant input at the fast rate.
        fp.A.block(0, iFd, fp.n_plant, fp.n_dist_filter) = Pd.B * Fd->C;
        fp.b_dist = Eigen::VectorXd::Zero(n);
        fp.b_dist.segment(iFd, fp.n_dist_filter) = Fdd.B;
    } else {
        fp.b_dist.resize(0);
    }
    const Eigen::Index iS = iFd + fp.n_dist_filter;
    if (fp.n_delay > 0) {
        fp.A.block(iS, iF, 1, fp.n_ref_filter) = Fr.C;
        for (Eigen::Index k = 1; k < fp.n_delay; ++k)
            fp.A(iS + k, iS + k - 1) = 1.0;
    }

    fp.b_ref = Eigen::VectorXd::Zero(n);
    fp.b_ref.segment(iF, fp.n_ref_filter) = Frd.B;
    fp.b_ctrl = Eigen::VectorXd::Zero(n);
    fp.b_ctrl.head(fp.n_plant) = Pd.B;

    fp.c_perf = Eigen::RowVectorXd::Zero(n);
    fp.c_meas = Eigen::RowVectorXd::Zero(n);
    fp.c_perf.head(fp.n_plant) = -P.C;
    fp.c_meas.head(fp.n_plant) = -P.C;
    fp.c_meas.segment(iF, fp.n_ref_filter) = Fr.C;
    if (fp.n_delay > 0)
        fp.c_perf(iS + fp.n_delay - 1) = 1.0;
    else
        fp.c_perf.segment(iF, fp.n_ref_filter) = Fr.C;
    return fp;
}

namespace {

void check_rank_conditions(const DiscreteGeneralizedPlant& gp) {
    // PBH tests at the unstable eigenvalues only; stable unreachable or
    // unobservable modes (delay line, weights) are fine.
    const Eigen::Index n = gp.states();
    const Eigen::VectorXcd eigs = eigenvalues(gp.A);
    const double scale = 1.0 + gp.A.norm();
    for (Eigen::Index i = 0; i < eigs.size(); ++i) {
        if (std::abs(eigs[i]) < 1.0 - 1e-9)
            continue;
        Eigen::MatrixXcd pbh_b(n, n + gp.B2.cols());
        pbh_b << (eigs[i] * Eigen::MatrixXcd::Identity(n, n) - gp.A.cast<std::complex<double>>()),
            gp.B2.cast<std::complex<double>>();
        if (pbh_b.jacobiSvd().singularValues()(n - 1) < 1e-9 * scale)
            throw ConfigError("generalized plant: (A, B2) not stabilizable at |z| >= 1");
        Eigen::MatrixXcd pbh_c(n + gp.C2.rows(), n);
        pbh_c << (eigs[i] * Eigen::MatrixXcd::Identity(n, n) - gp.A.cast<std::complex<double>>()),
            gp.C2.cast<std::complex<double>>();
        if (pbh_c.jacobiSvd().singularValues()(n - 1) < 1e-9 * scale)
            throw ConfigError("generalized plant: (C2, A) not detectable at |z| >= 1");
    }
    if (gp.D12.jacobiSvd().singularValues()(gp.D12.cols() - 1) <= 0.0)
        throw ConfigError("generalized plant: D12 lost full column rank");
    if (gp.D21.jacobiSvd().singularValues()(gp.D21.rows() - 1) <= 0.0)
        throw ConfigError("generalized plant: D21 lost full row rank");
}

} // namespace

DiscreteGeneralizedPlant build_generalized_plant(const DesignConfig& cfg) {
    const FastRatePlant fp = build_fast_plant(cfg);
    const Eigen::Index n = fp.states();
    const int N = cfg.N;
    const int M = cfg.M;
    const bool has_d = fp.has_disturbance();
    const int q_sig = N + (has_d ? N : 0);
    const int q = q_sig + 1; // trailing fictitious measurement-noise column
    const int p = N + M;

    DiscreteGeneralizedPlant gp;
    gp.h = cfg.h;
    gp.legend.ref_cols = N;
    gp.legend.dist_cols = has_d ? N : 0;
    gp.legend.perf_rows = N;
    gp.legend.control_rows = M;

    gp.C1 = Eigen::MatrixXd::Zero(p, n);
    gp.D11 = Eigen::MatrixXd::Zero(p, q);
    gp.D12 = Eigen::MatrixXd::Zero(p, M);

    // One pass over the frame accumulates the within-frame input influence.
    Eigen::MatrixXd P_exo = Eigen::MatrixXd::Zero(n, q);
    Eigen::MatrixXd P_ctrl = Eigen::MatrixXd::Zero(n, M);
    Eigen::MatrixXd Apow = Eigen::MatrixXd::Identity(n, n);
    const int steps_per_move = N / M;
    for (int i = 0; i < N; ++i) {
        gp.C1.row(i) = fp.c_perf * Apow;
        gp.D11.row(i) = fp.c_perf * P_exo;
        gp.D12.row(i) = fp.c_perf * P_ctrl;
        P_exo = fp.A * P_exo;
        P_exo.col(i) += fp.b_ref;
        if (has_d)
            P_exo.col(N + i) += fp.b_dist;
        P_ctrl = fp.A * P_ctrl;
        P_ctrl.col(i / steps_per_move) += fp.b_ctrl;
        Apow = fp.A * Apow;
    }
    gp.A = Apow;
    gp.B1 = P_exo;
    gp.B2 = P_ctrl;
    gp.D12.bottomRows(M) = cfg.eps_u * Eigen::MatrixXd::Identity(M, M);
    gp.C2 = fp.c_meas;
    gp.D21 = Eigen::MatrixXd::Zero(1, q);
    gp.D21(0, q - 1) = cfg.eps_n;
    gp.D22 = Eigen::MatrixXd::Zero(1, M);

    // Sanity of the assembled dimensions against the configuration.
    const Eigen::Index expected =
        fp.n_plant + fp.n_ref_filter + fp.n_dist_filter +
        static_cast<Eigen::Index>(cfg.delay_frames) * cfg.N;
    if (n != expected)
        throw NumericalError("generalized plant: state count mismatch");
    check_rank_conditions(gp);
    return gp;
}

LiftedController unlift_controller(const DiscreteStateSpace& frame_controller, int M) {
    if (frame_controller.inputs() != 1)
        throw ConfigError("unlift_controller: controller must have one input per frame");
    if (frame_controller.outputs() != M)
        throw ConfigError("unlift_controller: controller must have M outputs per frame");
    LiftedController out;
    out.barA = frame_controller.A;
    out.barB = frame_controller.B;
    out.barC = frame_controller.C;
    out.barD = frame_controller.D;
    out.M = M;
    out.h = frame_controller.period;
    return out;
}

} // namespace hyperc
