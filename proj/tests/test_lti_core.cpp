#include <doctest.h>

#include <cmath>
#include <random>

#include "hyperc/errors.hpp"
#include "hyperc/hinf_norm.hpp"
#include "hyperc/linalg.hpp"
#include "hyperc/state_space.hpp"
#include "hyperc/transfer_function.hpp"
#include "oracles.hpp"

using namespace hyperc;

namespace {

Eigen::MatrixXd random_stable_continuous(std::mt19937& rng, int n) {
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            A(i, j) = gauss(rng);
    const Eigen::VectorXcd eigs = eigenvalues(A);
    double max_re = 0.0;
    for (int i = 0; i < n; ++i)
        max_re = std::max(max_re, eigs[i].real());
    A -= (max_re + 0.5) * Eigen::MatrixXd::Identity(n, n);
    return A;
}

Eigen::MatrixXd random_schur_stable(std::mt19937& rng, int n, double radius) {
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            A(i, j) = gauss(rng);
    return A * (radius / spectral_radius(A));
}

const Eigen::MatrixXd kPlantA = (Eigen::MatrixXd(2, 2) << 0.0, 1.0, -1.0, -2.0).finished();
const Eigen::MatrixXd kPlantB = (Eigen::MatrixXd(2, 1) << 0.0, 1.0).finished();

} // namespace

TEST_CASE("controllable canonical realization of 1/(s^2+2s+1)") {
    const TransferFunction tf({1.0}, {1.0, 2.0, 1.0});
    const ContinuousStateSpace ss = to_state_space(tf);
    CHECK(ss.A.isApprox(kPlantA));
    CHECK(ss.B.isApprox(kPlantB));
    CHECK(ss.C.isApprox((Eigen::MatrixXd(1, 2) << 1.0, 0.0).finished()));
    CHECK(ss.D(0, 0) == 0.0);
}

TEST_CASE("constant transfer function realizes as pure gain") {
    const ContinuousStateSpace ss = to_state_space(TransferFunction({1.0}, {1.0}));
    CHECK(ss.states() == 0);
    CHECK(ss.D(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("unstable pole survives realization") {
    const ContinuousStateSpace ss = to_state_space(TransferFunction({1.0}, {-0.5, 1.0}));
    const Eigen::VectorXcd eigs = eigenvalues(ss.A);
    REQUIRE(eigs.size() == 1);
    CHECK(eigs[0].real() == doctest::Approx(0.5));
    CHECK(eigs[0].imag() == doctest::Approx(0.0));
}

TEST_CASE("improper transfer function is rejected") {
    CHECK_THROWS_AS(TransferFunction({1.0, 0.0, 1.0}, {1.0, 1.0}), ConfigError);
}

TEST_CASE("realization frequency response matches the transfer function") {
    const TransferFunction tf({0.0, 1.0}, {std::pow(1.5 * M_PI, 2), 0.1, 1.0});
    const ContinuousStateSpace ss = to_state_space(tf);
    for (int i = 0; i < 512; ++i) {
        const double w = 0.01 + i * (20.0 / 511);
        const auto g = frequency_response(ss, w)(0, 0);
        CHECK(std::abs(g - tf.response(w)) <= 1e-9 * (1.0 + std::abs(g)));
    }
}

TEST_CASE("expm basics") {
    CHECK(expm(Eigen::MatrixXd::Zero(3, 3), 1.7).isApprox(Eigen::MatrixXd::Identity(3, 3)));

    Eigen::MatrixXd nil(2, 2);
    nil << 0.0, 1.0, 0.0, 0.0;
    const double t = 0.37;
    Eigen::MatrixXd expected(2, 2);
    expected << 1.0, t, 0.0, 1.0;
    CHECK(expm(nil, t).isApprox(expected, 1e-15));

    CHECK_THROWS_AS(expm(Eigen::MatrixXd::Zero(2, 3)), ConfigError);
}

TEST_CASE("expm against the Taylor-series oracle") {
    // Frozen from the series oracle for the double-pole plant at t = 0.125.
    Eigen::MatrixXd expected(2, 2);
    expected << 0.99280901540766986, 0.11031211282307442, -0.11031211282307442,
        0.77218478976152094;
    const Eigen::MatrixXd got = expm(kPlantA, 0.125);
    CHECK((got - expected).norm() <= 1e-12 * expected.norm());
    CHECK((got - oracle::expm_taylor(kPlantA, 0.125)).norm() <= 1e-12 * expected.norm());

    std::mt19937 rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        Eigen::MatrixXd A = random_stable_continuous(rng, n);
        A *= 2.0 / std::max(1.0, A.norm());
        const Eigen::MatrixXd E = expm(A, 0.9);
        CHECK((E - oracle::expm_taylor(A, 0.9)).norm() <= 1e-12 * E.norm());
    }
}

TEST_CASE("expm semigroup property") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::MatrixXd A = random_stable_continuous(rng, 4);
        const Eigen::MatrixXd lhs = expm(A, 0.3) * expm(A, 0.45);
        const Eigen::MatrixXd rhs = expm(A, 0.75);
        CHECK((lhs - rhs).norm() <= 1e-10 * rhs.norm());
    }
}

TEST_CASE("c2d_zoh closed forms") {
    const ContinuousStateSpace integ(Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Ones(1, 1),
                                     Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Zero(1, 1));
    const DiscreteStateSpace di = c2d_zoh(integ, 0.25);
    CHECK(di.A(0, 0) == doctest::Approx(1.0));
    CHECK(di.B(0, 0) == doctest::Approx(0.25));

    const ContinuousStateSpace lag(-Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1),
                                   Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Zero(1, 1));
    const DiscreteStateSpace dl = c2d_zoh(lag, 1.0);
    CHECK(dl.A(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(dl.B(0, 0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));

    CHECK_THROWS_AS(c2d_zoh(lag, 0.0), ConfigError);
    CHECK_THROWS_AS(c2d_zoh(lag, -0.1), ConfigError);
}

TEST_CASE("c2d_zoh against the quadrature oracle") {
    const ContinuousStateSpace plant(kPlantA, kPlantB, (Eigen::MatrixXd(1, 2) << 1, 0).finished(),
                                     Eigen::MatrixXd::Zero(1, 1));
    const DiscreteStateSpace d = c2d_zoh(plant, 0.125);
    // Frozen from the composite-Simpson oracle (1e4 panels).
    CHECK(d.B(0, 0) == doctest::Approx(0.007190984592330172).epsilon(1e-11));
    CHECK(d.B(1, 0) == doctest::Approx(0.11031211282307442).epsilon(1e-11));
    const Eigen::MatrixXd gamma = oracle::simpson_input_integral(kPlantA, kPlantB, 0.125);
    CHECK((d.B - gamma).norm() <= 1e-9);
}

TEST_CASE("c2d_zoh semigroup: squaring the step") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 8; ++trial) {
        const Eigen::MatrixXd A = random_stable_continuous(rng, 3);
        const ContinuousStateSpace sys(A, Eigen::MatrixXd::Ones(3, 1),
                                       Eigen::MatrixXd::Ones(1, 3), Eigen::MatrixXd::Zero(1, 1));
        const Eigen::MatrixXd once = c2d_zoh(sys, 0.2).A;
        const Eigen::MatrixXd twice = c2d_zoh(sys, 0.4).A;
        CHECK((once * once - twice).norm() <= 1e-10 * twice.norm());
    }
}

TEST_CASE("series with identity leaves the response unchanged") {
    const ContinuousStateSpace P = to_state_space(TransferFunction({1.0}, {1.0, 2.0, 1.0}));
    const ContinuousStateSpace ident = to_state_space(TransferFunction({1.0}, {1.0}));
    const ContinuousStateSpace chained = series(P, ident);
    for (double w : {0.1, 1.0, 4.0}) {
        CHECK(std::abs(frequency_response(chained, w)(0, 0) - frequency_response(P, w)(0, 0)) <=
              1e-10);
    }
}

TEST_CASE("parallel perturbation adds responses") {
    const ContinuousStateSpace P = to_state_space(TransferFunction({1.0}, {1.0, 2.0, 1.0}));
    const TransferFunction delta_tf({0.05}, {1.0, 1.0});
    const ContinuousStateSpace sum = parallel(P, to_state_space(delta_tf));
    for (int i = 0; i < 64; ++i) {
        const double w = 0.05 + 0.3 * i;
        const std::complex<double> expected =
            frequency_response(P, w)(0, 0) + delta_tf.response(w);
        CHECK(std::abs(frequency_response(sum, w)(0, 0) - expected) <= 1e-10);
    }
}

TEST_CASE("negative feedback of a gain around an integrator") {
    const ContinuousStateSpace integ = to_state_space(TransferFunction({1.0}, {0.0, 1.0}));
    const double k = 3.5;
    const ContinuousStateSpace gain = to_state_space(TransferFunction({k}, {1.0}));
    const ContinuousStateSpace loop = feedback(integ, gain, -1);
    const Eigen::VectorXcd eigs = eigenvalues(loop.A);
    REQUIRE(eigs.size() == 1);
    CHECK(eigs[0].real() == doctest::Approx(-k));
}

TEST_CASE("algebraic loop is rejected") {
    const ContinuousStateSpace unit = to_state_space(TransferFunction({1.0}, {1.0}));
    CHECK_THROWS_AS(feedback(unit, unit, +1), ConfigError); // I - D1 D2 = 0
}

TEST_CASE("eigenvalue closed forms and residual contract") {
    Eigen::MatrixXd rot(2, 2);
    rot << 0.0, 1.0, -1.0, 0.0;
    const Eigen::VectorXcd er = eigenvalues(rot);
    CHECK(std::abs(er[0].imag()) == doctest::Approx(1.0));
    CHECK(er[0].real() == doctest::Approx(0.0));

    Eigen::MatrixXd companion(2, 2);
    companion << 0.0, 1.0, -1.0, -2.0;
    const Eigen::VectorXcd ec = eigenvalues(companion);
    CHECK(std::abs(ec[0] + 1.0) <= 1e-7);
    CHECK(std::abs(ec[1] + 1.0) <= 1e-7);

    std::mt19937 rng(5);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXd A(6, 6);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                A(i, j) = gauss(rng);
        const EigenPairs ep = eigen_pairs(A);
        for (int i = 0; i < 6; ++i) {
            const Eigen::VectorXcd v = ep.vectors.col(i);
            const double resid = (A.cast<std::complex<double>>() * v - ep.values[i] * v).norm();
            CHECK(resid <= 1e-8 * A.norm());
        }
    }
}

TEST_CASE("hinf_norm closed forms") {
    // First-order lag: peak at z = 1 gives norm 2.
    const DiscreteStateSpace lag((Eigen::MatrixXd(1, 1) << 0.5).finished(),
                                 Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1),
                                 Eigen::MatrixXd::Zero(1, 1), 1.0);
    CHECK(hinf_norm(lag, 1e-8) == doctest::Approx(2.0).epsilon(1e-6));

    // Static gain: the largest singular value of D.
    Eigen::MatrixXd D(2, 2);
    D << 1.0, 2.0, 0.5, -1.0;
    const DiscreteStateSpace st(Eigen::MatrixXd::Zero(0, 0), Eigen::MatrixXd::Zero(0, 2),
                                Eigen::MatrixXd::Zero(2, 0), D, 1.0);
    CHECK(hinf_norm(st) == doctest::Approx(D.jacobiSvd().singularValues()(0)));

    // Unstable system signals an infinite norm.
    const DiscreteStateSpace unstable((Eigen::MatrixXd(1, 1) << 1.01).finished(),
                                      Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1),
                                      Eigen::MatrixXd::Zero(1, 1), 1.0);
    CHECK(std::isinf(hinf_norm(unstable)));
}

TEST_CASE("hinf_norm bisection agrees with the frequency-grid oracle") {
    std::mt19937 rng(23);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        const int m = 1 + static_cast<int>(rng() % 2);
        const int p = 1 + static_cast<int>(rng() % 2);
        Eigen::MatrixXd A = random_schur_stable(rng, n, 0.85);
        Eigen::MatrixXd B(n, m), C(p, n), D(p, m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j)
                B(i, j) = gauss(rng);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < n; ++j)
                C(i, j) = gauss(rng);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < m; ++j)
                D(i, j) = 0.3 * gauss(rng);
        const DiscreteStateSpace sys(A, B, C, D, 1.0);
        const double nb = hinf_norm(sys, 1e-6);
        const double ng = oracle::grid_norm(sys, 10000);
        CHECK(std::abs(nb - ng) <= 1e-4 * ng);
    }
}
