#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

namespace hyperc {

enum class Domain { Continuous, Discrete };

/// Rational transfer function with real coefficients in ascending powers
/// of s (continuous) or z (discrete).  Must be proper: deg(num) <= deg(den).
struct TransferFunction {
    Eigen::VectorXd num;
    Eigen::VectorXd den;
    Domain domain = Domain::Continuous;

    TransferFunction() = default;
    TransferFunction(std::vector<double> numerator, std::vector<double> denominator,
                     Domain dom = Domain::Continuous);

    int order() const { return static_cast<int>(den.size()) - 1; }
    bool is_proper() const;
    bool is_strictly_proper() const;

    /// num(x)/den(x) by Horner evaluation.
    std::complex<double> eval(std::complex<double> x) const;

    /// Frequency response: continuous at s = j*omega, discrete at z = e^{j*omega*period}.
    std::complex<double> response(double omega, double period = 0.0) const;
};

/// Trims trailing zero coefficients (keeps at least one entry).
Eigen::VectorXd trim_polynomial(const Eigen::VectorXd& coeffs);

/// Polynomial product, ascending coefficients.
Eigen::VectorXd polynomial_product(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

} // namespace hyperc
