#include "hyperc/transfer_function.hpp"

#include <cmath>

#include "hyperc/errors.hpp"

namespace hyperc {

Eigen::VectorXd trim_polynomial(const Eigen::VectorXd& coeffs) {
    int last = static_cast<int>(coeffs.size()) - 1;
    while (last > 0 && coeffs[last] == 0.0)
        --last;
    return coeffs.head(last + 1);
}

Eigen::VectorXd polynomial_product(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(a.size() + b.size() - 1);
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < b.size(); ++j)
            out[i + j] += a[i] * b[j];
    return out;
}

TransferFunction::TransferFunction(std::vector<double> numerator, std::vector<double> denominator,
                                   Domain dom)
    : domain(dom) {
    if (numerator.empty() || denominator.empty())
        throw ConfigError("transfer function requires nonempty coefficient lists");
    num = trim_polynomial(Eigen::Map<Eigen::VectorXd>(numerator.data(), numerator.size()));
    den = trim_polynomial(Eigen::Map<Eigen::VectorXd>(denominator.data(), denominator.size()));
    if (den[den.size() - 1] == 0.0)
        throw ConfigError("transfer function denominator is zero");
    if (!is_proper())
        throw ConfigError("transfer function is improper: deg(num) > deg(den)");
}

bool TransferFunction::is_proper() const {
    return num.size() <= den.size();
}

bool TransferFunction::is_strictly_proper() const {
    if (num.size() < den.size())
        return true;
    // Equal length: strictly proper only if the leading numerator coefficient vanishes,
    // which trim_polynomial would have removed already.
    return false;
}

std::complex<double> TransferFunction::eval(std::complex<double> x) const {
    auto horner = [&](const Eigen::VectorXd& p) {
        std::complex<double> acc(0.0, 0.0);
        for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
            acc = acc * x + p[i];
        return acc;
    };
    return horner(num) / horner(den);
}

std::complex<double> TransferFunction::response(double omega, double period) const {
    if (domain == Domain::Continuous)
        return eval(std::complex<double>(0.0, omega));
    return eval(std::exp(std::complex<double>(0.0, omega * period)));
}

} // namespace hyperc
