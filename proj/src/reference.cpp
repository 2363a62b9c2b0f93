#include "fimcon/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace fimcon {

ReferenceTerm ReferenceTerm::constant(double a) { return {Kind::Constant, a, 0, 0, 0, 0}; }

ReferenceTerm ReferenceTerm::poly(double a, int power) {
    if (power < 0) throw std::domain_error("reference: polynomial power must be nonnegative");
    return {Kind::Poly, a, power, 0, 0, 0};
}

ReferenceTerm ReferenceTerm::sine(double a, double omega, double phase) {
    return {Kind::Sin, a, 0, omega, phase, 0};
}

ReferenceTerm ReferenceTerm::cosine(double a, double omega, double phase) {
    return {Kind::Cos, a, 0, omega, phase, 0};
}

ReferenceTerm ReferenceTerm::exponential(double a, double rate) {
    return {Kind::Exp, a, 0, 0, 0, rate};
}

double ReferenceTerm::derivative(double t, int order) const {
    switch (kind) {
        case Kind::Constant:
            return order == 0 ? amplitude : 0.0;
        case Kind::Poly: {
            if (order > power) return 0.0;
            double c = amplitude;
            for (int k = 0; k < order; ++k) c *= static_cast<double>(power - k);
            return c * std::pow(t, power - order);
        }
        case Kind::Sin:
        case Kind::Cos: {
            // Rotate through the four-phase cycle instead of shifting the
            // argument by order*pi/2, which keeps the phase exact.
            const double arg = omega * t + phase;
            const double scale = amplitude * std::pow(omega, order);
            const int step = (kind == Kind::Sin ? 0 : 1) + order;
            switch (step % 4) {
                case 0: return scale * std::sin(arg);
                case 1: return scale * std::cos(arg);
                case 2: return -scale * std::sin(arg);
                default: return -scale * std::cos(arg);
            }
        }
        case Kind::Exp:
            return amplitude * std::pow(rate, order) * std::exp(rate * t);
    }
    return 0.0;
}

ReferenceSignal::ReferenceSignal(std::vector<std::vector<ReferenceTerm>> channels, Polynomial alpha)
    : channels_(std::move(channels)), alpha_(std::move(alpha)) {
    if (channels_.empty()) throw std::domain_error("reference: need at least one channel");
}

Eigen::MatrixXd ReferenceSignal::evaluate(double t, int order) const {
    if (order < 0) throw std::domain_error("reference: order must be nonnegative");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(channels(), order + 1);
    for (int i = 0; i < channels(); ++i)
        for (const auto& term : channels_[static_cast<std::size_t>(i)])
            for (int j = 0; j <= order; ++j) out(i, j) += term.derivative(t, j);
    return out;
}

bool verify_membership(const ReferenceSignal& ref, double t_max, int grid_points) {
    if (grid_points < 2 || t_max <= 0.0)
        throw std::domain_error("verify_membership: bad grid specification");
    const Polynomial& alpha = ref.alpha();
    const int p = alpha.degree();

    double max_residual = 0.0;
    double max_signal = 0.0;
    for (int g = 0; g < grid_points; ++g) {
        const double t = t_max * static_cast<double>(g) / static_cast<double>(grid_points - 1);
        const Eigen::MatrixXd derivs = ref.evaluate(t, p);
        Eigen::VectorXd residual = Eigen::VectorXd::Zero(ref.channels());
        for (int j = 0; j <= p; ++j) residual += alpha.coeff(j) * derivs.col(j);
        max_residual = std::max(max_residual, residual.norm());
        max_signal = std::max(max_signal, derivs.col(0).norm());
    }
    return max_residual <= 1e-8 * (1.0 + max_signal);
}

}  // namespace fimcon
