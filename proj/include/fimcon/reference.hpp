#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fimcon/polynomial.hpp"

namespace fimcon {

/// One summand of a reference channel. Every kind has closed-form
/// derivatives of arbitrary order, so the signal and its derivatives are
/// evaluated exactly (no numerical differentiation anywhere).
struct ReferenceTerm {
    enum class Kind { Constant, Poly, Sin, Cos, Exp };
    Kind kind = Kind::Constant;
    double amplitude = 0.0;
    int power = 0;       // Poly: amplitude * t^power
    double omega = 0.0;  // Sin/Cos: amplitude * sin/cos(omega t + phase)
    double phase = 0.0;
    double rate = 0.0;   // Exp: amplitude * exp(rate t)

    static ReferenceTerm constant(double a);
    static ReferenceTerm poly(double a, int power);
    static ReferenceTerm sine(double a, double omega, double phase = 0.0);
    static ReferenceTerm cosine(double a, double omega, double phase = 0.0);
    static ReferenceTerm exponential(double a, double rate);

    double derivative(double t, int order) const;
};

/// Reference signal with m channels, each a finite sum of terms, together
/// with the annihilating polynomial alpha it claims membership of.
class ReferenceSignal {
public:
    ReferenceSignal(std::vector<std::vector<ReferenceTerm>> channels, Polynomial alpha);

    int channels() const { return static_cast<int>(channels_.size()); }
    const Polynomial& alpha() const { return alpha_; }
    const std::vector<std::vector<ReferenceTerm>>& terms() const { return channels_; }

    /// m x (order+1) matrix; column j holds the j-th time derivative at t.
    Eigen::MatrixXd evaluate(double t, int order) const;

private:
    std::vector<std::vector<ReferenceTerm>> channels_;
    Polynomial alpha_;
};

/// Numerical membership test for the class R(alpha): the residual of
/// alpha(d/dt) applied to the signal, assembled from analytic derivatives,
/// stays below 1e-8 * (1 + max |y_ref|) on a grid over [0, t_max].
bool verify_membership(const ReferenceSignal& ref, double t_max = 2.0, int grid_points = 201);

}  // namespace fimcon
