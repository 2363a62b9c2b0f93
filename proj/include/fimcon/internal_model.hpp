#pragma once

#include "fimcon/polynomial.hpp"
#include "fimcon/state_space.hpp"

namespace fimcon {

/// Minimal realization of beta(s)/alpha(s), replicated block-diagonally over
/// m channels: z' = A_tilde z + B_tilde w, u = C_tilde z + w. The scalar
/// core (A_hat, b_hat, c_hat, 1) is in controller-canonical coordinates.
struct InternalModelRealization {
    Eigen::MatrixXd A_hat;     // p x p companion matrix of alpha
    Eigen::VectorXd b_hat;     // p
    Eigen::RowVectorXd c_hat;  // p, coefficients of beta - alpha
    Polynomial alpha;          // monic, degree p
    Polynomial beta;           // monic, Hurwitz, degree p, coprime with alpha
    int m = 1;                 // channel count
    Eigen::MatrixXd A_tilde;   // mp x mp
    Eigen::MatrixXd B_tilde;   // mp x m
    Eigen::MatrixXd C_tilde;   // m x mp

    int order() const { return static_cast<int>(A_hat.rows()); }
};

/// Serial interconnection of a plant and an internal model:
/// A_ic = [A, B*C_tilde; 0, A_tilde], B_ic = [B; B_tilde], C_ic = [C, 0].
struct Interconnection {
    Eigen::MatrixXd A_ic;
    Eigen::MatrixXd B_ic;
    Eigen::MatrixXd C_ic;
    int n = 0;  // plant states
    int m = 0;  // channels
    int p = 0;  // internal model order per channel

    StateSpaceSystem as_system() const { return StateSpaceSystem{A_ic, B_ic, C_ic}; }
};

/// beta(s) = (s + shift)^p for p = deg alpha. Throws std::domain_error if
/// -shift is a root of alpha (the pair would not be coprime; pick another
/// shift).
Polynomial default_beta(const Polynomial& alpha, double shift = 3.0);

/// Controller-canonical synthesis of the internal model for a coprime pair
/// (alpha, beta) of equal-degree monic polynomials with beta Hurwitz. All
/// structural invariants (minimality, the sampled transfer identity
/// c_hat (sI - A_hat)^{-1} b_hat + 1 = beta(s)/alpha(s)) are verified before
/// returning. Throws std::domain_error / std::runtime_error on violations.
InternalModelRealization realize(const Polynomial& alpha, const Polynomial& beta, int m);

/// True iff no root of alpha is within 1e-7 of an invariant zero of sys,
/// i.e. the Rosenbrock matrix keeps full rank at every root of alpha.
bool check_alpha_condition(const StateSpaceSystem& sys, const Polynomial& alpha);

/// Assembles the serial interconnection and verifies that it inherits the
/// plant's class membership with the same relative degree and gain.
Interconnection interconnect(const StateSpaceSystem& sys, const InternalModelRealization& im);

}  // namespace fimcon
