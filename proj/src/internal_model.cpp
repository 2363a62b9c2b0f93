#include "fimcon/internal_model.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/LU>

namespace fimcon {

namespace {

constexpr double kTransferRelTol = 1e-8;
constexpr double kRootCollisionTol = 1e-7;

// Fixed sample points for the transfer identity; points falling into a
// 1e-6 neighborhood of a pole are shifted deterministically.
std::vector<std::complex<double>> transfer_sample_points(const Polynomial& alpha) {
    using C = std::complex<double>;
    std::vector<C> pts = {C(1, 2),    C(1, -2),     C(3, 0),      C(0, 0.5),
                          C(-0.7, 1.3), C(2.2, -0.4), C(-1.5, 0.9), C(4, 4)};
    const auto poles = roots(alpha);
    for (auto& s : pts) {
        bool moved = true;
        while (moved) {
            moved = false;
            for (const auto& p : poles) {
                if (std::abs(s - p) < 1e-6) {
                    s += C(0.31, 0.17);
                    moved = true;
                }
            }
        }
    }
    return pts;
}

void verify_scalar_transfer_identity(const InternalModelRealization& im) {
    const int p = im.order();
    const Eigen::MatrixXcd A = im.A_hat.cast<std::complex<double>>();
    for (const auto& s : transfer_sample_points(im.alpha)) {
        const Eigen::MatrixXcd resolvent =
            (s * Eigen::MatrixXcd::Identity(p, p) - A).partialPivLu().solve(
                im.b_hat.cast<std::complex<double>>());
        const std::complex<double> realized =
            (im.c_hat.cast<std::complex<double>>() * resolvent).value() + 1.0;
        const std::complex<double> expected = im.beta(s) / im.alpha(s);
        if (std::abs(realized - expected) > kTransferRelTol * std::abs(expected))
            throw std::runtime_error("realize: transfer identity violated at a sample point");
    }
}

void verify_minimality(const InternalModelRealization& im) {
    const int p = im.order();
    Eigen::MatrixXd ctrb(p, p), obsv(p, p);
    Eigen::VectorXd col = im.b_hat;
    Eigen::RowVectorXd row = im.c_hat;
    for (int k = 0; k < p; ++k) {
        ctrb.col(k) = col;
        obsv.row(k) = row;
        col = im.A_hat * col;
        row = row * im.A_hat;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu_c(ctrb), lu_o(obsv);
    if (lu_c.rank() < p || lu_o.rank() < p)
        throw std::runtime_error("realize: realization is not minimal");
}

}  // namespace

Polynomial default_beta(const Polynomial& alpha, double shift) {
    if (!alpha.is_monic()) throw std::domain_error("default_beta: alpha must be monic");
    if (alpha.degree() < 1) throw std::domain_error("default_beta: alpha must have degree >= 1");
    if (shift <= 0.0) throw std::domain_error("default_beta: shift must be positive");

    Polynomial beta = Polynomial::one();
    const Polynomial factor{shift, 1.0};
    for (int i = 0; i < alpha.degree(); ++i) beta *= factor;

    if (!are_coprime(alpha, beta))
        throw std::domain_error("default_beta: -shift is a root of alpha; choose another shift");
    return beta;
}

InternalModelRealization realize(const Polynomial& alpha, const Polynomial& beta, int m) {
    if (m < 1) throw std::domain_error("realize: m must be positive");
    if (!alpha.is_monic() || !beta.is_monic())
        throw std::domain_error("realize: alpha and beta must be monic");
    const int p = alpha.degree();
    if (p < 1 || beta.degree() != p)
        throw std::domain_error("realize: alpha and beta must have equal degree >= 1");
    if (!is_hurwitz(beta)) throw std::domain_error("realize: beta is not Hurwitz");
    if (!are_coprime(alpha, beta)) throw std::domain_error("realize: alpha and beta are not coprime");

    InternalModelRealization im;
    im.alpha = alpha;
    im.beta = beta;
    im.m = m;

    im.A_hat = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i + 1 < p; ++i) im.A_hat(i, i + 1) = 1.0;
    for (int j = 0; j < p; ++j) im.A_hat(p - 1, j) = -alpha.coeff(j);

    im.b_hat = Eigen::VectorXd::Zero(p);
    im.b_hat(p - 1) = 1.0;

    const Polynomial remainder = beta - alpha;  // strictly proper numerator, degree <= p-1
    im.c_hat = Eigen::RowVectorXd::Zero(p);
    for (int j = 0; j < p; ++j) im.c_hat(j) = remainder.coeff(j);

    im.A_tilde = Eigen::MatrixXd::Zero(m * p, m * p);
    im.B_tilde = Eigen::MatrixXd::Zero(m * p, m);
    im.C_tilde = Eigen::MatrixXd::Zero(m, m * p);
    for (int i = 0; i < m; ++i) {
        im.A_tilde.block(i * p, i * p, p, p) = im.A_hat;
        im.B_tilde.block(i * p, i, p, 1) = im.b_hat;
        im.C_tilde.block(i, i * p, 1, p) = im.c_hat;
    }

    verify_minimality(im);
    verify_scalar_transfer_identity(im);
    return im;
}

bool check_alpha_condition(const StateSpaceSystem& sys, const Polynomial& alpha) {
    if (!alpha.is_monic()) throw std::domain_error("check_alpha_condition: alpha must be monic");
    const auto alpha_roots = roots(alpha);
    const auto zeros = invariant_zeros(sys);
    for (const auto& r : alpha_roots)
        for (const auto& z : zeros)
            if (std::abs(r - z) < kRootCollisionTol) return false;
    return true;
}

Interconnection interconnect(const StateSpaceSystem& sys, const InternalModelRealization& im) {
    sys.validate();
    if (im.m != sys.m()) throw std::domain_error("interconnect: channel counts differ");

    const auto plant_report = classify(sys);
    if (!plant_report.in_sigma_mr)
        throw std::domain_error("interconnect: plant is not in the class Sigma_{m,r}");
    const int r = *plant_report.relative_degree;

    const int n = sys.n();
    const int m = sys.m();
    const int p = im.order();
    const int nz = m * p;

    Interconnection ic;
    ic.n = n;
    ic.m = m;
    ic.p = p;
    ic.A_ic = Eigen::MatrixXd::Zero(n + nz, n + nz);
    ic.A_ic.topLeftCorner(n, n) = sys.A;
    ic.A_ic.topRightCorner(n, nz) = sys.B * im.C_tilde;
    ic.A_ic.bottomRightCorner(nz, nz) = im.A_tilde;
    ic.B_ic = Eigen::MatrixXd::Zero(n + nz, m);
    ic.B_ic.topRows(n) = sys.B;
    ic.B_ic.bottomRows(nz) = im.B_tilde;
    ic.C_ic = Eigen::MatrixXd::Zero(m, n + nz);
    ic.C_ic.leftCols(n) = sys.C;

    // The interconnection must keep the plant's Markov gain and class.
    Eigen::MatrixXd lead = ic.C_ic;
    for (int k = 0; k < r - 1; ++k) lead = lead * ic.A_ic;
    const Eigen::MatrixXd gain = lead * ic.B_ic;
    const double gamma_scale = std::max(plant_report.gamma.cwiseAbs().maxCoeff(), 1e-30);
    if ((gain - plant_report.gamma).cwiseAbs().maxCoeff() > 1e-9 * gamma_scale)
        throw std::runtime_error("interconnect: C_ic A_ic^{r-1} B_ic deviates from the plant gain");

    const auto ic_report = classify(ic.as_system());
    if (!ic_report.in_sigma_mr || ic_report.relative_degree != r)
        throw std::runtime_error("interconnect: interconnection failed Sigma_{m,r} verification");
    return ic;
}

}  // namespace fimcon
