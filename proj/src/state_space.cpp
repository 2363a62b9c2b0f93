#include "fimcon/state_space.hpp"

#include <cmath>
#include <random>

#include "fimcon/polynomial.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace fimcon {

namespace {

constexpr double kRelDegTol = 1e-10;      // scale-relative Markov parameter threshold
constexpr double kMinPhaseMargin = 1e-9;  // zeros this close to the axis fail the test

double max_norm(const Eigen::MatrixXd& M) {
    return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff();
}

double smallest_singular_value(const Eigen::MatrixXd& M) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    return svd.singularValues().minCoeff();
}

}  // namespace

void StateSpaceSystem::validate() const {
    if (A.rows() != A.cols()) throw std::domain_error("state_space: A must be square");
    if (A.rows() < 1) throw std::domain_error("state_space: n must be at least 1");
    if (B.rows() != A.rows() || C.cols() != A.rows())
        throw std::domain_error("state_space: B/C dimensions inconsistent with A");
    if (B.cols() < 1 || C.rows() != B.cols())
        throw std::domain_error("state_space: need m >= 1 with C having m rows");
}

std::optional<int> strict_relative_degree(const StateSpaceSystem& sys, int r_max) {
    sys.validate();
    if (r_max < 1 || r_max > sys.n())
        throw std::domain_error("strict_relative_degree: require 1 <= r_max <= n");

    const double c_norm = max_norm(sys.C);
    const double b_norm = max_norm(sys.B);
    const double a_norm = max_norm(sys.A);

    Eigen::MatrixXd lead = sys.C;  // C A^k as k advances
    double a_pow = 1.0;            // |A|^k
    for (int k = 0; k <= r_max - 1; ++k) {
        const Eigen::MatrixXd markov = lead * sys.B;
        const double scale = c_norm * a_pow * b_norm;
        if (max_norm(markov) > kRelDegTol * scale) {
            if (smallest_singular_value(markov) > kRelDegTol * scale) return k + 1;
            return std::nullopt;  // first nonzero Markov parameter is singular
        }
        lead = lead * sys.A;
        a_pow *= a_norm;
    }
    return std::nullopt;
}

std::pair<Eigen::MatrixXd, bool> high_frequency_gain(const StateSpaceSystem& sys, int r) {
    sys.validate();
    if (r < 1 || r > sys.n()) throw std::domain_error("high_frequency_gain: r out of range");

    const double c_norm = max_norm(sys.C);
    const double b_norm = max_norm(sys.B);
    const double a_norm = max_norm(sys.A);

    Eigen::MatrixXd lead = sys.C;
    double a_pow = 1.0;
    for (int k = 0; k < r - 1; ++k) {
        if (max_norm(lead * sys.B) > kRelDegTol * c_norm * a_pow * b_norm)
            throw std::domain_error("high_frequency_gain: C A^k B nonzero below the given r");
        lead = lead * sys.A;
        a_pow *= a_norm;
    }
    const Eigen::MatrixXd gamma = lead * sys.B;
    if (smallest_singular_value(gamma) <= kRelDegTol * c_norm * a_pow * b_norm)
        throw std::domain_error("high_frequency_gain: C A^{r-1} B is not invertible");

    const Eigen::MatrixXd sym = gamma + gamma.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    const bool pd = eig.eigenvalues().minCoeff() > 1e-10 * max_norm(gamma);
    return {gamma, pd};
}

std::vector<std::complex<double>> invariant_zeros(const StateSpaceSystem& sys) {
    sys.validate();
    const int n = sys.n();
    const int m = sys.m();
    if (m > n) throw std::domain_error("invariant_zeros: require m <= n");

    const int dim = n + m;
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim, dim);
    M.topLeftCorner(n, n) = sys.A.cast<std::complex<double>>();
    M.topRightCorner(n, m) = sys.B.cast<std::complex<double>>();
    M.bottomLeftCorner(m, n) = sys.C.cast<std::complex<double>>();
    Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(dim, dim);
    E.topLeftCorner(n, n).setIdentity();

    // p(lambda) = det(M - lambda E) is a polynomial of degree <= rank E = n
    // whose roots are exactly the points where the Rosenbrock matrix loses
    // rank. Interpolating p on a circle (an inverse DFT, so the Vandermonde
    // system is perfectly conditioned) avoids the QZ failure mode where a
    // defective infinite eigenvalue smears into large spurious finite pairs.
    const int K = n + 1;
    const auto sample = [&](double rho, std::vector<std::complex<double>>& values) {
        double max_value = 0.0;
        for (int j = 0; j < K; ++j) {
            const double theta = 2.0 * M_PI * j / K;
            const std::complex<double> lambda =
                rho * std::complex<double>(std::cos(theta), std::sin(theta));
            values[static_cast<std::size_t>(j)] = (M - lambda * E).partialPivLu().determinant();
            max_value = std::max(max_value, std::abs(values[static_cast<std::size_t>(j)]));
        }
        return max_value;
    };
    // Coefficients of p from the sampled values; returns the index of the
    // largest coefficient contributing on the circle (the effective degree).
    const auto interpolate = [&](double rho, const std::vector<std::complex<double>>& values,
                                 double max_value, std::vector<double>& coeffs) {
        int degree = 0;
        double rho_k = 1.0;
        for (int k = 0; k < K; ++k) {
            std::complex<double> ck = 0.0;
            for (int j = 0; j < K; ++j) {
                const double theta = -2.0 * M_PI * j * k / K;
                ck += values[static_cast<std::size_t>(j)] *
                      std::complex<double>(std::cos(theta), std::sin(theta));
            }
            ck /= static_cast<double>(K) * rho_k;
            coeffs[static_cast<std::size_t>(k)] = ck.real();
            if (std::abs(ck.real()) * rho_k > 1e-10 * max_value) degree = k;
            rho_k *= rho;
        }
        return degree;
    };

    const double rho1 = std::max({1.0, max_norm(sys.A), max_norm(sys.B), max_norm(sys.C)});
    std::vector<std::complex<double>> values(static_cast<std::size_t>(K));
    std::vector<double> coeffs(static_cast<std::size_t>(K), 0.0);
    const double max_value = sample(rho1, values);

    // A regular pencil has at most n roots, so it must have full rank at one
    // of the n+1 sample points; rank deficiency everywhere means p == 0.
    bool regular = false;
    for (int j = 0; j < K && !regular; ++j) {
        const double theta = 2.0 * M_PI * j / K;
        const std::complex<double> lambda =
            rho1 * std::complex<double>(std::cos(theta), std::sin(theta));
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M - lambda * E);
        regular = svd.singularValues().minCoeff() > 1e-10 * svd.singularValues().maxCoeff();
    }
    if (!regular) throw SingularPencil("invariant_zeros: det(M - lambda E) vanishes identically");

    int degree = interpolate(rho1, values, max_value, coeffs);
    if (degree == 0) return {};

    // Second pass at the scale of the roots themselves (Cauchy bound from
    // the first-pass coefficients); a wide first-pass circle would otherwise
    // drown the low-order coefficients in roundoff.
    double cauchy = 0.0;
    for (int k = 1; k <= degree; ++k)
        cauchy = std::max(cauchy, std::pow(std::abs(coeffs[static_cast<std::size_t>(degree - k)] /
                                                    coeffs[static_cast<std::size_t>(degree)]),
                                           1.0 / k));
    const double rho2 = std::min(rho1, std::max(1.0, 2.0 * cauchy));
    if (rho2 < 0.5 * rho1) {
        const double max_value2 = sample(rho2, values);
        const int degree2 = interpolate(rho2, values, max_value2, coeffs);
        degree = std::max(degree, degree2);  // high-order terms can fade on a small circle
    }

    coeffs.resize(static_cast<std::size_t>(degree) + 1);
    auto zeros = roots(Polynomial(std::move(coeffs)));
    std::sort(zeros.begin(), zeros.end(), [](const auto& x, const auto& y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return zeros;
}

ClassificationReport classify(const StateSpaceSystem& sys) {
    sys.validate();
    ClassificationReport report;

    report.relative_degree = strict_relative_degree(sys, sys.n());
    if (report.relative_degree) {
        auto [gamma, pd] = high_frequency_gain(sys, *report.relative_degree);
        report.gamma = gamma;
        report.gamma_positive_definite = pd;
    } else {
        report.diagnostics.push_back("no strict relative degree within r_max = n");
    }

    bool zeros_known = false;
    if (sys.m() <= sys.n()) {
        try {
            report.invariant_zeros = invariant_zeros(sys);
            zeros_known = true;
        } catch (const SingularPencil& e) {
            report.diagnostics.push_back(e.what());
        }
    } else {
        report.diagnostics.push_back("m > n: Rosenbrock pencil cannot have full rank");
    }

    report.minimum_phase = zeros_known;
    for (const auto& z : report.invariant_zeros)
        if (z.real() >= -kMinPhaseMargin) report.minimum_phase = false;

    report.in_sigma_mr =
        report.relative_degree.has_value() && report.minimum_phase && report.gamma_positive_definite;
    return report;
}

NormalFormPlant random_sigma_mr_detailed(int m, int r, int q, std::uint64_t seed, bool random_basis) {
    if (m < 1 || r < 1 || q < 0) throw std::domain_error("random_sigma_mr: bad dimensions");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> entry(-2.0, 2.0);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto draw = [&](int rows, int cols, auto& dist) {
        Eigen::MatrixXd M(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) M(i, j) = dist(rng);
        return M;
    };

    // Output-chain coefficients and internal dynamics coupling.
    std::vector<Eigen::MatrixXd> R(static_cast<std::size_t>(r));
    for (auto& Ri : R) Ri = draw(m, m, entry);
    Eigen::MatrixXd S = draw(m, q, entry);
    Eigen::MatrixXd P = draw(q, m, entry);

    // Hurwitz internal dynamics: shift the spectrum left of -0.1.
    Eigen::MatrixXd Q = draw(q, q, entry);
    if (q > 0) {
        const double max_re = Eigen::EigenSolver<Eigen::MatrixXd>(Q).eigenvalues().real().maxCoeff();
        Q -= (max_re + 0.2) * Eigen::MatrixXd::Identity(q, q);
    }

    // Gain with symmetric part bounded away from zero, plus a skew part.
    const Eigen::MatrixXd G = draw(m, m, unit);
    const Eigen::MatrixXd K = draw(m, m, unit);
    Eigen::MatrixXd gamma = G.transpose() * G + 0.1 * Eigen::MatrixXd::Identity(m, m) +
                            0.5 * (K - K.transpose());

    const int n = r * m + q;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < r; ++i) A.block(i * m, (i + 1) * m, m, m).setIdentity();
    for (int i = 0; i < r; ++i) A.block((r - 1) * m, i * m, m, m) = R[static_cast<std::size_t>(i)];
    if (q > 0) {
        A.block((r - 1) * m, r * m, m, q) = S;
        A.block(r * m, 0, q, m) = P;
        A.block(r * m, r * m, q, q) = Q;
    }
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, m);
    B.block((r - 1) * m, 0, m, m) = gamma;
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(m, n);
    C.block(0, 0, m, m).setIdentity();

    if (random_basis) {
        const Eigen::MatrixXd T =
            Eigen::HouseholderQR<Eigen::MatrixXd>(draw(n, n, unit)).householderQ();
        A = T * A * T.transpose();
        B = T * B;
        C = C * T.transpose();
    }
    return NormalFormPlant{StateSpaceSystem{A, B, C}, gamma, Q};
}

StateSpaceSystem random_sigma_mr(int m, int r, int q, std::uint64_t seed, bool random_basis) {
    return random_sigma_mr_detailed(m, r, q, seed, random_basis).system;
}

}  // namespace fimcon
