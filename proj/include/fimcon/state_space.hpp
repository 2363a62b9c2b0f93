#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fimcon {

/// Continuous-time linear plant x' = Ax + Bu, y = Cx with as many inputs
/// as outputs (m = B.cols() = C.rows()).
struct StateSpaceSystem {
    Eigen::MatrixXd A;  // n x n
    Eigen::MatrixXd B;  // n x m
    Eigen::MatrixXd C;  // m x n

    int n() const { return static_cast<int>(A.rows()); }
    int m() const { return static_cast<int>(B.cols()); }

    /// Throws std::domain_error on inconsistent dimensions.
    void validate() const;
};

/// Raised when the Rosenbrock pencil [A - sE, B; C, 0] is singular as a
/// polynomial in s, so invariant zeros are undefined.
class SingularPencil : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ClassificationReport {
    std::optional<int> relative_degree;
    Eigen::MatrixXd gamma;  // C A^{r-1} B when relative_degree has a value
    bool gamma_positive_definite = false;
    std::vector<std::complex<double>> invariant_zeros;
    bool minimum_phase = false;
    bool in_sigma_mr = false;
    std::vector<std::string> diagnostics;  // non-fatal findings (e.g. singular pencil)
};

/// Least r <= r_max such that C A^k B vanishes (relative to the scale of
/// C, A^k, B) for all k < r-1 and C A^{r-1} B is invertible; empty if no
/// such r exists within r_max.
std::optional<int> strict_relative_degree(const StateSpaceSystem& sys, int r_max);

/// Gamma = C A^{r-1} B and positive definiteness of its symmetric part.
/// Throws std::domain_error when r is not the strict relative degree.
std::pair<Eigen::MatrixXd, bool> high_frequency_gain(const StateSpaceSystem& sys, int r);

/// Finite generalized eigenvalues of the Rosenbrock pencil, i.e. the points
/// where [A - lambda I, B; C, 0] loses rank. Throws SingularPencil when the
/// pencil is singular for every lambda.
std::vector<std::complex<double>> invariant_zeros(const StateSpaceSystem& sys);

/// Full structural classification against the class Sigma_{m,r}. Never
/// throws on rank-deficient inputs; failures are reported in diagnostics.
ClassificationReport classify(const StateSpaceSystem& sys);

/// Construction record of a generated plant: the state-space form plus the
/// planted pieces the classifier should recover.
struct NormalFormPlant {
    StateSpaceSystem system;
    Eigen::MatrixXd gamma;  // planted high-frequency gain
    Eigen::MatrixXd Q;      // internal dynamics matrix, q x q, Hurwitz
};

/// Random plant guaranteed to lie in Sigma_{m,r}, assembled in normal-form
/// coordinates: an output chain of length r, internal dynamics of dimension
/// q with a Hurwitz state matrix, and a planted positive-definite gain.
/// Deterministic in seed. When random_basis is set, a random orthogonal
/// state transformation is applied so tests do not depend on coordinates.
NormalFormPlant random_sigma_mr_detailed(int m, int r, int q, std::uint64_t seed,
                                         bool random_basis = false);
StateSpaceSystem random_sigma_mr(int m, int r, int q, std::uint64_t seed, bool random_basis = false);

}  // namespace fimcon
