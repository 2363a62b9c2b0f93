#pragma once

#include <complex>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fimcon {

/// Real univariate polynomial with coefficients stored ascending by power:
/// coeffs()[j] is the coefficient of s^j. Trailing zero coefficients are
/// stripped on construction, so degree() == coeffs().size() - 1 and the
/// leading coefficient is nonzero unless the polynomial is identically zero.
class Polynomial {
public:
    Polynomial();  // zero polynomial
    explicit Polynomial(std::vector<double> coefficients);
    Polynomial(std::initializer_list<double> coefficients);

    static Polynomial constant(double c);
    static Polynomial one() { return constant(1.0); }

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const;
    const std::vector<double>& coeffs() const { return coeffs_; }
    double coeff(int power) const;  // 0 for powers beyond degree
    double leading() const { return coeffs_.back(); }
    bool is_monic(double tol = 1e-12) const;

    double operator()(double s) const;
    std::complex<double> operator()(std::complex<double> s) const;
    /// p(M) for a square matrix M, evaluated by Horner's scheme.
    Eigen::MatrixXd operator()(const Eigen::MatrixXd& M) const;

    Polynomial& operator*=(const Polynomial& rhs);
    Polynomial& operator+=(const Polynomial& rhs);
    Polynomial& operator-=(const Polynomial& rhs);

    friend Polynomial operator*(Polynomial lhs, const Polynomial& rhs) { return lhs *= rhs; }
    friend Polynomial operator+(Polynomial lhs, const Polynomial& rhs) { return lhs += rhs; }
    friend Polynomial operator-(Polynomial lhs, const Polynomial& rhs) { return lhs -= rhs; }
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }

    std::string to_string(const std::string& var = "s") const;

private:
    void normalize();
    std::vector<double> coeffs_;  // ascending by power, never empty
};

/// Routh-Hurwitz stability test: true iff every root of p lies in the open
/// left half-plane. Decided from the coefficient table without computing
/// roots; a zero or sign change in the first column (including degenerate
/// zero rows) yields false. The sign of the leading coefficient is
/// normalized first. Throws std::domain_error for the zero polynomial and
/// for degree 0.
bool is_hurwitz(const Polynomial& p);

/// Coprimality via the Sylvester resultant: true iff
/// |Res(a,b)| / (|a|_2^deg(b) * |b|_2^deg(a)) > tol.
/// Throws std::domain_error if either polynomial is identically zero.
bool are_coprime(const Polynomial& a, const Polynomial& b, double tol = 1e-9);

/// All complex roots with multiplicity, as eigenvalues of the companion
/// matrix of the monic normalization. Each returned root lambda satisfies
/// |p(lambda)| <= 1e-6 * (1+|lambda|)^deg * max|coeff|.
/// Throws std::domain_error for degree < 1.
std::vector<std::complex<double>> roots(const Polynomial& p);

}  // namespace fimcon
