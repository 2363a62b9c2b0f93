#include "fimcon/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace fimcon {

Polynomial::Polynomial() : coeffs_{0.0} {}

Polynomial::Polynomial(std::vector<double> coefficients) : coeffs_(std::move(coefficients)) {
    if (coeffs_.empty()) coeffs_.push_back(0.0);
    normalize();
}

Polynomial::Polynomial(std::initializer_list<double> coefficients)
    : Polynomial(std::vector<double>(coefficients)) {}

Polynomial Polynomial::constant(double c) { return Polynomial{c}; }

void Polynomial::normalize() {
    while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
}

bool Polynomial::is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }

double Polynomial::coeff(int power) const {
    if (power < 0 || power > degree()) return 0.0;
    return coeffs_[static_cast<std::size_t>(power)];
}

bool Polynomial::is_monic(double tol) const { return std::abs(leading() - 1.0) <= tol; }

double Polynomial::operator()(double s) const {
    double y = coeffs_.back();
    for (int j = degree() - 1; j >= 0; --j) y = y * s + coeffs_[static_cast<std::size_t>(j)];
    return y;
}

std::complex<double> Polynomial::operator()(std::complex<double> s) const {
    std::complex<double> y = coeffs_.back();
    for (int j = degree() - 1; j >= 0; --j) y = y * s + coeffs_[static_cast<std::size_t>(j)];
    return y;
}

Eigen::MatrixXd Polynomial::operator()(const Eigen::MatrixXd& M) const {
    if (M.rows() != M.cols()) throw std::domain_error("polynomial of a non-square matrix");
    const Eigen::Index n = M.rows();
    Eigen::MatrixXd Y = coeffs_.back() * Eigen::MatrixXd::Identity(n, n);
    for (int j = degree() - 1; j >= 0; --j) {
        Y = Y * M + coeffs_[static_cast<std::size_t>(j)] * Eigen::MatrixXd::Identity(n, n);
    }
    return Y;
}

Polynomial& Polynomial::operator*=(const Polynomial& rhs) {
    std::vector<double> out(coeffs_.size() + rhs.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        for (std::size_t j = 0; j < rhs.coeffs_.size(); ++j) out[i + j] += coeffs_[i] * rhs.coeffs_[j];
    coeffs_ = std::move(out);
    normalize();
    return *this;
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
    coeffs_.resize(std::max(coeffs_.size(), rhs.coeffs_.size()), 0.0);
    for (std::size_t j = 0; j < rhs.coeffs_.size(); ++j) coeffs_[j] += rhs.coeffs_[j];
    normalize();
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
    coeffs_.resize(std::max(coeffs_.size(), rhs.coeffs_.size()), 0.0);
    for (std::size_t j = 0; j < rhs.coeffs_.size(); ++j) coeffs_[j] -= rhs.coeffs_[j];
    normalize();
    return *this;
}

std::string Polynomial::to_string(const std::string& var) const {
    std::ostringstream os;
    bool first = true;
    for (int j = degree(); j >= 0; --j) {
        const double c = coeffs_[static_cast<std::size_t>(j)];
        if (c == 0.0 && degree() > 0) continue;
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        first = false;
        const double a = std::abs(c);
        if (j == 0 || a != 1.0) os << a;
        if (j >= 1) os << var;
        if (j >= 2) os << "^" << j;
    }
    if (first) os << "0";
    return os.str();
}

bool is_hurwitz(const Polynomial& p) {
    if (p.is_zero()) throw std::domain_error("is_hurwitz: zero polynomial");
    const int n = p.degree();
    if (n < 1) throw std::domain_error("is_hurwitz: degree must be at least 1");

    // Descending coefficients with positive leading coefficient.
    std::vector<double> c(static_cast<std::size_t>(n) + 1);
    const double sign = p.leading() > 0 ? 1.0 : -1.0;
    for (int j = 0; j <= n; ++j) c[static_cast<std::size_t>(n - j)] = sign * p.coeff(j);

    const std::size_t width = static_cast<std::size_t>(n) / 2 + 1;
    std::vector<double> prev(width, 0.0), cur(width, 0.0), next(width, 0.0);
    for (std::size_t j = 0; 2 * j < c.size(); ++j) prev[j] = c[2 * j];
    for (std::size_t j = 0; 2 * j + 1 < c.size(); ++j) cur[j] = c[2 * j + 1];

    if (prev[0] <= 0.0) return false;
    for (int row = 1; row <= n; ++row) {
        if (cur[0] <= 0.0) return false;  // zero or sign change, degenerate rows included
        for (std::size_t j = 0; j + 1 < width; ++j)
            next[j] = (cur[0] * prev[j + 1] - prev[0] * cur[j + 1]) / cur[0];
        next[width - 1] = 0.0;
        prev.swap(cur);
        cur.swap(next);
    }
    return true;
}

namespace {

double coeff_norm(const Polynomial& p) {
    double s = 0.0;
    for (double c : p.coeffs()) s += c * c;
    return std::sqrt(s);
}

}  // namespace

bool are_coprime(const Polynomial& a, const Polynomial& b, double tol) {
    if (a.is_zero() || b.is_zero()) throw std::domain_error("are_coprime: zero polynomial");
    const int da = a.degree();
    const int db = b.degree();
    if (da == 0 || db == 0) return true;  // nonzero constants share no roots with anything

    const int dim = da + db;
    Eigen::MatrixXd syl = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < db; ++i)
        for (int j = 0; j <= da; ++j) syl(i, i + j) = a.coeff(da - j);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j <= db; ++j) syl(db + i, i + j) = b.coeff(db - j);

    const double res = std::abs(syl.partialPivLu().determinant());
    const double scale = std::pow(coeff_norm(a), db) * std::pow(coeff_norm(b), da);
    return res > tol * scale;
}

std::vector<std::complex<double>> roots(const Polynomial& p) {
    const int n = p.degree();
    if (n < 1) throw std::domain_error("roots: degree must be at least 1");

    const double lead = p.leading();
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) companion(i + 1, i) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -p.coeff(i) / lead;

    Eigen::EigenSolver<Eigen::MatrixXd> eig(companion);
    if (eig.info() != Eigen::Success) throw std::runtime_error("roots: eigenvalue iteration failed");

    double max_coeff = 0.0;
    for (double c : p.coeffs()) max_coeff = std::max(max_coeff, std::abs(c));

    std::vector<std::complex<double>> out;
    out.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::complex<double> lambda = eig.eigenvalues()(i);
        const double bound = 1e-6 * std::pow(1.0 + std::abs(lambda), n) * max_coeff;
        if (std::abs(p(lambda)) > bound)
            throw std::runtime_error("roots: residual check failed for " + p.to_string());
        out.push_back(lambda);
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return out;
}

}  // namespace fimcon
