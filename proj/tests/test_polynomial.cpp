#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "fimcon/polynomial.hpp"
#include "support.hpp"

using namespace fimcon;
using fimcon::testsupport::kOmega0;
using fimcon::testsupport::spectra_match;

namespace {

Polynomial random_poly(std::mt19937& rng, int max_degree) {
    std::uniform_int_distribution<int> deg(1, max_degree);
    std::uniform_real_distribution<double> coeff(-10.0, 10.0);
    const int d = deg(rng);
    std::vector<double> c(static_cast<std::size_t>(d) + 1);
    for (auto& v : c) v = coeff(rng);
    while (std::abs(c.back()) < 1e-3) c.back() = coeff(rng);
    return Polynomial(c);
}

}  // namespace

TEST_CASE("polynomial basics and normalization") {
    Polynomial p{1.0, 2.0, 0.0, 0.0};
    CHECK(p.degree() == 1);
    CHECK(p.coeff(0) == 1.0);
    CHECK(p.coeff(5) == 0.0);
    CHECK(Polynomial{}.is_zero());
    CHECK(Polynomial{0.0, 0.0}.is_zero());
    CHECK(Polynomial{3.0, -4.0, 1.0}(3.0) == doctest::Approx(0.0));
}

TEST_CASE("multiplication matches the expanded binomial") {
    const Polynomial factor{3.0, 1.0};
    const Polynomial cube = factor * factor * factor;
    CHECK(cube == Polynomial{27.0, 27.0, 9.0, 1.0});

    const Polynomial alpha{0.0, kOmega0 * kOmega0, 0.0, 1.0};
    CHECK(Polynomial::one() * alpha == alpha);

    CHECK(Polynomial{74.13, 1.0} * Polynomial::one() == Polynomial{74.13, 1.0});
}

TEST_CASE("routh-hurwitz on the worked examples") {
    CHECK(is_hurwitz(Polynomial{27.0, 27.0, 9.0, 1.0}));
    CHECK_FALSE(is_hurwitz(Polynomial{27.0, 27.0, 0.0, 1.0}));  // zero s^2 coefficient
    CHECK_FALSE(is_hurwitz(Polynomial{0.0, kOmega0 * kOmega0, 0.0, 1.0}));
    CHECK(is_hurwitz(Polynomial{3.0, 1.0}));
    CHECK_FALSE(is_hurwitz(Polynomial{-3.0, 1.0}));
    // Sign normalization: -(s+1)(s+2) is still Hurwitz.
    CHECK(is_hurwitz(Polynomial{-2.0, -3.0, -1.0}));

    CHECK_THROWS_AS((void)is_hurwitz(Polynomial{}), std::domain_error);
    CHECK_THROWS_AS((void)is_hurwitz(Polynomial::constant(4.0)), std::domain_error);
}

TEST_CASE("coprimality via the scaled resultant") {
    const Polynomial alpha{0.0, kOmega0 * kOmega0, 0.0, 1.0};
    const Polynomial beta{27.0, 27.0, 9.0, 1.0};
    CHECK(are_coprime(alpha, beta));

    const Polynomial a = Polynomial{0.0, 1.0} * Polynomial{1.0, 1.0};
    const Polynomial b = Polynomial{1.0, 1.0} * Polynomial{2.0, 1.0};
    CHECK_FALSE(are_coprime(a, b));  // shared root at -1

    // Nearly identical quadratics count as non-coprime at the default tol.
    CHECK_FALSE(are_coprime(Polynomial{0.0, 0.0, 1.0}, Polynomial{1e-14, 0.0, 1.0}, 1e-9));

    CHECK(are_coprime(Polynomial::constant(2.0), a));
    CHECK_THROWS_AS((void)are_coprime(Polynomial{}, a), std::domain_error);
}

TEST_CASE("roots of the worked examples") {
    using C = std::complex<double>;
    const auto r1 = roots(Polynomial{0.0, kOmega0 * kOmega0, 0.0, 1.0});
    CHECK(spectra_match(r1, {C(0, 0), C(0, kOmega0), C(0, -kOmega0)}, 1e-8));

    CHECK(spectra_match(roots(Polynomial{3.0, 1.0}), {C(-3, 0)}, 1e-12));
    CHECK(spectra_match(roots(Polynomial{3.0, -4.0, 1.0}), {C(1, 0), C(3, 0)}, 1e-10));
    CHECK_THROWS_AS((void)roots(Polynomial::constant(1.0)), std::domain_error);
}

TEST_CASE("matrix evaluation via horner") {
    Eigen::MatrixXd M(2, 2);
    M << 0, 1, -2, -3;
    const Polynomial p{2.0, 3.0, 1.0};  // characteristic polynomial of M
    CHECK(p(M).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("routh-hurwitz agrees with the root oracle on 1000 random polynomials") {
    std::mt19937 rng(20240811);
    int compared = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Polynomial p = random_poly(rng, 6);
        const auto rts = roots(p);
        double max_re = -1e300;
        double min_abs_re = 1e300;
        for (const auto& z : rts) {
            max_re = std::max(max_re, z.real());
            min_abs_re = std::min(min_abs_re, std::abs(z.real()));
        }
        if (min_abs_re < 1e-7) continue;  // near-axis cases excluded from the oracle
        ++compared;
        CHECK(is_hurwitz(p) == (max_re < -1e-7));
    }
    CHECK(compared > 900);  // the exclusion should be rare
}

TEST_CASE("multiplication is commutative and associative on root multisets") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const Polynomial a = random_poly(rng, 3);
        const Polynomial b = random_poly(rng, 3);
        const Polynomial c = random_poly(rng, 3);
        CHECK(spectra_match(roots(a * b), roots(b * a), 1e-6));
        CHECK(spectra_match(roots((a * b) * c), roots(a * (b * c)), 1e-6));
    }
}

TEST_CASE("roots of a product are the union of the factor roots") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Polynomial a = random_poly(rng, 4);
        const Polynomial b = random_poly(rng, 4);
        auto expected = roots(a);
        const auto rb = roots(b);
        expected.insert(expected.end(), rb.begin(), rb.end());
        CHECK(spectra_match(roots(a * b), expected, 1e-6));
    }
}
