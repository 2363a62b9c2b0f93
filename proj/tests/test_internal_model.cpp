#include <doctest.h>

#include <complex>

#include "fimcon/internal_model.hpp"
#include "support.hpp"

using namespace fimcon;
using fimcon::testsupport::demo_alpha;
using fimcon::testsupport::demo_plant;
using fimcon::testsupport::kOmega0;
using fimcon::testsupport::spectra_match;

TEST_CASE("default beta is the shifted binomial power") {
    CHECK(default_beta(demo_alpha(), 3.0) == Polynomial{27.0, 27.0, 9.0, 1.0});
    CHECK(default_beta(Polynomial{0.0, 1.0}, 1.0) == Polynomial{1.0, 1.0});
    CHECK_THROWS_AS((void)default_beta(Polynomial{2.0, 1.0}, 2.0), std::domain_error);
}

TEST_CASE("controller-canonical synthesis of the demo internal model") {
    const auto im = realize(demo_alpha(), default_beta(demo_alpha(), 3.0), 1);

    Eigen::MatrixXd expected_A(3, 3);
    expected_A << 0, 1, 0, 0, 0, 1, 0, -kOmega0 * kOmega0, 0;
    CHECK((im.A_hat - expected_A).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK(im.b_hat(0) == 0.0);
    CHECK(im.b_hat(1) == 0.0);
    CHECK(im.b_hat(2) == 1.0);
    CHECK(im.c_hat(0) == doctest::Approx(27.0));
    CHECK(im.c_hat(1) == doctest::Approx(27.0 - kOmega0 * kOmega0));
    CHECK(im.c_hat(2) == doctest::Approx(9.0));
}

TEST_CASE("synthesis edge cases") {
    const auto scalar = realize(Polynomial{0.0, 1.0}, Polynomial{1.0, 1.0}, 1);
    CHECK(scalar.A_hat(0, 0) == 0.0);
    CHECK(scalar.b_hat(0) == 1.0);
    CHECK(scalar.c_hat(0) == 1.0);

    const auto two = realize(Polynomial{1.0, 0.0, 1.0}, Polynomial{1.0, 2.0, 1.0}, 2);
    CHECK(two.A_tilde.rows() == 4);
    Eigen::MatrixXd block(2, 2);
    block << 0, 1, -1, 0;
    CHECK((two.A_tilde.topLeftCorner(2, 2) - block).cwiseAbs().maxCoeff() == 0.0);
    CHECK((two.A_tilde.bottomRightCorner(2, 2) - block).cwiseAbs().maxCoeff() == 0.0);
    CHECK(two.A_tilde.topRightCorner(2, 2).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS((void)realize(demo_alpha(), Polynomial{1.0, 1.0}, 1), std::domain_error);
    CHECK_THROWS_AS((void)realize(Polynomial{2.0, 1.0}, Polynomial{2.0, 1.0}, 1),
                    std::domain_error);  // not coprime
    CHECK_THROWS_AS((void)realize(Polynomial{0.0, 1.0}, Polynomial{-1.0, 1.0}, 1),
                    std::domain_error);  // beta not Hurwitz
}

TEST_CASE("lifted transfer identity at off-pole sample points") {
    using C = std::complex<double>;
    const auto im = realize(demo_alpha(), default_beta(demo_alpha(), 3.0), 2);
    const int np = im.m * im.order();
    const std::vector<C> samples = {C(1, 2), C(1, -2), C(3, 0),  C(0, 0.5),
                                    C(-0.7, 1.3), C(2.2, -0.4), C(-1.5, 0.9), C(4, 4)};
    for (const auto& s : samples) {
        const Eigen::MatrixXcd resolvent =
            (s * Eigen::MatrixXcd::Identity(np, np) - im.A_tilde.cast<C>()).inverse();
        const Eigen::MatrixXcd G = im.C_tilde.cast<C>() * resolvent * im.B_tilde.cast<C>() +
                                   Eigen::MatrixXcd::Identity(im.m, im.m);
        const C expected = im.beta(s) / im.alpha(s);
        const Eigen::MatrixXcd diff = G - expected * Eigen::MatrixXcd::Identity(im.m, im.m);
        CHECK(diff.cwiseAbs().maxCoeff() <= 1e-8 * std::abs(expected));
    }
}

TEST_CASE("minimality of synthesized realizations") {
    for (double shift : {1.0, 2.5, 3.0}) {
        const auto im = realize(demo_alpha(), default_beta(demo_alpha(), shift), 1);
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
        CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(ctrb).rank() == p);
        CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(obsv).rank() == p);
    }
}

TEST_CASE("alpha condition against the plant's invariant zeros") {
    CHECK(check_alpha_condition(demo_plant(), demo_alpha()));
    CHECK_FALSE(check_alpha_condition(demo_plant(), Polynomial{1.0, 1.0}));  // zero at -1
    // Purely imaginary roots never collide with open-left-half-plane zeros.
    CHECK(check_alpha_condition(demo_plant(), Polynomial{4.0, 0.0, 1.0}));
}

TEST_CASE("interconnection of the demo plant and internal model") {
    const auto im = realize(demo_alpha(), default_beta(demo_alpha(), 3.0), 1);
    const auto ic = interconnect(demo_plant(), im);
    CHECK(ic.A_ic.rows() == 6);
    CHECK((ic.C_ic * ic.A_ic * ic.B_ic)(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

    const auto report = classify(ic.as_system());
    CHECK(report.in_sigma_mr);
    CHECK(report.relative_degree == 2);
}

TEST_CASE("relative-degree-one interconnection keeps CB") {
    const auto plant = random_sigma_mr(1, 1, 2, 42);
    const auto im = realize(Polynomial{0.0, 1.0}, Polynomial{1.0, 1.0}, 1);
    const auto ic = interconnect(plant, im);
    const double cb = (plant.C * plant.B)(0, 0);
    CHECK((ic.C_ic * ic.B_ic)(0, 0) == doctest::Approx(cb).epsilon(1e-12));
}

TEST_CASE("class preservation over 100 random plant/internal-model pairs") {
    int count = 0;
    for (int m : {1, 2}) {
        for (int r : {1, 2, 3}) {
            for (int q : {0, 1, 3}) {
                for (int rep = 0; rep < 6; ++rep) {
                    if (count >= 100) break;
                    const std::uint64_t seed =
                        static_cast<std::uint64_t>(271 * m + 31 * r + 7 * q + rep);
                    const auto plant = random_sigma_mr_detailed(m, r, q, seed, rep % 2 == 0);
                    const double omega = 1.0 + 0.5 * static_cast<double>(count % 7);
                    const Polynomial alpha =
                        Polynomial{0.0, 1.0} * Polynomial{omega * omega, 0.0, 1.0};
                    const auto im = realize(alpha, default_beta(alpha, 3.0), m);
                    const auto ic = interconnect(plant.system, im);
                    const auto report = classify(ic.as_system());
                    REQUIRE(report.in_sigma_mr);
                    CHECK(report.relative_degree == r);
                    CHECK(report.minimum_phase);
                    CHECK((report.gamma - plant.gamma).cwiseAbs().maxCoeff() <=
                          1e-8 * plant.gamma.cwiseAbs().maxCoeff());
                    ++count;
                }
            }
        }
    }
    CHECK(count == 100);
}

TEST_CASE("reduced relative-degree-one structure of the closed cascade") {
    const auto im = realize(demo_alpha(), default_beta(demo_alpha(), 3.0), 1);
    const auto ic = interconnect(demo_plant(), im);
    const double k1 = 74.13;
    const Polynomial p_r{k1, 1.0};

    const Eigen::MatrixXd C_hat = ic.C_ic * p_r(ic.A_ic);
    CHECK((C_hat * ic.B_ic)(0, 0) == doctest::Approx(1.0).epsilon(1e-9));

    const auto zeros = invariant_zeros(StateSpaceSystem{ic.A_ic, ic.B_ic, C_hat});
    CHECK(zeros.size() == 5);
    for (const auto& z : zeros) {
        CHECK(z.real() < 0.0);
        // Union of the plant zero, the beta roots and the root of p_r. The
        // beta root has multiplicity three, which limits its recoverable
        // accuracy to roughly the cube root of the coefficient roundoff.
        const double d = std::min({std::abs(z - std::complex<double>(-1, 0)),
                                   std::abs(z - std::complex<double>(-3, 0)),
                                   std::abs(z - std::complex<double>(-k1, 0))});
        CHECK(d <= 5e-2);
    }
}
