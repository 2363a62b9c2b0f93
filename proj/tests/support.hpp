#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "fimcon/simulation.hpp"

namespace fimcon::testsupport {

inline constexpr double kOmega0 = 10.0 * M_PI;

// Third-order demo plant: unstable, minimum phase, relative degree two,
// scalar gain one. Used across the suites as the canonical worked example.
inline StateSpaceSystem demo_plant() {
    Eigen::MatrixXd A(3, 3);
    A << 0, 1, 0, -3, 4, 0, -5, 0, -1;
    Eigen::MatrixXd B(3, 1);
    B << 0, 1, 0;
    Eigen::MatrixXd C(1, 3);
    C << 1, 0, 0;
    return StateSpaceSystem{A, B, C};
}

// alpha(s) = s^3 + omega0^2 s annihilates 2 + sin(omega0 t).
inline Polynomial demo_alpha() { return Polynomial{0.0, kOmega0 * kOmega0, 0.0, 1.0}; }

inline ReferenceSignal demo_reference() {
    return ReferenceSignal({{ReferenceTerm::constant(2.0), ReferenceTerm::sine(1.0, kOmega0)}},
                           demo_alpha());
}

inline ControllerConfig demo_controller() {
    return ControllerConfig::make({74.13}, 100.0,
                                  {FunnelFunction::exponential(10.0, 0.2, 0.1),
                                   FunnelFunction::exponential(369.76, 10.4, 0.1)});
}

inline Scenario demo_scenario(bool with_internal_model, double t_end = 5.0, double h = 1e-4) {
    Eigen::VectorXd x0(3);
    x0 << 0, 0, 5;
    std::optional<InternalModelRealization> im;
    Eigen::VectorXd z0;
    if (with_internal_model) {
        im = realize(demo_alpha(), default_beta(demo_alpha(), 3.0), 1);
        z0 = Eigen::VectorXd::Zero(3);
    }
    return Scenario{demo_plant(), std::move(im),    demo_reference(), demo_controller(),
                    x0,           std::move(z0),    t_end,            h};
}

// Multiset comparison for complex spectra.
inline bool spectra_match(std::vector<std::complex<double>> a,
                          std::vector<std::complex<double>> b, double tol) {
    if (a.size() != b.size()) return false;
    for (const auto& x : a) {
        double best = 1e300;
        std::size_t best_idx = 0;
        for (std::size_t i = 0; i < b.size(); ++i) {
            const double d = std::abs(x - b[i]);
            if (d < best) {
                best = d;
                best_idx = i;
            }
        }
        if (best > tol) return false;
        b.erase(b.begin() + static_cast<std::ptrdiff_t>(best_idx));
    }
    return true;
}

}  // namespace fimcon::testsupport
