#pragma once

#include <cstdint>

#include "fimcon/simulation.hpp"

namespace fimcon {

/// Parameters of one randomized closed-loop experiment: a random plant from
/// Sigma_{m,r}, an internal model for alpha(s) = s (s^2 + omega^2), a
/// reference of matching class, and funnels/gains constructed to satisfy
/// (K1)/(K2) by design.
struct RandomScenarioSpec {
    int m = 1;
    int r = 2;
    int q = 1;
    std::uint64_t seed = 0;
    double k_r = 200.0;
    double t_end = 4.0;
    double h = 2e-4;
};

/// Deterministic in the seed. The produced scenario always passes
/// validate_scenario; construction throws if the automatic design fails.
Scenario make_random_scenario(const RandomScenarioSpec& spec);

/// Funnels and gains for a given initial error-derivative matrix
/// (columns e(0), e'(0), ..., e^{(r-1)}(0)). Proportional exponential
/// funnels with shared time constant; gains solve (K1) with margin and the
/// boundary scales cap the initial occupancies, so (K2) holds as well.
ControllerConfig design_controller(const Eigen::MatrixXd& e_derivs0, double k_r);

}  // namespace fimcon
