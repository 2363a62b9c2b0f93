#include "fimcon/monte_carlo.hpp"

#include <cmath>
#include <random>

namespace fimcon {

namespace {

constexpr double kTimeConstant = 0.3;
constexpr double kAsymptoteFraction = 0.05;  // lambda = fraction * Lambda
constexpr double kBoundaryRatio = 4.0;       // sigma_{i+1} / sigma_i
constexpr double kGainMargin = 1.0;
constexpr double kOccupancyCap = 0.5;        // phi_i(0)|e_i(0)| stays below this

}  // namespace

ControllerConfig design_controller(const Eigen::MatrixXd& e_derivs0, double k_r) {
    const int r = static_cast<int>(e_derivs0.cols());

    // Same shape at every level: psi_i = sigma_i ((1-c) e^{-t/T} + c), so
    // |phi_dot/phi| = (1-c)/T at every level and |phi_i/phi_{i+1}| is the
    // scale ratio sigma_{i+1}/sigma_i = kBoundaryRatio. Gains then satisfy
    // (K1) with a fixed margin, independently of the error magnitudes.
    const double base = (1.0 - kAsymptoteFraction) / kTimeConstant;
    const std::vector<double> gains(static_cast<std::size_t>(r) - 1,
                                    base + kBoundaryRatio + kGainMargin);

    // The cascade at t = 0 is now fixed, so a single first-level scale
    // bounds every initial occupancy by kOccupancyCap.
    Polynomial cascade = Polynomial::one();
    double sigma_1 = 1.0;
    for (int i = 0; i < r; ++i) {
        Eigen::VectorXd level = Eigen::VectorXd::Zero(e_derivs0.rows());
        for (int j = 0; j <= cascade.degree(); ++j) level += cascade.coeff(j) * e_derivs0.col(j);
        sigma_1 = std::max(sigma_1, level.norm() / (kOccupancyCap * std::pow(kBoundaryRatio, i)));
        if (i + 1 < r) cascade *= Polynomial{gains[static_cast<std::size_t>(i)], 1.0};
    }

    std::vector<FunnelFunction> funnels;
    for (int i = 0; i < r; ++i) {
        const double sigma = sigma_1 * std::pow(kBoundaryRatio, i);
        funnels.push_back(
            FunnelFunction::exponential(sigma, kAsymptoteFraction * sigma, kTimeConstant));
    }
    return ControllerConfig::make(gains, k_r, std::move(funnels));
}

Scenario make_random_scenario(const RandomScenarioSpec& spec) {
    const StateSpaceSystem plant =
        random_sigma_mr(spec.m, spec.r, spec.q, spec.seed, /*random_basis=*/true);

    std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> omega_dist(2.0, 8.0);
    std::uniform_real_distribution<double> offset_dist(-1.0, 1.0);
    std::uniform_real_distribution<double> amp_dist(0.2, 0.8);
    std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> x0_dist(-0.3, 0.3);

    const double omega = omega_dist(rng);
    const Polynomial alpha{0.0, omega * omega, 0.0, 1.0};  // s (s^2 + omega^2)

    std::vector<std::vector<ReferenceTerm>> channels;
    for (int i = 0; i < spec.m; ++i) {
        channels.push_back({ReferenceTerm::constant(offset_dist(rng)),
                            ReferenceTerm::sine(amp_dist(rng), omega, phase_dist(rng))});
    }
    ReferenceSignal reference(std::move(channels), alpha);

    const InternalModelRealization im = realize(alpha, default_beta(alpha), spec.m);
    const Interconnection ic = interconnect(plant, im);

    Eigen::VectorXd x0(plant.n());
    for (int i = 0; i < plant.n(); ++i) x0(i) = x0_dist(rng);
    const Eigen::VectorXd z0 = Eigen::VectorXd::Zero(spec.m * im.order());

    // Initial error derivatives from the interconnection state; the
    // controller design only needs these columns.
    Eigen::VectorXd state0(ic.n + ic.m * ic.p);
    state0 << x0, z0;
    const Eigen::MatrixXd ref_derivs = reference.evaluate(0.0, spec.r - 1);
    Eigen::MatrixXd e_derivs0(spec.m, spec.r);
    Eigen::MatrixXd obs = ic.C_ic;
    for (int j = 0; j < spec.r; ++j) {
        e_derivs0.col(j) = obs * state0 - ref_derivs.col(j);
        obs = obs * ic.A_ic;
    }

    Scenario scn{plant,      im,       std::move(reference), design_controller(e_derivs0, spec.k_r),
                 x0,         z0,       spec.t_end,           spec.h};
    const ValidationReport report = validate_scenario(scn);
    if (!report.ok) throw std::runtime_error("make_random_scenario: automatic design failed validation");
    return scn;
}

}  // namespace fimcon
