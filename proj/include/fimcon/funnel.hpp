#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "fimcon/internal_model.hpp"
#include "fimcon/polynomial.hpp"
#include "fimcon/reference.hpp"
#include "fimcon/state_space.hpp"

namespace fimcon {

/// Performance-funnel boundary psi = 1/phi. The exponential family is
/// psi(t) = (Lambda - lambda) exp(-t/T) + lambda; the unbounded-initial
/// variant has psi(0) = +inf (phi(0) = 0), which lifts the restriction on
/// the initial error. Custom funnels supply phi and its derivative plus
/// declared asymptotics. Construction enforces membership of the class Phi.
class FunnelFunction {
public:
    static FunnelFunction exponential(double Lambda, double lambda, double T);
    static FunnelFunction exponential_unbounded_initial(double lambda, double T);
    static FunnelFunction custom(std::function<double(double)> phi,
                                 std::function<double(double)> phi_dot, double phi_limit_inf,
                                 double horizon);

    double psi(double t) const;  // boundary; +inf at t = 0 for unbounded-initial funnels
    double phi(double t) const;
    double phi_dot(double t) const;

    bool unbounded_initial() const { return family_ == Family::ExpUnboundedInitial; }
    bool is_exponential() const { return family_ != Family::Custom; }
    /// Asymptotic boundary value lim_{t->inf} psi(t).
    double asymptote() const;
    /// Time constant (exponential families) or declared horizon (custom).
    double time_scale() const;

    double Lambda() const { return Lambda_; }
    double lambda() const { return lambda_; }
    double T() const { return T_; }

private:
    enum class Family { Exponential, ExpUnboundedInitial, Custom };
    FunnelFunction() = default;
    Family family_ = Family::Exponential;
    double Lambda_ = 0.0, lambda_ = 0.0, T_ = 0.0;
    std::function<double(double)> custom_phi_, custom_phi_dot_;
    double custom_phi_inf_ = 0.0, custom_horizon_ = 0.0;
};

/// sup_{t>=0} |phi_dot/phi|; analytic for exponential funnels, +inf for
/// unbounded-initial ones, grid-based for custom ones.
double sup_phidot_over_phi(const FunnelFunction& f);

/// sup_{t>=0} phi_i/phi_{i+1} = sup psi_{i+1}/psi_i; analytic for equal-T
/// exponential pairs, otherwise golden-section refined and combined with
/// the t -> inf limit.
double sup_phi_ratio(const FunnelFunction& level_i, const FunnelFunction& level_ip1);

/// Funnel controller configuration: constant gains k_1..k_{r-1}, the gain
/// parameter k_r, and one funnel per cascade level. The cascade polynomials
/// p_1 = 1, p_i = (s+k_1)...(s+k_{i-1}) are derived and cached.
struct ControllerConfig {
    int r = 0;
    std::vector<double> k;  // k_1..k_{r-1}
    double k_r = 0.0;
    std::vector<FunnelFunction> funnels;  // phi_1..phi_r
    std::vector<Polynomial> cascade;      // p_1..p_r

    /// Validates positivity and sizes, derives the cascade polynomials.
    static ControllerConfig make(std::vector<double> k, double k_r,
                                 std::vector<FunnelFunction> funnels);
};

struct SupRatios {
    std::vector<double> phidot_over_phi;  // per level i = 1..r-1
    std::vector<double> phi_ratio;        // per level i = 1..r-1
};
SupRatios sup_ratios(const ControllerConfig& cfg);

struct K1Report {
    bool ok = true;
    std::vector<double> margins;  // k_i - (|phi_dot_i/phi_i| + |phi_i/phi_{i+1}|)
};
K1Report check_K1(const ControllerConfig& cfg);

/// Initial error cascade e_i(0), i = 1..r, as an m x r matrix (column i-1
/// holds e_i(0)). The output derivatives are taken algebraically from the
/// state, y^(j)(0) = C A^j x0, which is valid because C A^k B = 0 for
/// k < r-1. Throws std::domain_error if the system's Markov parameters are
/// inconsistent with cfg.r.
Eigen::MatrixXd initial_errors(const StateSpaceSystem& sys, const Eigen::VectorXd& x0,
                               const ReferenceSignal& ref, const ControllerConfig& cfg);
Eigen::MatrixXd initial_errors(const Interconnection& ic, const Eigen::VectorXd& x0,
                               const Eigen::VectorXd& z0, const ReferenceSignal& ref,
                               const ControllerConfig& cfg);

struct K2Report {
    bool ok = true;
    std::vector<double> occupancy;  // phi_i(0) |e_i(0)| per level (0 when phi_i(0) = 0)
    std::vector<double> slack;      // 1 - occupancy
};
K2Report check_K2(const ControllerConfig& cfg, const Eigen::MatrixXd& e0);

/// The funnel bounds epsilon_i < 1 guaranteed for levels i = 1..r-1:
/// epsilon_i = max{ phi_i(0)|e_i(0)|, (|phi_dot_i/phi_i| + |phi_i/phi_{i+1}|)/k_i }.
/// Throws std::domain_error when (K1) or (K2) fails.
std::vector<double> epsilon_bounds(const ControllerConfig& cfg, const Eigen::MatrixXd& e0);

/// Raised when the closed loop leaves the performance funnel numerically
/// (the controller is undefined on or outside the boundary).
class FunnelViolation : public std::runtime_error {
public:
    FunnelViolation(double t, int level, double error_norm, double boundary);
    double t() const { return t_; }
    int level() const { return level_; }
    double error_norm() const { return error_norm_; }
    double boundary() const { return boundary_; }

private:
    double t_;
    int level_;
    double error_norm_;
    double boundary_;
};

struct ControlOutput {
    Eigen::MatrixXd cascade;  // m x r, column i-1 = e_i
    double gain = 0.0;        // k = k_r / (1 - phi_r^2 |e_r|^2) >= k_r
    Eigen::VectorXd w;        // -gain * e_r
};

/// The funnel control law. e_derivs is the m x r matrix of the tracking
/// error and its derivatives (e, e', ..., e^(r-1)) at time t. Throws
/// FunnelViolation when 1 - phi_r^2 |e_r|^2 <= 1e-9.
ControlOutput control_law(const ControllerConfig& cfg, const Eigen::MatrixXd& e_derivs, double t);

/// Inverse of the cascade map: recovers (e, e', ..., e^(r-1)) from
/// (e_1, ..., e_r) by forward substitution on the monic triangular system.
Eigen::MatrixXd cascade_to_derivatives(const ControllerConfig& cfg, const Eigen::MatrixXd& cascade);

}  // namespace fimcon
