#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fimcon/funnel.hpp"
#include "fimcon/internal_model.hpp"
#include "fimcon/reference.hpp"
#include "fimcon/state_space.hpp"

namespace fimcon {

/// A complete closed-loop experiment: plant, optional internal model
/// (absent means u = w), reference, controller, initial states, horizon and
/// step size.
struct Scenario {
    StateSpaceSystem plant;
    std::optional<InternalModelRealization> internal_model;
    ReferenceSignal reference;
    ControllerConfig controller;
    Eigen::VectorXd x0;
    Eigen::VectorXd z0;  // internal model state; empty means zeros
    double t_end = 5.0;
    double h = 1e-4;
};

/// One itemized validation check, e.g. "(K1)" with its margins.
struct ValidationItem {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    bool ok = true;
    std::vector<ValidationItem> items;
    std::vector<double> epsilon;  // Lemma-style bounds for levels 1..r-1 (when computable)
    Eigen::MatrixXd e0;           // initial error cascade (when computable)
};

/// Runs every precondition of a closed-loop run: plant classification,
/// reference membership, the root condition on alpha versus the plant's
/// invariant zeros, internal-model consistency, (K1), (K2), the funnel
/// bounds, and dimension checks. Never throws on failed conditions; they
/// are itemized in the report.
ValidationReport validate_scenario(const Scenario& scn);

enum class TerminationStatus { Completed, FunnelViolation };

struct TrackingMetrics {
    std::vector<double> max_occupancy;  // per level: max_t phi_i |e_i|
    double tail_error = 0.0;            // sup |e| over the final fraction of the horizon
    double max_gain = 0.0;
    double mean_gain = 0.0;
    double max_control = 0.0;  // max_t |u(t)|
    bool partial = false;      // metrics from a truncated trace
    bool converged = false;    // tail_error below the requested threshold
    double convergence_threshold = 0.0;
};

/// Time-indexed record of a closed-loop run. Column k of every matrix
/// corresponds to time t[k]; e and the derivative blocks stack the r levels
/// as consecutive m-row blocks.
struct SimulationTrace {
    int m = 0, r = 0;
    std::vector<double> t;
    Eigen::MatrixXd y;             // m x N
    Eigen::MatrixXd y_ref;         // m x N
    Eigen::MatrixXd y_derivs;      // (m r) x N, block j = y^(j)
    Eigen::MatrixXd y_ref_derivs;  // (m r) x N
    Eigen::MatrixXd e;             // (m r) x N, block i-1 = e_i
    Eigen::MatrixXd psi;           // r x N
    Eigen::VectorXd gain;          // N
    Eigen::MatrixXd w;             // m x N
    Eigen::MatrixXd u;             // m x N
    Eigen::MatrixXd x;             // n x N
    Eigen::MatrixXd z;             // (m p) x N, zero rows without internal model

    TerminationStatus status = TerminationStatus::Completed;
    double violation_time = 0.0;
    int violation_level = 0;
    double violation_error_norm = 0.0;
    double violation_boundary = 0.0;

    TrackingMetrics metrics;

    int records() const { return static_cast<int>(t.size()); }
    Eigen::MatrixXd error_level(int i) const { return e.middleRows((i - 1) * m, m); }
};

/// Precomputed closed loop: combined state s = (x; z) with
/// s' = A_cl s + B_cl w and the observation rows C_cl A_cl^j used for the
/// algebraic output derivatives.
class ClosedLoop {
public:
    explicit ClosedLoop(const Scenario& scn);

    struct Evaluation {
        Eigen::VectorXd state_dot;
        Eigen::MatrixXd e_derivs;      // m x r
        Eigen::MatrixXd cascade;       // m x r
        Eigen::MatrixXd ref_derivs;    // m x r
        double gain = 0.0;
        Eigen::VectorXd w;
        Eigen::VectorXd u;
    };

    /// Closed-loop vector field at (t, s); checks every funnel level and
    /// throws FunnelViolation outside the admissible set.
    Evaluation rhs(double t, const Eigen::VectorXd& state) const;

    Eigen::VectorXd initial_state() const;
    int state_dim() const { return static_cast<int>(A_cl_.rows()); }
    int plant_dim() const { return n_; }
    bool with_internal_model() const { return has_im_; }

private:
    const Scenario& scn_;
    bool has_im_ = false;
    int n_ = 0, m_ = 0, r_ = 0;
    Eigen::MatrixXd A_cl_, B_cl_;
    Eigen::MatrixXd C_tilde_;               // m x (mp), zero-sized without IM
    std::vector<Eigen::MatrixXd> obs_;      // C_cl A_cl^j for j = 0..r-1
};

/// Classical fixed-step fourth-order Runge-Kutta integration of the closed
/// loop. Every stage evaluation is funnel-guarded; a violation truncates
/// the trace and sets the termination status. Throws std::domain_error if
/// validate_scenario fails.
SimulationTrace integrate(const Scenario& scn);

/// Metrics over an existing trace; tail window is the final tail_fraction
/// of the horizon. Truncated traces yield partial metrics.
TrackingMetrics tracking_metrics(const SimulationTrace& trace, double convergence_threshold = 1e-2,
                                 double tail_fraction = 0.1);

struct KrSweepEntry {
    double k_r = 0.0;
    bool ok = false;            // run executed (possibly with funnel violation)
    std::string error;          // non-empty when the run failed to execute
    TerminationStatus status = TerminationStatus::Completed;
    TrackingMetrics metrics;
};

/// Reruns the scenario for each k_r value; per-run failures are collected,
/// not fatal to the sweep.
std::vector<KrSweepEntry> kr_sweep(const Scenario& scn, const std::vector<double>& kr_values);

}  // namespace fimcon
