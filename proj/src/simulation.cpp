#include "fimcon/simulation.hpp"

#include <cmath>
#include <sstream>

namespace fimcon {

namespace {

constexpr double kGainGuard = 1e-9;

std::string format_vector(const std::vector<double>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    return os.str();
}

}  // namespace

ValidationReport validate_scenario(const Scenario& scn) {
    ValidationReport report;
    auto add = [&](const std::string& name, bool passed, const std::string& detail) {
        report.items.push_back({name, passed, detail});
        if (!passed) report.ok = false;
    };

    try {
        scn.plant.validate();
    } catch (const std::exception& e) {
        add("plant dimensions", false, e.what());
        return report;
    }
    if (!(scn.h > 0.0) || scn.t_end < scn.h) {
        add("time grid", false, "require h > 0 and t_end >= h");
        return report;
    }
    add("time grid", true, "");

    const auto cls = classify(scn.plant);
    {
        std::ostringstream os;
        if (cls.relative_degree) os << "relative degree " << *cls.relative_degree;
        else os << "no strict relative degree";
        os << ", " << (cls.minimum_phase ? "minimum phase" : "not minimum phase");
        os << ", gain " << (cls.gamma_positive_definite ? "positive definite" : "not positive definite");
        for (const auto& d : cls.diagnostics) os << "; " << d;
        add("plant class membership", cls.in_sigma_mr, os.str());
    }
    if (!cls.relative_degree) return report;
    const int r = *cls.relative_degree;
    add("controller matches relative degree", scn.controller.r == r,
        "controller r = " + std::to_string(scn.controller.r) + ", plant r = " + std::to_string(r));

    if (scn.reference.channels() != scn.plant.m()) {
        add("reference channels", false, "reference channel count differs from plant m");
        return report;
    }
    add("reference membership in R(alpha)", verify_membership(scn.reference),
        "alpha = " + scn.reference.alpha().to_string());

    if (scn.x0.size() != scn.plant.n()) {
        add("initial state dimension", false, "x0 must have n entries");
        return report;
    }

    Eigen::VectorXd z0 = scn.z0;
    std::optional<Interconnection> ic;
    if (scn.internal_model) {
        const auto& im = *scn.internal_model;
        bool im_ok = im.m == scn.plant.m();
        add("internal model channels", im_ok, "");
        add("internal model matches reference alpha", im.alpha == scn.reference.alpha(),
            "internal model alpha = " + im.alpha.to_string());
        add("alpha condition against invariant zeros",
            check_alpha_condition(scn.plant, im.alpha), "");
        if (z0.size() == 0) z0 = Eigen::VectorXd::Zero(im.m * im.order());
        if (z0.size() != im.m * im.order()) {
            add("internal model state dimension", false, "z0 must have m*p entries");
            return report;
        }
        if (!im_ok || !cls.in_sigma_mr) return report;
        try {
            ic = interconnect(scn.plant, im);
        } catch (const std::exception& e) {
            add("interconnection", false, e.what());
            return report;
        }
    }

    if (scn.controller.r != r) return report;

    try {
        report.e0 = ic ? initial_errors(*ic, scn.x0, z0, scn.reference, scn.controller)
                       : initial_errors(scn.plant, scn.x0, scn.reference, scn.controller);
    } catch (const std::exception& e) {
        add("initial errors", false, e.what());
        return report;
    }

    const K1Report k1 = check_K1(scn.controller);
    add("(K1) gain inequalities", k1.ok, "margins: " + format_vector(k1.margins));
    const K2Report k2 = check_K2(scn.controller, report.e0);
    add("(K2) initial funnel containment", k2.ok,
        "occupancies: " + format_vector(k2.occupancy));
    if (k1.ok && k2.ok) {
        report.epsilon = epsilon_bounds(scn.controller, report.e0);
        add("funnel bounds below one", true, "epsilon: " + format_vector(report.epsilon));
    }
    return report;
}

ClosedLoop::ClosedLoop(const Scenario& scn) : scn_(scn) {
    has_im_ = scn.internal_model.has_value();
    n_ = scn.plant.n();
    m_ = scn.plant.m();
    r_ = scn.controller.r;

    if (has_im_) {
        const auto& im = *scn.internal_model;
        const int nz = im.m * im.order();
        A_cl_ = Eigen::MatrixXd::Zero(n_ + nz, n_ + nz);
        A_cl_.topLeftCorner(n_, n_) = scn.plant.A;
        A_cl_.topRightCorner(n_, nz) = scn.plant.B * im.C_tilde;
        A_cl_.bottomRightCorner(nz, nz) = im.A_tilde;
        B_cl_ = Eigen::MatrixXd::Zero(n_ + nz, m_);
        B_cl_.topRows(n_) = scn.plant.B;
        B_cl_.bottomRows(nz) = im.B_tilde;
        C_tilde_ = im.C_tilde;
    } else {
        A_cl_ = scn.plant.A;
        B_cl_ = scn.plant.B;
        C_tilde_ = Eigen::MatrixXd::Zero(m_, 0);
    }

    Eigen::MatrixXd C_cl = Eigen::MatrixXd::Zero(m_, A_cl_.rows());
    C_cl.leftCols(n_) = scn.plant.C;
    obs_.reserve(static_cast<std::size_t>(r_));
    Eigen::MatrixXd row = C_cl;
    for (int j = 0; j < r_; ++j) {
        obs_.push_back(row);
        row = row * A_cl_;
    }
}

Eigen::VectorXd ClosedLoop::initial_state() const {
    Eigen::VectorXd s(state_dim());
    s.head(n_) = scn_.x0;
    if (has_im_) {
        const int nz = state_dim() - n_;
        if (scn_.z0.size() == nz) s.tail(nz) = scn_.z0;
        else s.tail(nz).setZero();
    }
    return s;
}

ClosedLoop::Evaluation ClosedLoop::rhs(double t, const Eigen::VectorXd& state) const {
    Evaluation ev;
    ev.ref_derivs = scn_.reference.evaluate(t, r_ - 1);
    ev.e_derivs.resize(m_, r_);
    for (int j = 0; j < r_; ++j)
        ev.e_derivs.col(j) = obs_[static_cast<std::size_t>(j)] * state - ev.ref_derivs.col(j);

    // control_law guards level r; the lower levels are part of the vector
    // field's domain and are guarded here.
    const ControlOutput ctl = control_law(scn_.controller, ev.e_derivs, t);
    for (int i = 0; i + 1 < r_; ++i) {
        const FunnelFunction& f = scn_.controller.funnels[static_cast<std::size_t>(i)];
        const double occ = f.phi(t) * ctl.cascade.col(i).norm();
        if (1.0 - occ * occ <= kGainGuard)
            throw FunnelViolation(t, i + 1, ctl.cascade.col(i).norm(), f.psi(t));
    }

    ev.cascade = ctl.cascade;
    ev.gain = ctl.gain;
    ev.w = ctl.w;
    ev.u = has_im_ ? (C_tilde_ * state.tail(state_dim() - n_) + ctl.w).eval() : ctl.w;
    ev.state_dot = A_cl_ * state + B_cl_ * ctl.w;
    return ev;
}

namespace {

void log_record(SimulationTrace& trace, int k, double t, const Eigen::VectorXd& state,
                const ClosedLoop::Evaluation& ev, const Scenario& scn, int n) {
    const int m = trace.m;
    const int r = trace.r;
    trace.t[static_cast<std::size_t>(k)] = t;
    for (int j = 0; j < r; ++j) {
        trace.y_derivs.block(j * m, k, m, 1) = ev.e_derivs.col(j) + ev.ref_derivs.col(j);
        trace.y_ref_derivs.block(j * m, k, m, 1) = ev.ref_derivs.col(j);
        trace.e.block(j * m, k, m, 1) = ev.cascade.col(j);
    }
    trace.y.col(k) = trace.y_derivs.block(0, k, m, 1);
    trace.y_ref.col(k) = ev.ref_derivs.col(0);
    for (int i = 0; i < r; ++i)
        trace.psi(i, k) = scn.controller.funnels[static_cast<std::size_t>(i)].psi(t);
    trace.gain(k) = ev.gain;
    trace.w.col(k) = ev.w;
    trace.u.col(k) = ev.u;
    trace.x.col(k) = state.head(n);
    if (trace.z.rows() > 0) trace.z.col(k) = state.tail(trace.z.rows());
}

void truncate_trace(SimulationTrace& trace, int records) {
    trace.t.resize(static_cast<std::size_t>(records));
    trace.y.conservativeResize(Eigen::NoChange, records);
    trace.y_ref.conservativeResize(Eigen::NoChange, records);
    trace.y_derivs.conservativeResize(Eigen::NoChange, records);
    trace.y_ref_derivs.conservativeResize(Eigen::NoChange, records);
    trace.e.conservativeResize(Eigen::NoChange, records);
    trace.psi.conservativeResize(Eigen::NoChange, records);
    trace.gain.conservativeResize(records);
    trace.w.conservativeResize(Eigen::NoChange, records);
    trace.u.conservativeResize(Eigen::NoChange, records);
    trace.x.conservativeResize(Eigen::NoChange, records);
    trace.z.conservativeResize(Eigen::NoChange, records);
}

}  // namespace

SimulationTrace integrate(const Scenario& scn) {
    const ValidationReport validation = validate_scenario(scn);
    if (!validation.ok) {
        std::ostringstream os;
        os << "integrate: scenario validation failed:";
        for (const auto& item : validation.items)
            if (!item.passed) os << " [" << item.name << "] " << item.detail;
        throw std::domain_error(os.str());
    }

    const ClosedLoop loop(scn);
    const int steps = static_cast<int>(std::floor(scn.t_end / scn.h + 1e-9));
    const int n_records = steps + 1;
    const int m = scn.plant.m();
    const int r = scn.controller.r;
    const int n = scn.plant.n();
    const int nz = loop.state_dim() - n;

    SimulationTrace trace;
    trace.m = m;
    trace.r = r;
    trace.t.resize(static_cast<std::size_t>(n_records));
    trace.y.resize(m, n_records);
    trace.y_ref.resize(m, n_records);
    trace.y_derivs.resize(m * r, n_records);
    trace.y_ref_derivs.resize(m * r, n_records);
    trace.e.resize(m * r, n_records);
    trace.psi.resize(r, n_records);
    trace.gain.resize(n_records);
    trace.w.resize(m, n_records);
    trace.u.resize(m, n_records);
    trace.x.resize(n, n_records);
    trace.z.resize(nz, n_records);

    Eigen::VectorXd state = loop.initial_state();
    const double h = scn.h;
    int logged = 0;
    try {
        for (int k = 0; k < steps; ++k) {
            const double t = k * h;
            const auto s1 = loop.rhs(t, state);
            log_record(trace, k, t, state, s1, scn, n);
            logged = k + 1;
            const auto s2 = loop.rhs(t + 0.5 * h, state + 0.5 * h * s1.state_dot);
            const auto s3 = loop.rhs(t + 0.5 * h, state + 0.5 * h * s2.state_dot);
            const auto s4 = loop.rhs(t + h, state + h * s3.state_dot);
            state += (h / 6.0) *
                     (s1.state_dot + 2.0 * s2.state_dot + 2.0 * s3.state_dot + s4.state_dot);
        }
        const double t_final = steps * h;
        const auto sf = loop.rhs(t_final, state);
        log_record(trace, steps, t_final, state, sf, scn, n);
        logged = n_records;
        trace.status = TerminationStatus::Completed;
    } catch (const FunnelViolation& v) {
        truncate_trace(trace, logged);
        trace.status = TerminationStatus::FunnelViolation;
        trace.violation_time = v.t();
        trace.violation_level = v.level();
        trace.violation_error_norm = v.error_norm();
        trace.violation_boundary = v.boundary();
    }

    trace.metrics = tracking_metrics(trace);
    return trace;
}

TrackingMetrics tracking_metrics(const SimulationTrace& trace, double convergence_threshold,
                                 double tail_fraction) {
    TrackingMetrics metrics;
    metrics.partial = trace.status != TerminationStatus::Completed;
    metrics.convergence_threshold = convergence_threshold;
    const int n_rec = trace.records();
    if (n_rec == 0) return metrics;

    metrics.max_occupancy.assign(static_cast<std::size_t>(trace.r), 0.0);
    for (int k = 0; k < n_rec; ++k) {
        for (int i = 0; i < trace.r; ++i) {
            const double norm = trace.e.block(i * trace.m, k, trace.m, 1).norm();
            const double occ = norm / trace.psi(i, k);
            metrics.max_occupancy[static_cast<std::size_t>(i)] =
                std::max(metrics.max_occupancy[static_cast<std::size_t>(i)], occ);
        }
        metrics.max_control = std::max(metrics.max_control, trace.u.col(k).norm());
    }
    metrics.max_gain = trace.gain.maxCoeff();
    metrics.mean_gain = trace.gain.mean();

    const double t_end = trace.t.back();
    const double t_tail = t_end * (1.0 - tail_fraction);
    double tail = 0.0;
    for (int k = 0; k < n_rec; ++k) {
        if (trace.t[static_cast<std::size_t>(k)] < t_tail) continue;
        tail = std::max(tail, trace.e.block(0, k, trace.m, 1).norm());
    }
    metrics.tail_error = tail;
    metrics.converged = !metrics.partial && tail <= convergence_threshold;
    return metrics;
}

std::vector<KrSweepEntry> kr_sweep(const Scenario& scn, const std::vector<double>& kr_values) {
    std::vector<KrSweepEntry> entries;
    entries.reserve(kr_values.size());
    for (double kr : kr_values) {
        KrSweepEntry entry;
        entry.k_r = kr;
        try {
            Scenario variant = scn;
            variant.controller = ControllerConfig::make(scn.controller.k, kr, scn.controller.funnels);
            const SimulationTrace trace = integrate(variant);
            entry.ok = true;
            entry.status = trace.status;
            entry.metrics = trace.metrics;
        } catch (const std::exception& e) {
            entry.ok = false;
            entry.error = e.what();
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

}  // namespace fimcon
