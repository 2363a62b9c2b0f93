#include "fimcon/commands.hpp"

#include <cmath>
#include <iomanip>
#include <limits>

#include "fimcon/monte_carlo.hpp"
#include "fimcon/svg_plot.hpp"
#include "fimcon/trace_io.hpp"

namespace fimcon {

namespace {

void print_validation(const ValidationReport& report, std::ostream& out) {
    for (const auto& item : report.items) {
        out << "  [" << (item.passed ? "PASS" : "FAIL") << "] " << item.name;
        if (!item.detail.empty()) out << ": " << item.detail;
        out << "\n";
    }
}

void print_metrics(const TrackingMetrics& m, std::ostream& out) {
    out << "  tail error:        " << m.tail_error << "\n";
    out << "  max occupancy:    ";
    for (std::size_t i = 0; i < m.max_occupancy.size(); ++i)
        out << " phi_" << i + 1 << "|e_" << i + 1 << "| <= " << m.max_occupancy[i];
    out << "\n";
    out << "  gain:              max " << m.max_gain << ", mean " << m.mean_gain << "\n";
    out << "  max |u|:           " << m.max_control << "\n";
}

double tail_peak_to_peak(const SimulationTrace& trace, const Eigen::VectorXd& signal) {
    const double t_tail = trace.t.back() * 0.9;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int k = 0; k < trace.records(); ++k) {
        if (trace.t[static_cast<std::size_t>(k)] < t_tail) continue;
        lo = std::min(lo, signal(k));
        hi = std::max(hi, signal(k));
    }
    return hi - lo;
}

}  // namespace

int cmd_check(const ScenarioConfig& cfg, std::ostream& out) {
    const ValidationReport report = validate_scenario(cfg.scenario);
    out << "validation report (" << (cfg.internal_model_enabled ? "with" : "without")
        << " internal model):\n";
    print_validation(report, out);
    out << (report.ok ? "all conditions satisfied\n" : "validation failed\n");
    return report.ok ? kExitOk : kExitValidationFailure;
}

int cmd_run(const ScenarioConfig& cfg, std::ostream& out) {
    const ValidationReport report = validate_scenario(cfg.scenario);
    print_validation(report, out);
    if (!report.ok) {
        out << "validation failed; not integrating\n";
        return kExitValidationFailure;
    }
    if (cfg.output.csv_path.empty()) {
        out << "error: output.csv_path is required for run\n";
        return kExitConfigError;
    }

    const SimulationTrace trace = integrate(cfg.scenario);
    write_trace_csv(cfg.output.csv_path, trace, cfg.output.precision);
    out << "wrote " << cfg.output.csv_path << " (" << trace.records() << " records)\n";
    if (!cfg.output.svg_path.empty()) {
        write_trace_svg(cfg.output.svg_path, trace);
        out << "wrote " << cfg.output.svg_path << "\n";
    }

    print_metrics(trace.metrics, out);
    if (trace.status == TerminationStatus::FunnelViolation) {
        out << "funnel violation at t = " << trace.violation_time << " (level "
            << trace.violation_level << ", |e| = " << trace.violation_error_norm
            << ", boundary = " << trace.violation_boundary << "); trace truncated\n";
        return kExitFunnelViolation;
    }
    out << "completed\n";
    return kExitOk;
}

int cmd_compare(const ScenarioConfig& cfg_with, const ScenarioConfig& cfg_without,
                std::ostream& out) {
    const ValidationReport rep_a = validate_scenario(cfg_with.scenario);
    const ValidationReport rep_b = validate_scenario(cfg_without.scenario);
    if (!rep_a.ok || !rep_b.ok) {
        out << "first scenario:\n";
        print_validation(rep_a, out);
        out << "second scenario:\n";
        print_validation(rep_b, out);
        return kExitValidationFailure;
    }

    const SimulationTrace trace_a = integrate(cfg_with.scenario);
    const SimulationTrace trace_b = integrate(cfg_without.scenario);
    const bool partial = trace_a.status != TerminationStatus::Completed ||
                         trace_b.status != TerminationStatus::Completed;

    out << "first  (" << (cfg_with.internal_model_enabled ? "with" : "without")
        << " internal model):\n";
    print_metrics(trace_a.metrics, out);
    out << "second (" << (cfg_without.internal_model_enabled ? "with" : "without")
        << " internal model):\n";
    print_metrics(trace_b.metrics, out);

    if (partial) {
        out << "comparison: PARTIAL (at least one run left its funnel)\n";
        return kExitFunnelViolation;
    }

    const double ratio = trace_b.metrics.tail_error /
                         std::max(trace_a.metrics.tail_error, 1e-300);
    const double gain_osc_a = tail_peak_to_peak(trace_a, trace_a.gain);
    const double gain_osc_b = tail_peak_to_peak(trace_b, trace_b.gain);
    Eigen::VectorXd w_a(trace_a.records()), w_b(trace_b.records());
    for (int k = 0; k < trace_a.records(); ++k) w_a(k) = trace_a.w.col(k).norm();
    for (int k = 0; k < trace_b.records(); ++k) w_b(k) = trace_b.w.col(k).norm();
    const double w_osc_a = tail_peak_to_peak(trace_a, w_a);
    const double w_osc_b = tail_peak_to_peak(trace_b, w_b);

    out << "tail error ratio (second/first):      " << ratio << "\n";
    out << "tail gain oscillation (peak-to-peak): " << gain_osc_a << " vs " << gain_osc_b << "\n";
    out << "tail |w| oscillation (peak-to-peak):  " << w_osc_a << " vs " << w_osc_b << "\n";

    const bool verdict = trace_a.metrics.tail_error < trace_b.metrics.tail_error &&
                         gain_osc_a < gain_osc_b && w_osc_a < w_osc_b;
    out << "verdict: first scenario tracks "
        << (verdict ? "more accurately with less oscillation in k and w"
                    : "without a uniform improvement over the second")
        << "\n";
    return kExitOk;
}

int cmd_sweep(const ScenarioConfig& cfg, const std::vector<double>& kr_values, std::ostream& out) {
    if (kr_values.empty()) {
        out << "empty sweep\n";
        return kExitOk;
    }
    const auto entries = kr_sweep(cfg.scenario, kr_values);
    out << std::left << std::setw(12) << "k_r" << std::setw(14) << "status" << std::setw(16)
        << "tail_error" << std::setw(14) << "max_gain" << "\n";
    for (const auto& entry : entries) {
        out << std::left << std::setw(12) << entry.k_r;
        if (!entry.ok) {
            out << "error: " << entry.error << "\n";
            continue;
        }
        out << std::setw(14)
            << (entry.status == TerminationStatus::Completed ? "completed" : "violation")
            << std::setw(16) << entry.metrics.tail_error << std::setw(14)
            << entry.metrics.max_gain << "\n";
    }
    return kExitOk;
}

int cmd_mc(int count, std::uint64_t seed, double k_r, std::ostream& out) {
    int completed = 0;
    int within_bounds = 0;
    int converged = 0;
    for (int i = 0; i < count; ++i) {
        RandomScenarioSpec spec;
        spec.m = 1 + static_cast<int>(i % 2);
        spec.r = 1 + static_cast<int>((i / 2) % 3);
        spec.q = std::vector<int>{0, 1, 3}[static_cast<std::size_t>((i / 6) % 3)];
        spec.seed = seed + static_cast<std::uint64_t>(i);
        spec.k_r = k_r;
        try {
            const Scenario scn = make_random_scenario(spec);
            const ValidationReport report = validate_scenario(scn);
            const SimulationTrace trace = integrate(scn);
            if (trace.status != TerminationStatus::Completed) {
                out << "  seed " << spec.seed << ": funnel violation at t = "
                    << trace.violation_time << "\n";
                continue;
            }
            ++completed;
            bool bounds_ok = true;
            for (std::size_t l = 0; l + 1 < static_cast<std::size_t>(scn.controller.r); ++l)
                bounds_ok &= trace.metrics.max_occupancy[l] <= report.epsilon[l] + 1e-6;
            if (bounds_ok) ++within_bounds;
            if (trace.metrics.tail_error < 1e-2) ++converged;
        } catch (const std::exception& e) {
            out << "  seed " << spec.seed << ": " << e.what() << "\n";
        }
    }
    out << "completed " << completed << "/" << count << ", funnel bounds held in " << within_bounds
        << ", tail error < 1e-2 in " << converged << "\n";
    return completed == count && within_bounds == count ? kExitOk : kExitValidationFailure;
}

}  // namespace fimcon
