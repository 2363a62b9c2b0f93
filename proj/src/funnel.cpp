#include "fimcon/funnel.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace fimcon {

namespace {

constexpr double kGainGuard = 1e-9;  // minimum admissible gain denominator
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

FunnelFunction FunnelFunction::exponential(double Lambda, double lambda, double T) {
    if (!(Lambda >= lambda && lambda > 0.0 && T > 0.0))
        throw std::invalid_argument("funnel: exponential family requires Lambda >= lambda > 0, T > 0");
    FunnelFunction f;
    f.family_ = Family::Exponential;
    f.Lambda_ = Lambda;
    f.lambda_ = lambda;
    f.T_ = T;
    return f;
}

FunnelFunction FunnelFunction::exponential_unbounded_initial(double lambda, double T) {
    if (!(lambda > 0.0 && T > 0.0))
        throw std::invalid_argument("funnel: unbounded-initial family requires lambda > 0, T > 0");
    FunnelFunction f;
    f.family_ = Family::ExpUnboundedInitial;
    f.Lambda_ = kInf;
    f.lambda_ = lambda;
    f.T_ = T;
    return f;
}

FunnelFunction FunnelFunction::custom(std::function<double(double)> phi,
                                      std::function<double(double)> phi_dot, double phi_limit_inf,
                                      double horizon) {
    if (!(phi_limit_inf > 0.0 && horizon > 0.0))
        throw std::invalid_argument("funnel: custom family requires positive asymptote and horizon");
    FunnelFunction f;
    f.family_ = Family::Custom;
    f.custom_phi_ = std::move(phi);
    f.custom_phi_dot_ = std::move(phi_dot);
    f.custom_phi_inf_ = phi_limit_inf;
    f.custom_horizon_ = horizon;
    f.lambda_ = 1.0 / phi_limit_inf;
    return f;
}

double FunnelFunction::psi(double t) const {
    switch (family_) {
        case Family::Exponential:
            return (Lambda_ - lambda_) * std::exp(-t / T_) + lambda_;
        case Family::ExpUnboundedInitial: {
            if (t <= 0.0) return kInf;
            return lambda_ / (1.0 - std::exp(-t / T_));
        }
        case Family::Custom: {
            const double p = custom_phi_(t);
            return p > 0.0 ? 1.0 / p : kInf;
        }
    }
    return kInf;
}

double FunnelFunction::phi(double t) const {
    switch (family_) {
        case Family::Exponential:
            return 1.0 / psi(t);
        case Family::ExpUnboundedInitial:
            return t <= 0.0 ? 0.0 : (1.0 - std::exp(-t / T_)) / lambda_;
        case Family::Custom:
            return custom_phi_(t);
    }
    return 0.0;
}

double FunnelFunction::phi_dot(double t) const {
    switch (family_) {
        case Family::Exponential: {
            const double b = psi(t);
            const double b_dot = -(Lambda_ - lambda_) / T_ * std::exp(-t / T_);
            return -b_dot / (b * b);
        }
        case Family::ExpUnboundedInitial:
            return std::exp(-t / T_) / (lambda_ * T_);
        case Family::Custom:
            return custom_phi_dot_(t);
    }
    return 0.0;
}

double FunnelFunction::asymptote() const { return lambda_; }

double FunnelFunction::time_scale() const {
    return family_ == Family::Custom ? custom_horizon_ : T_;
}

double sup_phidot_over_phi(const FunnelFunction& f) {
    if (f.unbounded_initial()) return kInf;  // phi_dot/phi blows up at t -> 0+
    if (f.is_exponential()) {
        // -psi_dot/psi is decreasing; the supremum sits at t = 0.
        return (f.Lambda() - f.lambda()) / (f.T() * f.Lambda());
    }
    const double t_hi = 20.0 * f.time_scale();
    const int kGrid = 100000;
    double best = 0.0;
    for (int i = 0; i <= kGrid; ++i) {
        const double t = t_hi * static_cast<double>(i) / kGrid;
        const double p = f.phi(t);
        if (p > 0.0) best = std::max(best, std::abs(f.phi_dot(t)) / p);
    }
    return best;
}

namespace {

// sup of psi_j / psi_i by coarse scan plus golden-section refinement.
double sup_boundary_ratio_numeric(const FunnelFunction& fi, const FunnelFunction& fj) {
    const double t_hi = 20.0 * std::max(fi.time_scale(), fj.time_scale());
    const auto ratio = [&](double t) {
        const double denom = fi.psi(t);
        const double numer = fj.psi(t);
        if (std::isinf(numer)) return std::isinf(denom) ? 0.0 : kInf;
        if (std::isinf(denom)) return 0.0;
        return numer / denom;
    };

    const int n_grid = fi.is_exponential() && fj.is_exponential() ? 4096 : 100000;
    double best = std::max(ratio(0.0), fj.asymptote() / fi.asymptote());
    int best_idx = 0;
    for (int i = 0; i <= n_grid; ++i) {
        const double t = t_hi * static_cast<double>(i) / n_grid;
        const double v = ratio(t);
        if (v > best) {
            best = v;
            best_idx = i;
        }
    }
    if (std::isinf(best)) return best;

    // Golden-section refinement around the best grid point.
    double a = t_hi * static_cast<double>(std::max(0, best_idx - 1)) / n_grid;
    double b = t_hi * static_cast<double>(std::min(n_grid, best_idx + 1)) / n_grid;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = ratio(x1), f2 = ratio(x2);
    while (b - a > 1e-10) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = ratio(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = ratio(x1);
        }
    }
    return std::max({best, f1, f2});
}

}  // namespace

double sup_phi_ratio(const FunnelFunction& level_i, const FunnelFunction& level_ip1) {
    if (level_ip1.unbounded_initial() && !level_i.unbounded_initial()) return kInf;
    if (level_i.is_exponential() && level_ip1.is_exponential() &&
        !level_i.unbounded_initial() && !level_ip1.unbounded_initial() &&
        std::abs(level_i.T() - level_ip1.T()) <= 1e-12 * std::max(level_i.T(), level_ip1.T())) {
        // Equal time constants: the boundary ratio is monotone in exp(-t/T),
        // so the supremum is one of the endpoint limits.
        return std::max(level_ip1.Lambda() / level_i.Lambda(),
                        level_ip1.lambda() / level_i.lambda());
    }
    return sup_boundary_ratio_numeric(level_i, level_ip1);
}

ControllerConfig ControllerConfig::make(std::vector<double> k, double k_r,
                                        std::vector<FunnelFunction> funnels) {
    if (funnels.empty()) throw std::invalid_argument("controller: need at least one funnel");
    const int r = static_cast<int>(funnels.size());
    if (static_cast<int>(k.size()) != r - 1)
        throw std::invalid_argument("controller: need exactly r-1 gains k_1..k_{r-1}");
    for (double ki : k)
        if (!(ki > 0.0)) throw std::invalid_argument("controller: gains must be positive");
    if (!(k_r > 0.0)) throw std::invalid_argument("controller: k_r must be positive");

    ControllerConfig cfg;
    cfg.r = r;
    cfg.k = std::move(k);
    cfg.k_r = k_r;
    cfg.funnels = std::move(funnels);
    cfg.cascade.reserve(static_cast<std::size_t>(r));
    Polynomial p = Polynomial::one();
    cfg.cascade.push_back(p);
    for (int i = 1; i < r; ++i) {
        p *= Polynomial{cfg.k[static_cast<std::size_t>(i - 1)], 1.0};
        cfg.cascade.push_back(p);
    }
    return cfg;
}

SupRatios sup_ratios(const ControllerConfig& cfg) {
    SupRatios out;
    for (int i = 0; i + 1 < cfg.r; ++i) {
        out.phidot_over_phi.push_back(sup_phidot_over_phi(cfg.funnels[static_cast<std::size_t>(i)]));
        out.phi_ratio.push_back(sup_phi_ratio(cfg.funnels[static_cast<std::size_t>(i)],
                                              cfg.funnels[static_cast<std::size_t>(i + 1)]));
    }
    return out;
}

K1Report check_K1(const ControllerConfig& cfg) {
    const SupRatios sups = sup_ratios(cfg);
    K1Report report;
    for (int i = 0; i + 1 < cfg.r; ++i) {
        const double margin = cfg.k[static_cast<std::size_t>(i)] -
                              (sups.phidot_over_phi[static_cast<std::size_t>(i)] +
                               sups.phi_ratio[static_cast<std::size_t>(i)]);
        report.margins.push_back(margin);
        if (!(margin > 0.0)) report.ok = false;
    }
    return report;
}

namespace {

// Markov-parameter consistency guard: y^(j) = C A^j x only holds up to
// j = r-1 when C A^k B vanishes for k < r-1.
void require_relative_degree(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                             const Eigen::MatrixXd& C, int r) {
    StateSpaceSystem sys{A, B, C};
    const auto found = strict_relative_degree(sys, sys.n());
    if (!found || *found != r)
        throw std::domain_error("initial_errors: system relative degree does not match controller");
}

Eigen::MatrixXd cascade_from_derivatives(const ControllerConfig& cfg,
                                         const Eigen::MatrixXd& e_derivs) {
    const int m = static_cast<int>(e_derivs.rows());
    Eigen::MatrixXd cascade = Eigen::MatrixXd::Zero(m, cfg.r);
    for (int i = 0; i < cfg.r; ++i) {
        const Polynomial& p = cfg.cascade[static_cast<std::size_t>(i)];
        for (int j = 0; j <= p.degree(); ++j) cascade.col(i) += p.coeff(j) * e_derivs.col(j);
    }
    return cascade;
}

Eigen::MatrixXd initial_errors_core(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C,
                                    const Eigen::VectorXd& state0, const ReferenceSignal& ref,
                                    const ControllerConfig& cfg) {
    const int m = static_cast<int>(C.rows());
    if (ref.channels() != m) throw std::domain_error("initial_errors: channel count mismatch");
    const Eigen::MatrixXd ref_derivs = ref.evaluate(0.0, cfg.r - 1);

    Eigen::MatrixXd e_derivs(m, cfg.r);
    Eigen::MatrixXd obs = C;
    for (int j = 0; j < cfg.r; ++j) {
        e_derivs.col(j) = obs * state0 - ref_derivs.col(j);
        obs = obs * A;
    }
    return cascade_from_derivatives(cfg, e_derivs);
}

}  // namespace

Eigen::MatrixXd initial_errors(const StateSpaceSystem& sys, const Eigen::VectorXd& x0,
                               const ReferenceSignal& ref, const ControllerConfig& cfg) {
    sys.validate();
    if (x0.size() != sys.n()) throw std::domain_error("initial_errors: x0 has wrong dimension");
    require_relative_degree(sys.A, sys.B, sys.C, cfg.r);
    return initial_errors_core(sys.A, sys.C, x0, ref, cfg);
}

Eigen::MatrixXd initial_errors(const Interconnection& ic, const Eigen::VectorXd& x0,
                               const Eigen::VectorXd& z0, const ReferenceSignal& ref,
                               const ControllerConfig& cfg) {
    if (x0.size() != ic.n || z0.size() != ic.m * ic.p)
        throw std::domain_error("initial_errors: state dimensions do not match interconnection");
    require_relative_degree(ic.A_ic, ic.B_ic, ic.C_ic, cfg.r);
    Eigen::VectorXd state0(ic.n + ic.m * ic.p);
    state0 << x0, z0;
    return initial_errors_core(ic.A_ic, ic.C_ic, state0, ref, cfg);
}

K2Report check_K2(const ControllerConfig& cfg, const Eigen::MatrixXd& e0) {
    if (e0.cols() != cfg.r) throw std::domain_error("check_K2: e0 must have r columns");
    K2Report report;
    for (int i = 0; i < cfg.r; ++i) {
        // phi(0) = 0 for unbounded-initial funnels: no restriction at that level.
        const double occ = cfg.funnels[static_cast<std::size_t>(i)].phi(0.0) * e0.col(i).norm();
        report.occupancy.push_back(occ);
        report.slack.push_back(1.0 - occ);
        if (!(occ < 1.0)) report.ok = false;
    }
    return report;
}

std::vector<double> epsilon_bounds(const ControllerConfig& cfg, const Eigen::MatrixXd& e0) {
    const K1Report k1 = check_K1(cfg);
    const K2Report k2 = check_K2(cfg, e0);
    if (!k1.ok || !k2.ok)
        throw std::domain_error("epsilon_bounds: conditions (K1)/(K2) must hold");

    const SupRatios sups = sup_ratios(cfg);
    std::vector<double> eps;
    for (int i = 0; i + 1 < cfg.r; ++i) {
        const double ratio_term = (sups.phidot_over_phi[static_cast<std::size_t>(i)] +
                                   sups.phi_ratio[static_cast<std::size_t>(i)]) /
                                  cfg.k[static_cast<std::size_t>(i)];
        const double value = std::max(k2.occupancy[static_cast<std::size_t>(i)], ratio_term);
        if (!(value < 1.0)) throw std::domain_error("epsilon_bounds: bound not below 1");
        eps.push_back(value);
    }
    return eps;
}

FunnelViolation::FunnelViolation(double t, int level, double error_norm, double boundary)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << "funnel violation at t = " << t << ", level " << level << ": |e_" << level
             << "| = " << error_norm << " against boundary psi_" << level << " = " << boundary;
          return os.str();
      }()),
      t_(t),
      level_(level),
      error_norm_(error_norm),
      boundary_(boundary) {}

ControlOutput control_law(const ControllerConfig& cfg, const Eigen::MatrixXd& e_derivs, double t) {
    if (e_derivs.cols() != cfg.r) throw std::domain_error("control_law: e_derivs must have r columns");

    ControlOutput out;
    out.cascade = cascade_from_derivatives(cfg, e_derivs);
    const FunnelFunction& funnel_r = cfg.funnels.back();
    const double phi_r = funnel_r.phi(t);
    const double e_r_norm = out.cascade.col(cfg.r - 1).norm();
    const double denom = 1.0 - phi_r * phi_r * e_r_norm * e_r_norm;
    if (denom <= kGainGuard) throw FunnelViolation(t, cfg.r, e_r_norm, funnel_r.psi(t));
    out.gain = cfg.k_r / denom;
    out.w = -out.gain * out.cascade.col(cfg.r - 1);
    return out;
}

Eigen::MatrixXd cascade_to_derivatives(const ControllerConfig& cfg, const Eigen::MatrixXd& cascade) {
    if (cascade.cols() != cfg.r)
        throw std::domain_error("cascade_to_derivatives: cascade must have r columns");
    const int m = static_cast<int>(cascade.rows());
    Eigen::MatrixXd e_derivs = Eigen::MatrixXd::Zero(m, cfg.r);
    for (int i = 0; i < cfg.r; ++i) {
        // e_{i+1} = sum_j p_{i+1}[j] e^(j) with monic leading term e^(i).
        const Polynomial& p = cfg.cascade[static_cast<std::size_t>(i)];
        Eigen::VectorXd value = cascade.col(i);
        for (int j = 0; j < i; ++j) value -= p.coeff(j) * e_derivs.col(j);
        e_derivs.col(i) = value;
    }
    return e_derivs;
}

}  // namespace fimcon
