#include "fimcon/scenario_config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace fimcon {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& required, const std::set<std::string>& optional = {}) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!required.count(key) && !optional.count(key))
            throw ConfigError(where + ": unknown key '" + key + "'");
    }
    for (const auto& key : required)
        if (!obj.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
}

double get_number(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.at(key).is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return obj.at(key).get<double>();
}

Eigen::MatrixXd parse_matrix(const json& value, const std::string& where) {
    if (!value.is_array() || value.empty() || !value[0].is_array())
        throw ConfigError(where + ": expected a matrix as an array of rows");
    const std::size_t rows = value.size();
    const std::size_t cols = value[0].size();
    Eigen::MatrixXd M(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!value[i].is_array() || value[i].size() != cols)
            throw ConfigError(where + ": ragged matrix rows");
        for (std::size_t j = 0; j < cols; ++j) {
            if (!value[i][j].is_number()) throw ConfigError(where + ": non-numeric entry");
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value[i][j].get<double>();
        }
    }
    return M;
}

Eigen::VectorXd parse_vector(const json& value, const std::string& where) {
    if (!value.is_array()) throw ConfigError(where + ": expected an array");
    Eigen::VectorXd v(value.size());
    for (std::size_t i = 0; i < value.size(); ++i) {
        if (!value[i].is_number()) throw ConfigError(where + ": non-numeric entry");
        v(static_cast<Eigen::Index>(i)) = value[i].get<double>();
    }
    return v;
}

Polynomial parse_polynomial(const json& value, const std::string& where) {
    const Eigen::VectorXd coeffs = parse_vector(value, where);
    if (coeffs.size() == 0) throw ConfigError(where + ": empty coefficient list");
    return Polynomial(std::vector<double>(coeffs.data(), coeffs.data() + coeffs.size()));
}

ReferenceTerm parse_term(const json& term, const std::string& where) {
    if (!term.is_object() || !term.contains("kind"))
        throw ConfigError(where + ": expected a term object with a 'kind'");
    const std::string kind = term.at("kind").get<std::string>();
    if (kind == "constant") {
        require_keys(term, where, {"kind", "amplitude"});
        return ReferenceTerm::constant(get_number(term, where, "amplitude"));
    }
    if (kind == "poly") {
        require_keys(term, where, {"kind", "amplitude", "power"});
        if (!term.at("power").is_number_integer())
            throw ConfigError(where + ".power: expected an integer");
        return ReferenceTerm::poly(get_number(term, where, "amplitude"), term.at("power").get<int>());
    }
    if (kind == "sin" || kind == "cos") {
        require_keys(term, where, {"kind", "amplitude", "omega"}, {"phase"});
        const double phase = term.contains("phase") ? get_number(term, where, "phase") : 0.0;
        const double a = get_number(term, where, "amplitude");
        const double omega = get_number(term, where, "omega");
        return kind == "sin" ? ReferenceTerm::sine(a, omega, phase)
                             : ReferenceTerm::cosine(a, omega, phase);
    }
    if (kind == "exp") {
        require_keys(term, where, {"kind", "amplitude", "rate"});
        return ReferenceTerm::exponential(get_number(term, where, "amplitude"),
                                          get_number(term, where, "rate"));
    }
    throw ConfigError(where + ": unknown term kind '" + kind + "'");
}

FunnelFunction parse_funnel(const json& f, const std::string& where) {
    if (!f.is_object()) throw ConfigError(where + ": expected a funnel object");
    try {
        if (f.contains("unbounded_initial")) {
            require_keys(f, where, {"unbounded_initial", "lambda", "T"});
            if (f.at("unbounded_initial") != json(true))
                throw ConfigError(where + ".unbounded_initial: must be true when present");
            return FunnelFunction::exponential_unbounded_initial(get_number(f, where, "lambda"),
                                                                 get_number(f, where, "T"));
        }
        require_keys(f, where, {"Lambda", "lambda", "T"});
        return FunnelFunction::exponential(get_number(f, where, "Lambda"),
                                           get_number(f, where, "lambda"), get_number(f, where, "T"));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

}  // namespace

ScenarioConfig parse_config(const json& doc) {
    require_keys(doc, "config", {"plant", "reference", "controller", "sim"},
                 {"internal_model", "output"});

    const json& plant = doc.at("plant");
    require_keys(plant, "plant", {"A", "B", "C", "x0"});
    StateSpaceSystem sys{parse_matrix(plant.at("A"), "plant.A"),
                         parse_matrix(plant.at("B"), "plant.B"),
                         parse_matrix(plant.at("C"), "plant.C")};
    try {
        sys.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("plant: ") + e.what());
    }
    const Eigen::VectorXd x0 = parse_vector(plant.at("x0"), "plant.x0");
    if (x0.size() != sys.n()) throw ConfigError("plant.x0: expected n entries");

    const json& ref = doc.at("reference");
    require_keys(ref, "reference", {"alpha", "channels"});
    const Polynomial alpha = parse_polynomial(ref.at("alpha"), "reference.alpha");
    if (!alpha.is_monic()) throw ConfigError("reference.alpha: must be monic");
    if (!ref.at("channels").is_array() ||
        ref.at("channels").size() != static_cast<std::size_t>(sys.m()))
        throw ConfigError("reference.channels: expected one term list per output channel");
    std::vector<std::vector<ReferenceTerm>> channels;
    for (std::size_t i = 0; i < ref.at("channels").size(); ++i) {
        const json& ch = ref.at("channels")[i];
        if (!ch.is_array()) throw ConfigError("reference.channels: each channel is a term list");
        std::vector<ReferenceTerm> terms;
        for (std::size_t j = 0; j < ch.size(); ++j)
            terms.push_back(parse_term(ch[j], "reference.channels[" + std::to_string(i) + "][" +
                                                  std::to_string(j) + "]"));
        channels.push_back(std::move(terms));
    }
    ReferenceSignal reference(std::move(channels), alpha);

    std::optional<InternalModelRealization> im;
    Eigen::VectorXd z0;
    bool im_enabled = false;
    if (doc.contains("internal_model")) {
        const json& imc = doc.at("internal_model");
        require_keys(imc, "internal_model", {"enabled"}, {"beta", "z0"});
        im_enabled = imc.at("enabled").get<bool>();
        if (im_enabled) {
            Polynomial beta;
            if (!imc.contains("beta")) {
                beta = default_beta(alpha);
            } else {
                const json& b = imc.at("beta");
                if (!b.is_object() || !b.contains("mode"))
                    throw ConfigError("internal_model.beta: expected an object with a 'mode'");
                const std::string mode = b.at("mode").get<std::string>();
                if (mode == "default_shift") {
                    require_keys(b, "internal_model.beta", {"mode", "shift"});
                    beta = default_beta(alpha, get_number(b, "internal_model.beta", "shift"));
                } else if (mode == "explicit") {
                    require_keys(b, "internal_model.beta", {"mode", "coefficients"});
                    beta = parse_polynomial(b.at("coefficients"), "internal_model.beta.coefficients");
                } else {
                    throw ConfigError("internal_model.beta.mode: expected 'default_shift' or 'explicit'");
                }
            }
            try {
                im = realize(alpha, beta, sys.m());
            } catch (const std::exception& e) {
                throw ConfigError(std::string("internal_model: ") + e.what());
            }
            if (imc.contains("z0")) {
                z0 = parse_vector(imc.at("z0"), "internal_model.z0");
                if (z0.size() != sys.m() * im->order())
                    throw ConfigError("internal_model.z0: expected m*p entries");
            }
        }
    }

    const json& ctl = doc.at("controller");
    require_keys(ctl, "controller", {"k", "k_r", "funnels"});
    const Eigen::VectorXd k_vec = parse_vector(ctl.at("k"), "controller.k");
    if (!ctl.at("funnels").is_array() || ctl.at("funnels").empty())
        throw ConfigError("controller.funnels: expected a non-empty list");
    std::vector<FunnelFunction> funnels;
    for (std::size_t i = 0; i < ctl.at("funnels").size(); ++i)
        funnels.push_back(
            parse_funnel(ctl.at("funnels")[i], "controller.funnels[" + std::to_string(i) + "]"));
    ControllerConfig controller;
    try {
        controller = ControllerConfig::make(
            std::vector<double>(k_vec.data(), k_vec.data() + k_vec.size()),
            get_number(ctl, "controller", "k_r"), std::move(funnels));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("controller: ") + e.what());
    }

    const json& sim = doc.at("sim");
    require_keys(sim, "sim", {"t_end", "h"});
    const double t_end = get_number(sim, "sim", "t_end");
    const double h = get_number(sim, "sim", "h");
    if (!(h > 0.0)) throw ConfigError("sim.h: must be positive");
    if (t_end < h) throw ConfigError("sim.t_end: must be at least h");

    OutputSpec output;
    if (doc.contains("output")) {
        const json& out = doc.at("output");
        require_keys(out, "output", {}, {"csv_path", "svg_path", "precision"});
        if (out.contains("csv_path")) output.csv_path = out.at("csv_path").get<std::string>();
        if (out.contains("svg_path")) output.svg_path = out.at("svg_path").get<std::string>();
        if (out.contains("precision")) {
            if (!out.at("precision").is_number_integer())
                throw ConfigError("output.precision: expected an integer");
            output.precision = out.at("precision").get<int>();
            if (output.precision < 1 || output.precision > 17)
                throw ConfigError("output.precision: expected 1..17 significant digits");
        }
    }

    ScenarioConfig cfg{Scenario{std::move(sys), std::move(im), std::move(reference),
                                std::move(controller), x0, z0, t_end, h},
                       im_enabled, std::move(output)};
    return cfg;
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
}

ScenarioConfig load_config(const std::string& path) { return parse_config(read_json_file(path)); }

bool shared_sections_match(const json& a, const json& b) {
    for (const char* section : {"plant", "reference", "controller", "sim"}) {
        const bool in_a = a.contains(section);
        const bool in_b = b.contains(section);
        if (in_a != in_b) return false;
        if (in_a && a.at(section) != b.at(section)) return false;
    }
    return true;
}

}  // namespace fimcon
