#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fimcon/commands.hpp"
#include "fimcon/scenario_config.hpp"
#include "fimcon/svg_plot.hpp"
#include "fimcon/trace_io.hpp"
#include "support.hpp"

using namespace fimcon;
using nlohmann::json;
namespace ts = fimcon::testsupport;

namespace {

json demo_config_json(bool with_im, double t_end = 0.05, double h = 1e-4) {
    json doc;
    doc["plant"] = {{"A", {{0, 1, 0}, {-3, 4, 0}, {-5, 0, -1}}},
                    {"B", {{0}, {1}, {0}}},
                    {"C", {{1, 0, 0}}},
                    {"x0", {0, 0, 5}}};
    doc["reference"] = {
        {"alpha", {0.0, ts::kOmega0 * ts::kOmega0, 0.0, 1.0}},
        {"channels",
         {{{{"kind", "constant"}, {"amplitude", 2.0}},
           {{"kind", "sin"}, {"amplitude", 1.0}, {"omega", ts::kOmega0}}}}}};
    doc["internal_model"] = {{"enabled", with_im},
                             {"beta", {{"mode", "default_shift"}, {"shift", 3.0}}}};
    doc["controller"] = {{"k", {74.13}},
                         {"k_r", 100.0},
                         {"funnels",
                          {{{"Lambda", 10.0}, {"lambda", 0.2}, {"T", 0.1}},
                           {{"Lambda", 369.76}, {"lambda", 10.4}, {"T", 0.1}}}}};
    doc["sim"] = {{"t_end", t_end}, {"h", h}};
    return doc;
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path(name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("config parsing reproduces the demo scenario") {
    const auto cfg = parse_config(demo_config_json(true));
    CHECK(cfg.internal_model_enabled);
    CHECK(cfg.scenario.plant.n() == 3);
    CHECK(cfg.scenario.internal_model.has_value());
    CHECK(cfg.scenario.internal_model->beta == Polynomial{27.0, 27.0, 9.0, 1.0});
    CHECK(cfg.scenario.controller.r == 2);
    CHECK(validate_scenario(cfg.scenario).ok);

    const auto bare = parse_config(demo_config_json(false));
    CHECK_FALSE(bare.scenario.internal_model.has_value());
    CHECK(validate_scenario(bare.scenario).ok);
}

TEST_CASE("explicit beta coefficients") {
    json doc = demo_config_json(true);
    doc["internal_model"]["beta"] = {{"mode", "explicit"},
                                     {"coefficients", {27.0, 27.0, 9.0, 1.0}}};
    const auto cfg = parse_config(doc);
    CHECK(cfg.scenario.internal_model->beta == Polynomial{27.0, 27.0, 9.0, 1.0});

    doc["internal_model"]["beta"]["coefficients"] = {27.0, 27.0, 0.0, 1.0};  // not Hurwitz
    CHECK_THROWS_AS((void)parse_config(doc), ConfigError);
}

TEST_CASE("schema violations are rejected with context") {
    json doc = demo_config_json(true);
    doc["plant"]["D"] = 0;  // unknown key
    CHECK_THROWS_AS((void)parse_config(doc), ConfigError);

    doc = demo_config_json(true);
    doc.erase("plant");
    CHECK_THROWS_AS((void)parse_config(doc), ConfigError);

    doc = demo_config_json(true);
    doc["plant"]["x0"] = {0, 0};
    CHECK_THROWS_AS((void)parse_config(doc), ConfigError);

    doc = demo_config_json(true);
    doc["sim"]["t_end"] = 1e-6;  // below h
    CHECK_THROWS_AS((void)parse_config(doc), ConfigError);

    doc = demo_config_json(true);
    doc["controller"]["funnels"][0]["Lambda"] = 0.1;  // Lambda < lambda
    CHECK_THROWS_AS((void)parse_config(doc), ConfigError);

    doc = demo_config_json(true);
    doc["reference"]["channels"][0][0]["frequency"] = 2.0;  // unknown term key
    CHECK_THROWS_AS((void)parse_config(doc), ConfigError);

    doc = demo_config_json(true);
    doc["oops"] = 1;
    CHECK_THROWS_AS((void)parse_config(doc), ConfigError);
}

TEST_CASE("csv header layout") {
    CHECK(trace_csv_header(1, 2) == "t,y,y_ref,e1,psi1,e2,psi2,k,w,u");
    CHECK(trace_csv_header(2, 1) == "t,y_1,y_2,y_ref_1,y_ref_2,e1_1,e1_2,psi1,k,w_1,w_2,u_1,u_2");
}

TEST_CASE("csv round-trip is lossless at 17 significant digits") {
    const auto trace = integrate(ts::demo_scenario(true, 0.02, 1e-4));
    TempFile tmp("roundtrip_test.csv");
    write_trace_csv(tmp.path, trace, 17);

    const CsvTable table = read_trace_csv(tmp.path);
    REQUIRE(table.rows() == static_cast<std::size_t>(trace.records()));
    for (int k = 0; k < trace.records(); ++k) {
        const auto idx = static_cast<std::size_t>(k);
        CHECK(table.column("t")[idx] == trace.t[idx]);
        CHECK(table.column("y")[idx] == trace.y(0, k));
        CHECK(table.column("e1")[idx] == trace.e(0, k));
        CHECK(table.column("e2")[idx] == trace.e(1, k));
        CHECK(table.column("psi2")[idx] == trace.psi(1, k));
        CHECK(table.column("k")[idx] == trace.gain(k));
        CHECK(table.column("u")[idx] == trace.u(0, k));
    }
}

TEST_CASE("csv round-trip at reduced precision stays within that precision") {
    const auto trace = integrate(ts::demo_scenario(true, 0.02, 1e-4));
    TempFile tmp("roundtrip_p6.csv");
    write_trace_csv(tmp.path, trace, 6);
    const CsvTable table = read_trace_csv(tmp.path);
    for (int k = 0; k < trace.records(); ++k) {
        const double a = table.column("e2")[static_cast<std::size_t>(k)];
        const double b = trace.e(1, k);
        CHECK(std::abs(a - b) <= 1e-5 * std::max(1.0, std::abs(b)));
    }
}

TEST_CASE("unbounded-initial funnels and poly terms parse") {
    json doc;
    doc["plant"] = {{"A", {{0.0}}}, {"B", {{1.0}}}, {"C", {{1.0}}}, {"x0", {5.0}}};
    doc["reference"] = {{"alpha", {0.0, 0.0, 1.0}},
                        {"channels", {{{{"kind", "poly"}, {"amplitude", 0.5}, {"power", 1}}}}}};
    doc["controller"] = {{"k", json::array()},
                         {"k_r", 50.0},
                         {"funnels", {{{"unbounded_initial", true}, {"lambda", 0.5}, {"T", 0.2}}}}};
    doc["sim"] = {{"t_end", 1.0}, {"h", 1e-3}};
    const auto cfg = parse_config(doc);
    CHECK(cfg.scenario.controller.funnels[0].unbounded_initial());
    CHECK(validate_scenario(cfg.scenario).ok);
    const auto trace = integrate(cfg.scenario);
    CHECK(trace.status == TerminationStatus::Completed);
}

TEST_CASE("csv emission is deterministic") {
    const auto trace = integrate(ts::demo_scenario(false, 0.02, 1e-4));
    TempFile a("determinism_a.csv"), b("determinism_b.csv");
    write_trace_csv(a.path, trace, 17);
    write_trace_csv(b.path, trace, 17);
    std::ifstream fa(a.path), fb(b.path);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
    CHECK(sa.str().substr(0, 31) == "t,y,y_ref,e1,psi1,e2,psi2,k,w,u");
}

TEST_CASE("cmd_check reports margins and bounds") {
    std::ostringstream out;
    const int code = cmd_check(parse_config(demo_config_json(true)), out);
    CHECK(code == kExitOk);
    CHECK(out.str().find("[PASS] (K1) gain inequalities") != std::string::npos);
    CHECK(out.str().find("12.33") != std::string::npos);
    CHECK(out.str().find("epsilon: 0.83367") != std::string::npos);

    json bad = demo_config_json(true);
    bad["controller"]["k"] = {50.0};  // below the (K1) threshold 61.8
    std::ostringstream out2;
    CHECK(cmd_check(parse_config(bad), out2) == kExitValidationFailure);
    CHECK(out2.str().find("[FAIL] (K1)") != std::string::npos);

    json bad_alpha = demo_config_json(true);
    bad_alpha["reference"]["alpha"] = {1.0, 1.0};  // root at -1 collides with the plant zero
    bad_alpha["reference"]["channels"] = {{{{"kind", "exp"}, {"amplitude", 2.0}, {"rate", -1.0}}}};
    bad_alpha["controller"]["funnels"] = {{{"Lambda", 10.0}, {"lambda", 0.2}, {"T", 0.1}}};
    bad_alpha["controller"]["k"] = json::array();
    std::ostringstream out3;
    CHECK(cmd_check(parse_config(bad_alpha), out3) == kExitValidationFailure);
    CHECK(out3.str().find("[FAIL] alpha condition") != std::string::npos);
}

TEST_CASE("cmd_run writes the artifacts and the metrics summary") {
    json doc = demo_config_json(false, 0.05, 1e-4);
    doc["output"] = {{"csv_path", "cmd_run_test.csv"}, {"svg_path", "cmd_run_test.svg"}};
    TempFile csv("cmd_run_test.csv"), svg("cmd_run_test.svg");

    std::ostringstream out;
    const int code = cmd_run(parse_config(doc), out);
    CHECK(code == kExitOk);

    const CsvTable table = read_trace_csv(csv.path);
    CHECK(table.rows() == 501);
    // Without an internal model, w and u are the same signal.
    for (std::size_t k = 0; k < table.rows(); ++k)
        CHECK(table.column("w")[k] == table.column("u")[k]);

    std::ifstream svg_in(svg.path);
    std::string first_line;
    std::getline(svg_in, first_line);
    CHECK(first_line.rfind("<svg", 0) == 0);
}

TEST_CASE("cmd_run is byte-deterministic across invocations") {
    json doc = demo_config_json(true, 0.02, 1e-4);
    doc["output"] = {{"csv_path", "determinism_run.csv"}};
    TempFile csv("determinism_run.csv");

    auto run_once = [&] {
        std::ostringstream out;
        REQUIRE(cmd_run(parse_config(doc), out) == kExitOk);
        std::ifstream in(csv.path);
        std::stringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    const std::string first = run_once();
    const std::string second = run_once();
    CHECK(first == second);
    CHECK(!first.empty());
}

TEST_CASE("compare: identical scenarios give ratio one") {
    json doc = demo_config_json(true, 0.05, 1e-4);
    std::ostringstream out;
    const int code = cmd_compare(parse_config(doc), parse_config(doc), out);
    CHECK(code == kExitOk);
    CHECK(out.str().find("tail error ratio (second/first):      1\n") != std::string::npos);
}

TEST_CASE("compare: a violating run marks the comparison partial") {
    json doc = demo_config_json(false, 5.0, 2e-3);
    doc["controller"]["k_r"] = 0.01;
    json doc_with = doc;
    doc_with["internal_model"]["enabled"] = true;
    std::ostringstream out;
    const int code = cmd_compare(parse_config(doc_with), parse_config(doc), out);
    CHECK(code == kExitFunnelViolation);
    CHECK(out.str().find("PARTIAL") != std::string::npos);
}

TEST_CASE("shared-section comparison for compare's precondition") {
    const json a = demo_config_json(true);
    json b = demo_config_json(false);
    CHECK(shared_sections_match(a, b));  // only internal_model differs
    b["controller"]["k_r"] = 99.0;
    CHECK_FALSE(shared_sections_match(a, b));
}

TEST_CASE("cmd_sweep prints one line per value") {
    json doc = demo_config_json(true, 0.2, 1e-3);
    std::ostringstream out;
    const int code = cmd_sweep(parse_config(doc), {50.0, 100.0}, out);
    CHECK(code == kExitOk);
    CHECK(out.str().find("50") != std::string::npos);
    CHECK(out.str().find("100") != std::string::npos);
    CHECK(out.str().find("completed") != std::string::npos);
}
