#include <gtest/gtest.h>

#include <filesystem>

#include "curveflow/scenario.hpp"
#include "support.hpp"

using namespace curveflow;
using json = nlohmann::json;

namespace {

json base() {
    return json::parse(R"j({
        "name": "t",
        "dimension": 3,
        "curve": {"components": ["0", "cos(u)", "sin(u)"], "u0": 0, "u1": "2*pi", "topology": "closed", "samples": 32},
        "flow": {"mode": "explicit", "speeds": ["0", "1", "0"]},
        "integrator": {"dt": 0.01, "steps": 4},
        "checks": ["iff_condition"]
    })j");
}

std::string config_error(const json& doc) {
    try {
        parse_scenario(doc);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST(Scenario, ParsesMinimalDocument) {
    const auto sc = parse_scenario(base());
    EXPECT_EQ(sc.curve.dimension, 3u);
    EXPECT_DOUBLE_EQ(sc.curve.u1, 2 * std::numbers::pi);
    EXPECT_EQ(sc.curve.topology, Topology::Closed);
    EXPECT_EQ(sc.flow.mode, FlowMode::Explicit);
    EXPECT_EQ(*sc.integrator.dt, 0.01);
    EXPECT_EQ(sc.integrator.steps, 4u);
    EXPECT_EQ(sc.checks, std::vector<std::string>{"iff_condition"});
    EXPECT_TRUE(sc.output.timeseries);
    EXPECT_TRUE(sc.output.report);
    EXPECT_TRUE(sc.output.frame_steps.empty());
}

TEST(Scenario, ConstantExpressions) {
    auto doc = base();
    doc["curve"]["u0"] = "-pi/2";
    doc["curve"]["u1"] = "3*pi/2";
    doc["integrator"]["dt"] = "1/2^7";
    doc["tolerances"] = {{"psi", "10^-6"}};
    const auto sc = parse_scenario(doc);
    EXPECT_DOUBLE_EQ(sc.curve.u0, -std::numbers::pi / 2);
    EXPECT_DOUBLE_EQ(*sc.integrator.dt, 1.0 / 128);
    EXPECT_DOUBLE_EQ(sc.tolerances.psi, 1e-6);
    doc["curve"]["u0"] = "u";
    EXPECT_NE(config_error(doc).find("curve.u0"), std::string::npos);
}

TEST(Scenario, ErrorsNameTheField) {
    auto doc = base();
    doc["checks"] = {"foo"};
    EXPECT_EQ(config_error(doc), "checks[0]: unknown identity 'foo'");

    doc = base();
    doc["curve"]["colour"] = "red";
    EXPECT_EQ(config_error(doc), "curve.colour: unknown field");

    doc = base();
    doc["dimension"] = 4;
    EXPECT_NE(config_error(doc).find("dimension"), std::string::npos);

    doc = base();
    doc["flow"]["speeds"] = {"0", "1"};
    EXPECT_NE(config_error(doc).find("flow.speeds"), std::string::npos);

    doc = base();
    doc["flow"]["speeds"][1] = "sin(";
    EXPECT_NE(config_error(doc).find("flow.speeds[1]"), std::string::npos);

    doc = base();
    doc["flow"]["speeds"][1] = "u";  // curve parameter is not a flow variable
    EXPECT_NE(config_error(doc).find("flow.speeds[1]"), std::string::npos);

    doc = base();
    doc["integrator"]["dt"] = -1;
    EXPECT_NE(config_error(doc).find("integrator.dt"), std::string::npos);

    doc = base();
    doc["integrator"].erase("steps");
    EXPECT_EQ(config_error(doc), "integrator.steps: missing required field");

    doc = base();
    doc["curve"]["topology"] = "torus";
    EXPECT_NE(config_error(doc).find("curve.topology"), std::string::npos);

    doc = base();
    doc["flow"]["mode"] = "implicit";
    EXPECT_NE(config_error(doc).find("flow.mode"), std::string::npos);
}

TEST(Scenario, FrameSteps) {
    auto doc = base();
    doc["integrator"]["steps"] = 10;
    doc["integrator"]["record_every"] = 5;
    doc["output"] = {{"frame_steps", {0, 5, 10}}};
    EXPECT_EQ(parse_scenario(doc).output.frame_steps, (std::vector<std::size_t>{0, 5, 10}));
    doc["output"]["frame_steps"] = {3};
    EXPECT_NE(config_error(doc).find("record_every"), std::string::npos);
    doc["output"]["frame_steps"] = {15};
    EXPECT_NE(config_error(doc).find("beyond"), std::string::npos);
    doc["output"] = {{"formats", {"csv", "pdf"}}};
    EXPECT_NE(config_error(doc).find("output.formats[1]"), std::string::npos);
}

TEST(Scenario, DuplicateChecksCollapse) {
    auto doc = base();
    doc["checks"] = {"psi_matrix", "iff_condition", "psi_matrix"};
    EXPECT_EQ(parse_scenario(doc).checks, (std::vector<std::string>{"psi_matrix", "iff_condition"}));
}

TEST(Scenario, BundledScenariosLoad) {
    const std::filesystem::path dir = std::filesystem::path(CURVEFLOW_SOURCE_DIR) / "scenarios";
    int count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        ++count;
        const auto sc = load_scenario(entry.path().string());
        EXPECT_EQ(sc.name, entry.path().stem().string());
        EXPECT_FALSE(sc.checks.empty()) << sc.name;
    }
    EXPECT_GE(count, 7);
}

TEST(Scenario, LoadErrors) {
    EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), ConfigError);
    const auto path = std::filesystem::temp_directory_path() / "curveflow_bad_scenario.json";
    {
        std::ofstream(path) << "{ not json";
    }
    try {
        load_scenario(path.string());
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find(path.string()), std::string::npos);
    }
    std::filesystem::remove(path);
}
