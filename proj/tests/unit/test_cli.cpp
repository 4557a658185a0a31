#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "commands.hpp"
#include "config.hpp"
#include "splitann/error.hpp"

using namespace splitann;
using namespace splitann::cli;

namespace {

RunConfig parse(const std::string& text) { return parse_config(YAML::Load(text)); }

ErrorCode parse_error(const std::string& text) {
    try {
        parse(text);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InvalidArgument;
}

int run_tool(const std::string& args) {
    const std::string cmd = std::string(SPLITANN_TOOL) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config_path(const std::string& name) { return std::string(SPLITANN_CONFIG_DIR) + "/" + name; }

}  // namespace

TEST(Config, DefaultsAndTolerances) {
    const RunConfig c = parse("grid: {level: 2}\ntolerances: {chasles: 1.0e-7}\nseed: 5\n");
    EXPECT_EQ(c.grid.level, 2);
    EXPECT_EQ(c.seed, 5u);
    EXPECT_DOUBLE_EQ(c.tolerance("chasles", 1.0), 1e-7);
    EXPECT_DOUBLE_EQ(c.tolerance("cocycles", 3.0), 3.0);
}

TEST(Config, RejectsBadInput) {
    EXPECT_EQ(parse_error("gird: {level: 2}\n"), ErrorCode::ConfigError);
    EXPECT_EQ(parse_error("tolerances: {chasles: -1}\n"), ErrorCode::ConfigError);
    EXPECT_EQ(parse_error("tolerances: {nonsense: 1}\n"), ErrorCode::ConfigError);
    EXPECT_EQ(parse_error("grid: {level: 9}\n"), ErrorCode::ConfigError);
    EXPECT_TRUE(is_config_error(parse_error("metrics:\n  - {reference: flat, chart: angular}\n")));
    EXPECT_EQ(parse_error("curve: {family: psl3, phi: {kind: identity}}\n"), ErrorCode::ConfigError);
}

TEST(Config, ParsesMetricsAndCurves) {
    const RunConfig c = parse(
        "metrics:\n"
        "  - {reference: desitter, chart: angular, factor: {kind: uniformizing, map: {kind: sine, amplitude: 0.3, "
        "frequency: 2}}}\n"
        "curve: {family: po22, phi: {kind: four_piece}}\n");
    ASSERT_EQ(c.metrics.size(), 1u);
    EXPECT_TRUE(c.metrics[0].uniformizing.has_value());
    ASSERT_TRUE(c.curve.has_value());
    EXPECT_EQ(c.curve->family, CurveFamily::PO22);
}

TEST(Commands, VerifyIsDeterministic) {
    const RunConfig c = load_config(config_path("verify.yaml"));
    const CommandResult a = cmd_verify(c);
    const CommandResult b = cmd_verify(c);
    EXPECT_EQ(dump(a.report), dump(b.report));
    EXPECT_EQ(a.report["schema_version"], 1);
}

TEST(Commands, CurveReportShape) {
    const CommandResult r = cmd_curve(load_config(config_path("curve_sine.yaml")));
    for (const char* key : {"family", "action", "error_estimate", "sclass", "refinement_trail"}) {
        EXPECT_TRUE(r.report.contains(key)) << key;
    }
    EXPECT_EQ(r.exit_code, 0);
}

TEST(Tool, ExitCodes) {
    EXPECT_EQ(run_tool("action --config " + config_path("action_flat_bump.yaml")), 0);
    EXPECT_EQ(run_tool("curve --config " + config_path("curve_mobius.yaml")), 0);
    EXPECT_EQ(run_tool("curve --config " + config_path("curve_four_piece.yaml")), 4);
    EXPECT_EQ(run_tool("curve --config " + config_path("curve_not_c1.yaml")), 2);
    EXPECT_EQ(run_tool("action --config /nonexistent.yaml"), 2);
    EXPECT_EQ(run_tool(""), 2);
}

TEST(Tool, EpsteinCsvHeader) {
    const std::string csv = ::testing::TempDir() + "/eps.csv";
    ASSERT_EQ(run_tool("epstein --config " + config_path("epstein_bump.yaml") + " --out " + csv), 0);
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "s,t,x1,x2,x3,x4,n1,n2,n3,n4");
    EXPECT_TRUE(std::ifstream(csv + ".json").good());
}
