#pragma once

#include <nlohmann/json.hpp>

#include <string>

#include "config.hpp"

namespace splitann::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int {
    kExitOk = 0,
    kExitVerifyFailed = 1,
    kExitConfig = 2,
    kExitNumerical = 3,
    kExitSClassFail = 4,
};

struct CommandResult {
    Json report;
    int exit_code = kExitOk;
};

CommandResult cmd_action(const RunConfig& cfg);
CommandResult cmd_verify(const RunConfig& cfg);
// Writes the mesh CSV to csv_path; the report is the JSON sidecar.
CommandResult cmd_epstein(const RunConfig& cfg, const std::string& csv_path);
CommandResult cmd_curve(const RunConfig& cfg);

// Serialized report with a trailing newline.
std::string dump(const Json& report);

}  // namespace splitann::cli
