#include <CLI11.hpp>
#include <yaml-cpp/yaml.h>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "commands.hpp"
#include "config.hpp"
#include "splitann/error.hpp"

namespace {

using namespace splitann;
using namespace splitann::cli;

int write_report(const CommandResult& r, const std::string& out) {
    const std::string text = dump(r.report);
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream os(out);
        if (!os) {
            std::cerr << "error: cannot write report '" << out << "'\n";
            return kExitConfig;
        }
        os << text;
    }
    return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Liouville action, Epstein surfaces and crossratio metrics on the split annulus", "splitann"};
    app.require_subcommand(1);

    std::string config_path, out;
    std::optional<int> grid_level;
    std::optional<std::uint64_t> seed;
    double tolerance_scale = 1.0;
    app.add_option("--config", config_path, "YAML config file");
    app.add_option("--grid-level", grid_level, "Grid refinement level (32·2^level cells per axis)")
        ->check(CLI::Range(0, 8));
    app.add_option("--seed", seed, "Seed for randomized suites");
    app.add_option("--out", out, "Output path (report, or CSV for epstein)");
    app.add_option("--tolerance-scale", tolerance_scale, "Multiplier applied to every tolerance")
        ->check(CLI::PositiveNumber);

    auto* action = app.add_subcommand("action", "Liouville action between two metrics")->fallthrough();
    auto* verify = app.add_subcommand("verify", "Run the identity suite")->fallthrough();
    auto* epstein = app.add_subcommand("epstein", "Sample the Epstein surface to CSV with a JSON sidecar")->fallthrough();
    auto* curve = app.add_subcommand("curve", "Liouville action of a positive curve")->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (grid_level) cfg.grid.level = *grid_level;
        if (seed) cfg.seed = *seed;
        cfg.tolerance_scale = tolerance_scale;

        if (*action) return write_report(cmd_action(cfg), out);
        if (*verify) return write_report(cmd_verify(cfg), out);
        if (*curve) {
            const CommandResult r = cmd_curve(cfg);
            if (r.exit_code == kExitSClassFail) {
                std::cerr << "SClassFail: failing clause " << r.report["sclass"]["failing_clause"].get<std::string>()
                          << "\n";
            }
            return write_report(r, out);
        }
        if (*epstein) {
            const std::string csv = out.empty() ? "epstein.csv" : out;
            const CommandResult r = cmd_epstein(cfg, csv);
            std::ofstream os(csv + ".json");
            if (!os) {
                std::cerr << "error: cannot write sidecar '" << csv << ".json'\n";
                return kExitConfig;
            }
            os << dump(r.report);
            return r.exit_code;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (e.code() == ErrorCode::SClassFail) return kExitSClassFail;
        return is_config_error(e.code()) ? kExitConfig : kExitNumerical;
    } catch (const YAML::Exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
