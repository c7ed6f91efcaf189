// gas-collide: rates, dynamics and thermodynamic checks for a system
// scattering off a dilute gas of particles with internal levels.
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "gascollide/cli/commands.hpp"
#include "gascollide/errors.hpp"

using namespace gascollide;

int main(int argc, char** argv)
{
    CLI::App app{"Collisional thermalisation toolkit"};
    std::string command;
    std::string config_path;
    std::string out_path;
    std::string sweep;
    app.add_option("command", command, "integral | ergotropy | rates | verify")
        ->required()
        ->check(CLI::IsMember({"integral", "ergotropy", "rates", "verify"}));
    app.add_option("--config", config_path, "flat key = value config file")->required();
    app.add_option("--out", out_path, "output CSV (optional for verify)");
    app.add_option("--sweep", sweep, "repeat the run over key=a,b,c");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        app.exit(e);
        return cli::kExitInvalidConfig;
    }

    cli::RunReport report;
    try {
        cli::KeyValueConfig kv = cli::KeyValueConfig::parse_file(config_path);
        // Table paths in a config are relative to the config file.
        if (kv.has("amplitude_table")) {
            const std::filesystem::path table = kv.get("amplitude_table");
            if (table.is_relative()) {
                const auto base = std::filesystem::path(config_path).parent_path();
                kv.set("amplitude_table", (base / table).lexically_normal().string());
            }
        }
        if (sweep.empty()) {
            report = cli::run_command(command, kv, out_path);
        } else {
            const auto [key, values] = cli::parse_sweep(sweep);
            report = cli::run_sweep(command, kv, out_path, key, values);
        }
    } catch (const std::exception& e) {
        report.command = command;
        report.exit_code = cli::kExitInvalidConfig;
        report.error = e.what();
    }
    std::cout << report.to_json().dump(2) << '\n';
    if (!report.error.empty()) {
        std::cerr << "gas-collide: " << report.error << '\n';
    }
    return report.exit_code;
}
