#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "gascollide/cli/config.hpp"

namespace gascollide::cli {

enum ExitCode : int
{
    kExitOk = 0,
    kExitInvalidConfig = 2,
    kExitNumericFailure = 3,
    kExitCheckFailure = 4,
};

struct Check
{
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct RunReport
{
    std::string command;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::vector<std::string> outputs;
    std::vector<Check> checks;
    nlohmann::ordered_json info = nlohmann::ordered_json::object();
    double duration_s = 0.0;
    int exit_code = kExitOk;
    std::string error;
    std::vector<RunReport> runs;  // sweeps only

    bool all_pass() const;
    nlohmann::ordered_json to_json() const;
};

// `alpha,s,I` over alpha_grid x s_grid.
RunReport cmd_integral(const ScenarioConfig& cfg, const std::string& out_path);

// `t_gamma,ergotropy_over_hbar_omegaS,E_S,S,Q_dot,clausius_residual`.
RunReport cmd_ergotropy(const ScenarioConfig& cfg, const std::string& out_path);

// `i,j,rate` plus `analytic,rel_dev` for the spin model.
RunReport cmd_rates(const ScenarioConfig& cfg, const std::string& out_path);

// Micro-reversibility, detailed balance, Gibbs stationarity, Clausius.
// `out_path` may be empty; otherwise a `check,pass,value,threshold` CSV is written.
RunReport cmd_verify(const ScenarioConfig& cfg, const std::string& out_path);

/*!
 * Parses the config, dispatches, times the run and converts exceptions into
 * exit codes: invalid input 2, numeric failure 3, failed check 4.
 */
RunReport run_command(const std::string& command, const KeyValueConfig& kv, const std::string& out_path);

/*!
 * Repeats a command for each value of `key`, writing `<stem>.<key>_<value><ext>`
 * per run (runs execute concurrently) and merging the CSVs in value order into
 * out_path with a leading `key` column.
 */
RunReport run_sweep(const std::string& command, const KeyValueConfig& kv, const std::string& out_path,
                    const std::string& key, const std::vector<std::string>& values);

// Splits `key=a,b,c`.
std::pair<std::string, std::vector<std::string>> parse_sweep(const std::string& text);

}  // namespace gascollide::cli
