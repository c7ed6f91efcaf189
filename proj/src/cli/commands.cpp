#include "gascollide/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>

#include "gascollide/cli/csv.hpp"
#include "gascollide/dynamics.hpp"
#include "gascollide/errors.hpp"
#include "gascollide/rates.hpp"
#include "gascollide/scattering.hpp"
#include "gascollide/spin_model.hpp"
#include "gascollide/thermo.hpp"

namespace gascollide::cli {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Level structure, gas and amplitudes for `model = table`, in raw units.
struct TableSetup
{
    LevelSystem levels;
    GasEnvironment env;
    AmplitudeModel model;
};

TableSetup make_table_setup(const ScenarioConfig& cfg)
{
    LevelSystem levels(cfg.system_energies);
    GasEnvironment env;
    env.ancilla_energies = cfg.ancilla_energies;
    env.T_A = cfg.T_A;
    env.T_M = cfg.T_M;
    env.density = cfg.density;
    env.validate();
    AmplitudeModel model =
        AmplitudeModel::tabulated(AmplitudeTable::read_csv_file(cfg.amplitude_table), env, levels);
    return {levels, env, std::move(model)};
}

// Initial state; `energies` are the level energies in the units the Gibbs temperature is given in.
DensityMatrix initial_state(const InitialState& init, const Eigen::VectorXd& energies)
{
    const auto d = energies.size();
    switch (init.kind) {
    case InitialState::Kind::ground: {
        Eigen::VectorXd p = Eigen::VectorXd::Zero(d);
        p(0) = 1.0;
        return DensityMatrix::from_populations(p);
    }
    case InitialState::Kind::gibbs:
        return gibbs_state(Operator(energies.cast<Complex>().asDiagonal()), 1.0 / init.temperature);
    case InitialState::Kind::custom:
        return DensityMatrix::from_populations(
            Eigen::Map<const Eigen::VectorXd>(init.populations.data(), d).cwiseMax(0.0));
    case InitialState::Kind::mixed: {
        Eigen::VectorXd p = Eigen::VectorXd::Constant(d, init.eps / static_cast<double>(d));
        p(0) += 1.0 - init.eps;
        return DensityMatrix::from_populations(p);
    }
    }
    throw InvalidArgument("unknown initial state");
}

Eigen::VectorXd spin_m_values(SpinQuantum j)
{
    Eigen::VectorXd m(j.dim());
    for (int a = 0; a < j.dim(); ++a) {
        m(a) = -j.value() + a;
    }
    return m;
}

nlohmann::ordered_json config_echo(const KeyValueConfig& kv)
{
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [k, v] : kv.entries()) {
        j[k] = v;
    }
    return j;
}

void set_exit_from_checks(RunReport& rep)
{
    if (rep.exit_code == kExitOk && !rep.all_pass()) {
        rep.exit_code = kExitCheckFailure;
    }
}

// Runs one verify sub-check, turning numeric failures into a failed check.
template<class F>
void guarded_check(RunReport& rep, const std::string& name, bool& numeric_failure, F&& body)
{
    try {
        rep.checks.push_back(body());
    } catch (const NumericFailure& e) {
        numeric_failure = true;
        rep.checks.push_back({name, false, kNaN, kNaN, std::string("numeric failure: ") + e.what()});
    }
}

std::string run_path(const std::string& out, const std::string& key, const std::string& value)
{
    const std::filesystem::path p(out);
    std::string stem = p.stem().string();
    std::string tag = key + "_" + value;
    std::replace_if(tag.begin(), tag.end(), [](char c) { return c == '/' || c == ':' || c == ','; }, '-');
    return (p.parent_path() / (stem + "." + tag + p.extension().string())).string();
}

}  // namespace

//---------------------------------------------------------------------------//
bool RunReport::all_pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; }) &&
           std::all_of(runs.begin(), runs.end(), [](const RunReport& r) { return r.all_pass(); });
}

nlohmann::ordered_json RunReport::to_json() const
{
    auto number = [](double v) -> nlohmann::ordered_json {
        if (std::isfinite(v)) {
            return v;
        }
        return CsvWriter::format(v);
    };
    nlohmann::ordered_json j;
    j["command"] = command;
    j["config"] = config;
    j["outputs"] = outputs;
    j["checks"] = nlohmann::ordered_json::array();
    for (const Check& c : checks) {
        j["checks"].push_back({{"name", c.name},
                               {"pass", c.pass},
                               {"value", number(c.value)},
                               {"threshold", number(c.threshold)},
                               {"detail", c.detail}});
    }
    j["all_pass"] = all_pass();
    j["info"] = info;
    if (!runs.empty()) {
        j["runs"] = nlohmann::ordered_json::array();
        for (const RunReport& r : runs) {
            j["runs"].push_back(r.to_json());
        }
    }
    j["duration_s"] = duration_s;
    j["exit_code"] = exit_code;
    if (!error.empty()) {
        j["error"] = error;
    }
    return j;
}

//---------------------------------------------------------------------------//
RunReport cmd_integral(const ScenarioConfig& cfg, const std::string& out_path)
{
    if (cfg.alpha_grid.empty() || cfg.s_grid.empty()) {
        throw InvalidArgument("integral: alpha_grid and s_grid must be non-empty");
    }
    RunReport rep;
    rep.command = "integral";
    CsvWriter csv(out_path, {"alpha", "s", "I"});
    for (double a : cfg.alpha_grid) {
        for (double s : cfg.s_grid) {
            csv.row({a, s, integral_I(a, s)});
        }
    }
    csv.close();
    rep.outputs.push_back(out_path);
    rep.info["rows"] = cfg.alpha_grid.size() * cfg.s_grid.size();
    return rep;
}

RunReport cmd_ergotropy(const ScenarioConfig& cfg, const std::string& out_path)
{
    RunReport rep;
    rep.command = "ergotropy";
    const std::vector<double> grid = uniform_grid(cfg.t_max, cfg.n_samples);

    Trajectory<DensityMatrix> traj;
    std::vector<ThermoSample> samples;
    ClausiusReport clausius;
    if (cfg.model == "spin") {
        const SpinModel m = build_spin_model(cfg.spin);
        const LindbladGenerator gen = m.generator();
        const Operator h = m.energy_operator();
        const double beta = m.beta_eff();
        traj = evolve_lindblad(gen, initial_state(cfg.initial, spin_m_values(cfg.spin.J)), grid, cfg.ode);
        samples = annotate(traj, gen, h, beta);
        clausius = entropy_production_check(traj, gen, h, beta);
        rep.info["gamma_plus_over_gamma_tilde"] = m.rates.gamma_plus / m.scales.gamma_tilde;
        rep.info["gamma_minus_over_gamma_tilde"] = m.rates.gamma_minus / m.scales.gamma_tilde;
        rep.info["T_eff_infinite"] = m.T_eff.infinite;
        rep.info["beta_eff_hbar_omegaS"] = beta;
        rep.info["units"] = "time 1/gamma_tilde, energy hbar omega_S";
    } else {
        const TableSetup s = make_table_setup(cfg);
        const RateMatrix R = rate_matrix(s.levels, s.model, s.env, cfg.quad);
        const LindbladGenerator gen = classical_generator(R, s.levels);
        const Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(cfg.system_energies.data(),
                                                                    static_cast<Eigen::Index>(cfg.system_energies.size()));
        const DensityMatrix rho0 = initial_state(cfg.initial, e);
        OdeOptions ode = population_ode_options();
        const auto pops = evolve_populations(R, PopulationVector(rho0.populations()), grid, ode);
        traj.times = pops.times;
        for (const PopulationVector& p : pops.states) {
            traj.states.push_back(DensityMatrix::from_populations(p.values().cwiseMax(0.0) / p.values().cwiseMax(0.0).sum()));
        }
        const double beta = s.env.beta_motion();
        samples = annotate(traj, gen, s.levels.hamiltonian(), beta);
        clausius = entropy_production_check(traj, gen, s.levels.hamiltonian(), beta);
        rep.info["units"] = "raw (model = table)";
        rep.info["table_extrapolations"] = s.model.extrapolations();
    }

    CsvWriter csv(out_path, {"t_gamma", "ergotropy_over_hbar_omegaS", "E_S", "S", "Q_dot", "clausius_residual"});
    double max_w = 0.0;
    for (const ThermoSample& s : samples) {
        csv.row({s.t, s.ergotropy, s.E_S, s.S, s.Q_dot, s.clausius_residual});
        max_w = std::max(max_w, s.ergotropy);
    }
    csv.close();
    rep.outputs.push_back(out_path);
    rep.info["final_ergotropy"] = samples.back().ergotropy;
    rep.info["max_ergotropy"] = max_w;
    rep.checks.push_back({"clausius", clausius.pass, clausius.min_residual,
                          -1e-8 * std::max(clausius.max_abs_entropy_rate, 1.0), clausius.note});
    return rep;
}

RunReport cmd_rates(const ScenarioConfig& cfg, const std::string& out_path)
{
    RunReport rep;
    rep.command = "rates";
    if (cfg.model == "spin") {
        const SpinModel m = build_spin_model(cfg.spin);
        const double g = m.scales.gamma_tilde;
        const RateMatrix R = rate_matrix(m.levels, m.amplitude_model(), m.env, cfg.quad);
        const RateMatrix Ra = spin_rate_matrix(cfg.spin.J, m.rates);
        CsvWriter csv(out_path, {"i", "j", "rate", "analytic", "rel_dev"});
        double worst = 0.0;
        for (int i = 0; i < R.dim(); ++i) {
            for (int j = 0; j < R.dim(); ++j) {
                const double r = R(i, j) / g;
                const double a = Ra(i, j) / g;
                double dev = 0.0;
                if (a > 0.0) {
                    dev = std::abs(r - a) / a;
                } else if (r != 0.0) {
                    dev = std::numeric_limits<double>::infinity();
                }
                worst = std::max(worst, dev);
                csv.row({static_cast<long long>(i), static_cast<long long>(j), r, a, dev});
            }
        }
        csv.close();
        rep.outputs.push_back(out_path);
        rep.info["units"] = "gamma_tilde";
        rep.info["gamma_plus_over_gamma_tilde"] = m.rates.gamma_plus / g;
        rep.info["gamma_minus_over_gamma_tilde"] = m.rates.gamma_minus / g;
        rep.checks.push_back({"rates_vs_analytic", worst <= 1e-4, worst, 1e-4, "max relative deviation"});
    } else {
        const TableSetup s = make_table_setup(cfg);
        const RateMatrix R = rate_matrix(s.levels, s.model, s.env, cfg.quad);
        CsvWriter csv(out_path, {"i", "j", "rate"});
        for (int i = 0; i < R.dim(); ++i) {
            for (int j = 0; j < R.dim(); ++j) {
                csv.row({static_cast<long long>(i), static_cast<long long>(j), R(i, j)});
            }
        }
        csv.close();
        rep.outputs.push_back(out_path);
        rep.info["units"] = "raw (model = table)";
        rep.info["table_extrapolations"] = s.model.extrapolations();
    }
    return rep;
}

RunReport cmd_verify(const ScenarioConfig& cfg, const std::string& out_path)
{
    RunReport rep;
    rep.command = "verify";
    bool numeric_failure = false;
    const double ldb_tol = cfg.ldb_tol > 0.0 ? cfg.ldb_tol : 10.0 * cfg.quad.rel_tol;
    const std::vector<double> grid = uniform_grid(cfg.t_max, cfg.n_samples);

    if (cfg.model == "spin") {
        const SpinModel m = build_spin_model(cfg.spin);
        const AmplitudeModel amp = m.amplitude_model();
        // Reference inverse temperature in raw units and in units of 1/(hbar omega_S).
        const double beta = cfg.ldb_reference == LdbReference::motional ? m.env.beta_motion()
                                                                       : m.T_eff.beta();
        const double beta_s = beta * m.omega_S;
        rep.info["ldb_reference"] = cfg.ldb_reference == LdbReference::motional ? "motional" : "effective";
        rep.info["beta_hbar_omegaS"] = beta_s;

        guarded_check(rep, "microreversibility", numeric_failure, [&] {
            const auto r = check_microreversibility(amp, cfg.micro_samples, cfg.micro_tol);
            std::ostringstream os;
            os << r.samples_checked << " samples";
            return Check{"microreversibility", r.pass, r.max_violation, cfg.micro_tol, os.str()};
        });
        guarded_check(rep, "local_detailed_balance", numeric_failure, [&] {
            const RateMatrix R = rate_matrix(m.levels, amp, m.env, cfg.quad);
            const auto r = check_local_detailed_balance(R, m.levels, beta, ldb_tol);
            return Check{"local_detailed_balance", r.pass, r.max_log_violation, ldb_tol, r.message};
        });
        const LindbladGenerator gen = m.generator();
        guarded_check(rep, "gibbs_stationarity", numeric_failure, [&] {
            const DensityMatrix gamma = gibbs_state(m.energy_operator(), beta_s);
            const double n = gen.dissipative(gamma.matrix()).norm();
            return Check{"gibbs_stationarity", n <= cfg.gibbs_tol, n, cfg.gibbs_tol, "||C gamma||_F in units of gamma_tilde"};
        });
        guarded_check(rep, "clausius", numeric_failure, [&] {
            const auto traj =
                evolve_lindblad(gen, initial_state(cfg.initial, spin_m_values(cfg.spin.J)), grid, cfg.ode);
            const auto r = entropy_production_check(traj, gen, m.energy_operator(), beta_s);
            return Check{"clausius", r.pass, r.min_residual, -1e-8 * std::max(r.max_abs_entropy_rate, 1.0), r.note};
        });
    } else {
        if (cfg.ldb_reference == LdbReference::effective) {
            throw InvalidArgument("verify: ldb_reference = effective is only defined for the spin model");
        }
        const TableSetup s = make_table_setup(cfg);
        const double beta = s.env.beta_motion();
        rep.info["ldb_reference"] = "motional";
        guarded_check(rep, "microreversibility", numeric_failure, [&] {
            const auto r = check_microreversibility(s.model, cfg.micro_samples, cfg.micro_tol);
            std::ostringstream os;
            os << r.samples_checked << " samples, " << r.extrapolations << " extrapolated lookups";
            if (!r.pass) {
                os << ", worst channel (" << r.worst.i << "," << r.worst.j << "," << r.worst.k << "," << r.worst.l
                   << ") at |p| = " << r.worst_p_mag;
            }
            return Check{"microreversibility", r.pass, r.max_violation, cfg.micro_tol, os.str()};
        });
        std::optional<RateMatrix> R;
        guarded_check(rep, "local_detailed_balance", numeric_failure, [&] {
            R = rate_matrix(s.levels, s.model, s.env, cfg.quad);
            const auto r = check_local_detailed_balance(*R, s.levels, beta, ldb_tol);
            return Check{"local_detailed_balance", r.pass, r.max_log_violation, ldb_tol, r.message};
        });
        if (R) {
            const LindbladGenerator gen = classical_generator(*R, s.levels);
            const double scale = std::max(R->matrix().maxCoeff(), std::numeric_limits<double>::min());
            guarded_check(rep, "gibbs_stationarity", numeric_failure, [&] {
                const DensityMatrix gamma = gibbs_state(s.levels.hamiltonian(), beta);
                const double n = gen.dissipative(gamma.matrix()).norm() / scale;
                return Check{"gibbs_stationarity", n <= cfg.gibbs_tol, n, cfg.gibbs_tol, "||C gamma||_F relative to the largest rate"};
            });
            guarded_check(rep, "clausius", numeric_failure, [&] {
                const Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(
                    cfg.system_energies.data(), static_cast<Eigen::Index>(cfg.system_energies.size()));
                const auto traj = evolve_lindblad(gen, initial_state(cfg.initial, e), grid, cfg.ode);
                const auto r = entropy_production_check(traj, gen, s.levels.hamiltonian(), beta);
                return Check{"clausius", r.pass, r.min_residual, -1e-8 * std::max(r.max_abs_entropy_rate, 1.0),
                             r.note};
            });
        }
    }

    if (!out_path.empty()) {
        CsvWriter csv(out_path, {"check", "pass", "value", "threshold"});
        for (const Check& c : rep.checks) {
            csv.row({c.name, static_cast<long long>(c.pass), c.value, c.threshold});
        }
        csv.close();
        rep.outputs.push_back(out_path);
    }
    if (numeric_failure) {
        rep.exit_code = kExitNumericFailure;
    }
    return rep;
}

//---------------------------------------------------------------------------//
RunReport run_command(const std::string& command, const KeyValueConfig& kv, const std::string& out_path)
{
    const auto t0 = std::chrono::steady_clock::now();
    RunReport rep;
    try {
        const ScenarioConfig cfg = ScenarioConfig::from(kv);
        if (command != "verify" && out_path.empty()) {
            throw InvalidArgument(command + ": --out is required");
        }
        if (command == "integral") {
            rep = cmd_integral(cfg, out_path);
        } else if (command == "ergotropy") {
            rep = cmd_ergotropy(cfg, out_path);
        } else if (command == "rates") {
            rep = cmd_rates(cfg, out_path);
        } else if (command == "verify") {
            rep = cmd_verify(cfg, out_path);
        } else {
            throw InvalidArgument("unknown command '" + command + "'");
        }
        set_exit_from_checks(rep);
    } catch (const NumericFailure& e) {
        rep.exit_code = kExitNumericFailure;
        rep.error = e.what();
    } catch (const std::invalid_argument& e) {
        rep.exit_code = kExitInvalidConfig;
        rep.error = e.what();
    } catch (const std::domain_error& e) {
        rep.exit_code = kExitInvalidConfig;
        rep.error = e.what();
    } catch (const IoError& e) {
        rep.exit_code = kExitInvalidConfig;
        rep.error = e.what();
    }
    rep.command = command;
    rep.config = config_echo(kv);
    rep.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

RunReport run_sweep(const std::string& command, const KeyValueConfig& kv, const std::string& out_path,
                    const std::string& key, const std::vector<std::string>& values)
{
    const auto t0 = std::chrono::steady_clock::now();
    RunReport rep;
    rep.command = command;
    rep.config = config_echo(kv);
    rep.info["sweep_key"] = key;
    rep.info["sweep_values"] = values;
    if (values.empty()) {
        rep.exit_code = kExitInvalidConfig;
        rep.error = "sweep: no values";
        return rep;
    }

    std::vector<std::string> paths;
    std::vector<std::future<RunReport>> futures;
    for (const std::string& v : values) {
        KeyValueConfig run_kv = kv;
        run_kv.set(key, v);
        const std::string path = out_path.empty() ? std::string() : run_path(out_path, key, v);
        paths.push_back(path);
        futures.push_back(std::async(std::launch::async,
                                     [command, run_kv, path] { return run_command(command, run_kv, path); }));
    }
    for (auto& f : futures) {
        rep.runs.push_back(f.get());
    }
    // Input errors outrank numeric failures, which outrank failed checks.
    for (int code : {kExitInvalidConfig, kExitNumericFailure, kExitCheckFailure}) {
        if (std::any_of(rep.runs.begin(), rep.runs.end(), [code](const RunReport& r) { return r.exit_code == code; })) {
            rep.exit_code = code;
            break;
        }
    }

    // Merge per-run CSVs in value order with a leading sweep column.
    if (!out_path.empty() && rep.exit_code != kExitInvalidConfig && rep.exit_code != kExitNumericFailure) {
        try {
            std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
            if (!out) {
                throw IoError("cannot open " + out_path + " for writing");
            }
            bool header_done = false;
            for (std::size_t n = 0; n < values.size(); ++n) {
                std::ifstream in(paths[n], std::ios::binary);
                if (!in) {
                    throw IoError("cannot read per-run output " + paths[n]);
                }
                std::string line;
                bool first = true;
                while (std::getline(in, line)) {
                    if (first) {
                        first = false;
                        if (!header_done) {
                            out << key << ',' << line << '\n';
                            header_done = true;
                        }
                        continue;
                    }
                    out << values[n] << ',' << line << '\n';
                }
            }
            out.flush();
            if (!out) {
                throw IoError("write to " + out_path + " failed");
            }
            rep.outputs.push_back(out_path);
        } catch (const IoError& e) {
            rep.exit_code = kExitInvalidConfig;
            rep.error = e.what();
        }
    }
    rep.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

std::pair<std::string, std::vector<std::string>> parse_sweep(const std::string& text)
{
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= text.size()) {
        throw InvalidArgument("sweep must look like key=a,b,c");
    }
    std::vector<std::string> values;
    std::stringstream ss(text.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) {
            throw InvalidArgument("sweep: empty value");
        }
        values.push_back(item);
    }
    return {text.substr(0, eq), values};
}

}  // namespace gascollide::cli
