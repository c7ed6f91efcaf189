#include "gascollide/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "gascollide/errors.hpp"

namespace gascollide::cli {
namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        out.push_back(trim(item));
    }
    return out;
}

double to_double(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        throw InvalidArgument("config: '" + key + "' expects a number, got '" + text + "'");
    }
    return v;
}

int to_int(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        throw InvalidArgument("config: '" + key + "' expects an integer, got '" + text + "'");
    }
    return v;
}

std::vector<double> to_list(const std::string& key, const std::string& text)
{
    std::vector<double> out;
    for (const std::string& item : split(text, ',')) {
        out.push_back(to_double(key, item));
    }
    return out;
}

const std::set<std::string> kKnownKeys = {
    "model",        "J",           "D",           "A",           "alpha",        "omega_S_over_ER",
    "gamma_tilde",  "n_R3",        "V0_over_ER",  "t_max",       "n_samples",    "initial_state",
    "alpha_grid",   "s_grid",      "ldb_reference", "amplitude_table", "micro_tol", "micro_samples",
    "system_energies", "ancilla_energies", "T_A", "T_M",        "density",      "quad_rel_tol",
    "radial_nodes", "angular_nodes", "max_subdivisions", "ode_rtol", "ode_atol", "ldb_tol", "gibbs_tol"};

InitialState parse_initial(const std::string& text)
{
    InitialState s;
    const auto colon = text.find(':');
    const std::string head = trim(text.substr(0, colon));
    const std::string arg = colon == std::string::npos ? std::string() : trim(text.substr(colon + 1));
    if (head == "ground" && arg.empty()) {
        s.kind = InitialState::Kind::ground;
    } else if (head == "gibbs") {
        s.kind = InitialState::Kind::gibbs;
        s.temperature = to_double("initial_state", arg);
        if (s.temperature == 0.0 || !std::isfinite(s.temperature)) {
            throw InvalidArgument("config: gibbs temperature must be finite and nonzero");
        }
    } else if (head == "custom") {
        s.kind = InitialState::Kind::custom;
        s.populations = to_list("initial_state", arg);
    } else if (head == "mixed") {
        s.kind = InitialState::Kind::mixed;
        s.eps = to_double("initial_state", arg);
        if (!(s.eps >= 0.0 && s.eps <= 1.0)) {
            throw InvalidArgument("config: mixed:<eps> needs eps in [0, 1]");
        }
    } else {
        throw InvalidArgument("config: initial_state must be ground, gibbs:<T>, custom:<p0,...> or mixed:<eps>");
    }
    return s;
}

}  // namespace

//---------------------------------------------------------------------------//
KeyValueConfig KeyValueConfig::parse(std::istream& in)
{
    KeyValueConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidArgument("config line " + std::to_string(line_no) + ": expected `key = value`");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) {
            throw InvalidArgument("config line " + std::to_string(line_no) + ": empty key");
        }
        if (cfg.has(key)) {
            throw InvalidArgument("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
        cfg.set(key, trim(line.substr(eq + 1)));
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file " + path);
    }
    return parse(in);
}

const std::string& KeyValueConfig::get(const std::string& key) const
{
    const auto it = index_.find(key);
    if (it == index_.end()) {
        throw InvalidArgument("config: missing key '" + key + "'");
    }
    return entries_[it->second].second;
}

void KeyValueConfig::set(const std::string& key, const std::string& value)
{
    const auto it = index_.find(key);
    if (it != index_.end()) {
        entries_[it->second].second = value;
        return;
    }
    index_[key] = entries_.size();
    entries_.emplace_back(key, value);
}

//---------------------------------------------------------------------------//
std::vector<double> parse_grid(const std::string& text)
{
    const std::string t = trim(text);
    if (t.empty()) {
        throw InvalidArgument("grid: empty");
    }
    if (t.find(':') != std::string::npos) {
        const auto parts = split(t, ':');
        if (parts.size() != 3) {
            throw InvalidArgument("grid: range form is start:stop:count");
        }
        const double a = to_double("grid", parts[0]);
        const double b = to_double("grid", parts[1]);
        const int n = to_int("grid", parts[2]);
        if (n < 1) {
            throw InvalidArgument("grid: count must be positive");
        }
        if (n == 1) {
            return {a};
        }
        std::vector<double> g(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            g[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
        }
        g.back() = b;
        return g;
    }
    return to_list("grid", t);
}

SpinQuantum parse_spin(const std::string& text)
{
    const std::string t = trim(text);
    const auto slash = t.find('/');
    if (slash != std::string::npos) {
        const int num = to_int("J", t.substr(0, slash));
        const int den = to_int("J", t.substr(slash + 1));
        if (den == 2) {
            return SpinQuantum(num);
        }
        if (den == 1) {
            return SpinQuantum(2 * num);
        }
        throw InvalidArgument("config: J must be an integer or half-integer");
    }
    return SpinQuantum::from_value(to_double("J", t));
}

ScenarioConfig ScenarioConfig::from(const KeyValueConfig& kv)
{
    for (const auto& [key, value] : kv.entries()) {
        if (!kKnownKeys.count(key)) {
            throw InvalidArgument("config: unknown key '" + key + "'");
        }
    }
    ScenarioConfig c;
    auto num = [&](const char* key, double& dst) {
        if (kv.has(key)) {
            dst = to_double(key, kv.get(key));
        }
    };
    auto integer = [&](const char* key, int& dst) {
        if (kv.has(key)) {
            dst = to_int(key, kv.get(key));
        }
    };

    if (kv.has("model")) {
        c.model = kv.get("model");
        if (c.model != "spin" && c.model != "table") {
            throw InvalidArgument("config: model must be 'spin' or 'table'");
        }
    }
    if (kv.has("J")) {
        c.spin.J = parse_spin(kv.get("J"));
    }
    num("D", c.spin.D);
    num("alpha", c.spin.alpha);
    num("omega_S_over_ER", c.spin.omega_S_over_ER);
    if (kv.has("A")) {
        const std::string a = kv.get("A");
        if (a == "equilibrium") {
            c.spin.A = c.spin.alpha * c.spin.omega_S_over_ER + c.spin.D;
        } else {
            c.spin.A = to_double("A", a);
        }
    }

    // gamma_tilde directly, or from density and coupling strength (E_R = 1, R = 1/sqrt 2).
    if (kv.has("gamma_tilde") && (kv.has("n_R3") || kv.has("V0_over_ER"))) {
        throw InvalidArgument("config: give gamma_tilde or n_R3 with V0_over_ER, not both");
    }
    num("gamma_tilde", c.spin.gamma_tilde);
    if (kv.has("n_R3") || kv.has("V0_over_ER")) {
        const double nR3 = to_double("n_R3", kv.get("n_R3"));
        const double v0 = to_double("V0_over_ER", kv.get("V0_over_ER"));
        const double R = 1.0 / std::sqrt(2.0);
        const double lambda = std::sqrt(2.0 * std::numbers::pi * c.spin.alpha);
        c.spin.gamma_tilde = nR3 / (R * R * R) * lambda * lambda * lambda * v0 * v0 / 2.0;
    }

    num("t_max", c.t_max);
    integer("n_samples", c.n_samples);
    if (kv.has("initial_state")) {
        c.initial = parse_initial(kv.get("initial_state"));
    }
    if (kv.has("alpha_grid")) {
        c.alpha_grid = parse_grid(kv.get("alpha_grid"));
    }
    if (kv.has("s_grid")) {
        c.s_grid = parse_grid(kv.get("s_grid"));
    }
    if (kv.has("ldb_reference")) {
        const std::string r = kv.get("ldb_reference");
        if (r == "motional") {
            c.ldb_reference = LdbReference::motional;
        } else if (r == "effective") {
            c.ldb_reference = LdbReference::effective;
        } else {
            throw InvalidArgument("config: ldb_reference must be 'motional' or 'effective'");
        }
    }
    if (kv.has("amplitude_table")) {
        c.amplitude_table = kv.get("amplitude_table");
    }
    num("micro_tol", c.micro_tol);
    integer("micro_samples", c.micro_samples);
    if (kv.has("system_energies")) {
        c.system_energies = to_list("system_energies", kv.get("system_energies"));
    }
    if (kv.has("ancilla_energies")) {
        c.ancilla_energies = to_list("ancilla_energies", kv.get("ancilla_energies"));
    }
    num("T_A", c.T_A);
    num("T_M", c.T_M);
    num("density", c.density);
    num("quad_rel_tol", c.quad.rel_tol);
    integer("radial_nodes", c.quad.radial_nodes);
    integer("angular_nodes", c.quad.angular_nodes);
    integer("max_subdivisions", c.quad.max_subdivisions);
    num("ode_rtol", c.ode.rtol);
    num("ode_atol", c.ode.atol);
    num("ldb_tol", c.ldb_tol);
    num("gibbs_tol", c.gibbs_tol);

    // Validation.
    if (!(c.t_max > 0.0) || !std::isfinite(c.t_max)) {
        throw InvalidArgument("config: t_max must be positive");
    }
    if (c.n_samples < 2) {
        throw InvalidArgument("config: n_samples must be at least 2");
    }
    if (!(c.micro_tol > 0.0) || c.micro_samples < 1) {
        throw InvalidArgument("config: micro_tol and micro_samples must be positive");
    }
    if (kv.has("ldb_tol") && !(c.ldb_tol > 0.0)) {
        throw InvalidArgument("config: ldb_tol must be positive");
    }
    if (!(c.gibbs_tol > 0.0)) {
        throw InvalidArgument("config: gibbs_tol must be positive");
    }
    c.quad.validate();
    c.ode.validate();
    for (double a : c.alpha_grid) {
        if (!(a > 0.0) || !std::isfinite(a)) {
            throw InvalidArgument("config: alpha_grid entries must be positive");
        }
    }
    for (double s : c.s_grid) {
        if (!std::isfinite(s)) {
            throw InvalidArgument("config: s_grid entries must be finite");
        }
    }
    if (c.model == "spin") {
        // Builds and discards the model to surface parameter errors early.
        build_spin_model(c.spin);
        if (c.initial.kind == InitialState::Kind::custom) {
            if (static_cast<int>(c.initial.populations.size()) != c.spin.J.dim()) {
                throw InvalidArgument("config: custom populations need 2J+1 entries");
            }
        }
    } else {
        if (c.amplitude_table.empty()) {
            throw InvalidArgument("config: model = table needs amplitude_table");
        }
        if (c.system_energies.size() < 2 || c.ancilla_energies.empty()) {
            throw InvalidArgument("config: model = table needs system_energies (>= 2) and ancilla_energies");
        }
        if (c.initial.kind == InitialState::Kind::custom &&
            c.initial.populations.size() != c.system_energies.size()) {
            throw InvalidArgument("config: custom populations need one entry per system level");
        }
    }
    if (c.initial.kind == InitialState::Kind::custom) {
        double sum = 0.0;
        for (double p : c.initial.populations) {
            if (!(p >= -1e-12) || !std::isfinite(p)) {
                throw InvalidArgument("config: custom populations must be non-negative");
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-10) {
            throw InvalidArgument("config: custom populations must sum to one");
        }
    }
    return c;
}

}  // namespace gascollide::cli
