#include "gascollide/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "gascollide/errors.hpp"

namespace gascollide {
namespace {

void check_index(int idx, int dim, const char* what)
{
    if (idx < 0 || idx >= dim) {
        throw InvalidArgument(std::string("channel: ") + what + " index out of range");
    }
}

void check_on_shell(const GasEnvironment& env, const Channel& ch, const Vec3& q, const Vec3& p)
{
    const double e_k = env.ancilla_energies.at(static_cast<std::size_t>(ch.k));
    const double e_l = env.ancilla_energies.at(static_cast<std::size_t>(ch.l));
    const double expected = outgoing_momentum(p.norm(), ch.E, e_k, e_l, env.mass);
    if (std::abs(q.norm() - expected) > 1e-9 * expected) {
        std::ostringstream msg;
        msg << "amplitude: |q| = " << q.norm() << " is off shell (expected " << expected << ")";
        throw InvalidArgument(msg.str());
    }
}

double born_prefactor(const InteractionSpec& spec, const DerivedScales& s)
{
    return -std::sqrt(std::numbers::pi / 2.0) * spec.R * spec.V0 / s.E_R;
}

// Returns the bracketing index and weight; flags positions outside the grid.
std::pair<std::size_t, double> locate(const std::vector<double>& grid, double x, bool& outside)
{
    if (grid.size() == 1) {
        outside = outside || x != grid.front();
        return {0, 0.0};
    }
    if (x <= grid.front()) {
        outside = outside || x < grid.front();
        return {0, 0.0};
    }
    if (x >= grid.back()) {
        outside = outside || x > grid.back();
        return {grid.size() - 2, 1.0};
    }
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    const auto hi = static_cast<std::size_t>(it - grid.begin());
    const std::size_t lo = hi - 1;
    return {lo, (x - grid[lo]) / (grid[hi] - grid[lo])};
}

Vec3 random_unit(std::mt19937_64& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    Vec3 v;
    do {
        v = Vec3(n(rng), n(rng), n(rng));
    } while (v.norm() < 1e-8);
    return v.normalized();
}

Vec3 perpendicular(const Vec3& n)
{
    const Vec3 trial = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    return n.cross(trial).normalized();
}

}  // namespace

//---------------------------------------------------------------------------//
Channel Channel::make(const LevelSystem& levels, int i, int j, int k, int l)
{
    check_index(i, levels.dim(), "system");
    check_index(j, levels.dim(), "system");
    if (k < 0 || l < 0) {
        throw InvalidArgument("channel: ancilla index out of range");
    }
    return {levels.energy(i) - levels.energy(j), i, j, k, l};
}

double Channel::total_energy(const GasEnvironment& env) const
{
    check_index(k, env.ancilla_dim(), "ancilla");
    check_index(l, env.ancilla_dim(), "ancilla");
    return E + env.ancilla_energies[static_cast<std::size_t>(k)] -
           env.ancilla_energies[static_cast<std::size_t>(l)];
}

double outgoing_momentum(double p_mag, double E, double eps_k, double eps_l, double m)
{
    if (!(p_mag >= 0.0) || !(m > 0.0)) {
        throw InvalidArgument("outgoing_momentum: need p_mag >= 0 and m > 0");
    }
    const double radicand = p_mag * p_mag - 2.0 * m * (E + eps_k - eps_l);
    if (!(radicand > 0.0)) {
        std::ostringstream msg;
        msg << "channel closed: p^2 - 2m(E + eps_k - eps_l) = " << radicand;
        throw ChannelClosed(msg.str());
    }
    return std::sqrt(radicand);
}

Complex born_gaussian_amplitude(const InteractionSpec& spec, const GasEnvironment& env,
                                const Channel& ch, const Vec3& q, const Vec3& p)
{
    check_index(ch.i, spec.coupling.system_dim(), "system");
    check_index(ch.j, spec.coupling.system_dim(), "system");
    check_index(ch.k, spec.coupling.ancilla_dim(), "ancilla");
    check_index(ch.l, spec.coupling.ancilla_dim(), "ancilla");
    check_on_shell(env, ch, q, p);
    const DerivedScales s = derived_scales(env, spec);
    const double gauss = std::exp(-(q - p).squaredNorm() / (2.0 * s.p_R * s.p_R));
    return born_prefactor(spec, s) * spec.coupling(ch.i, ch.j, ch.k, ch.l) * gauss;
}

//---------------------------------------------------------------------------//
AmplitudeTable AmplitudeTable::read_csv(std::istream& in)
{
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r\n");
        const auto e = s.find_last_not_of(" \t\r\n");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };

    std::string line;
    if (!std::getline(in, line) || trim(line) != "p_mag,cos_theta,i,j,k,l,re,im") {
        throw InvalidArgument("amplitude table: header must be `p_mag,cos_theta,i,j,k,l,re,im`");
    }

    struct Row
    {
        double p, c;
        Complex v;
    };
    std::map<Key, std::vector<Row>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            fields.push_back(trim(field));
        }
        if (fields.size() != 8) {
            throw InvalidArgument("amplitude table: line " + std::to_string(line_no) + " needs 8 fields");
        }
        try {
            const Key key{std::stoi(fields[2]), std::stoi(fields[3]), std::stoi(fields[4]),
                          std::stoi(fields[5])};
            rows[key].push_back({std::stod(fields[0]), std::stod(fields[1]),
                                 Complex(std::stod(fields[6]), std::stod(fields[7]))});
        } catch (const std::logic_error&) {
            throw InvalidArgument("amplitude table: unparsable number on line " + std::to_string(line_no));
        }
    }

    AmplitudeTable table;
    for (auto& [key, entries] : rows) {
        std::set<double> ps;
        std::set<double> cs;
        for (const Row& r : entries) {
            ps.insert(r.p);
            cs.insert(r.c);
        }
        Grid g;
        g.p_mag.assign(ps.begin(), ps.end());
        g.cos_theta.assign(cs.begin(), cs.end());
        if (entries.size() != g.p_mag.size() * g.cos_theta.size()) {
            throw InvalidArgument("amplitude table: channel grid is incomplete or has duplicate nodes");
        }
        g.values = Eigen::MatrixXcd::Constant(static_cast<Eigen::Index>(g.p_mag.size()),
                                              static_cast<Eigen::Index>(g.cos_theta.size()),
                                              Complex(std::nan(""), 0.0));
        for (const Row& r : entries) {
            const auto a = std::lower_bound(g.p_mag.begin(), g.p_mag.end(), r.p) - g.p_mag.begin();
            const auto b = std::lower_bound(g.cos_theta.begin(), g.cos_theta.end(), r.c) - g.cos_theta.begin();
            if (!std::isnan(g.values(a, b).real())) {
                throw InvalidArgument("amplitude table: duplicate grid node");
            }
            g.values(a, b) = r.v;
        }
        table.add_channel(key, std::move(g));
    }
    return table;
}

AmplitudeTable AmplitudeTable::read_csv_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open amplitude table " + path);
    }
    return read_csv(in);
}

void AmplitudeTable::add_channel(Key key, Grid grid)
{
    auto increasing = [](const std::vector<double>& v) {
        return !v.empty() && std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
    };
    if (!increasing(grid.p_mag) || !increasing(grid.cos_theta)) {
        throw InvalidArgument("amplitude table: grids must be non-empty and strictly increasing");
    }
    if (grid.p_mag.front() < 0.0 || grid.cos_theta.front() < -1.0 || grid.cos_theta.back() > 1.0) {
        throw InvalidArgument("amplitude table: p_mag must be >= 0 and cos_theta in [-1, 1]");
    }
    if (grid.values.rows() != static_cast<Eigen::Index>(grid.p_mag.size()) ||
        grid.values.cols() != static_cast<Eigen::Index>(grid.cos_theta.size())) {
        throw InvalidArgument("amplitude table: value matrix does not match the grid");
    }
    if (!grid.values.allFinite()) {
        throw InvalidArgument("amplitude table: non-finite amplitude");
    }
    channels_[key] = std::move(grid);
}

void AmplitudeTable::set_value(const Key& key, std::size_t p_index, std::size_t cos_index, Complex value)
{
    Grid& g = channels_.at(key);
    g.values(static_cast<Eigen::Index>(p_index), static_cast<Eigen::Index>(cos_index)) = value;
}

AmplitudeTable::Lookup AmplitudeTable::lookup(const Key& key, double p_mag, double cos_theta) const
{
    const auto it = channels_.find(key);
    if (it == channels_.end()) {
        return {Complex(0.0, 0.0), false};
    }
    const Grid& g = it->second;
    bool outside = false;
    const auto [a, u] = locate(g.p_mag, p_mag, outside);
    const auto [b, w] = locate(g.cos_theta, cos_theta, outside);
    const auto ia = static_cast<Eigen::Index>(a);
    const auto ib = static_cast<Eigen::Index>(b);
    const Eigen::Index ia1 = g.p_mag.size() > 1 ? ia + 1 : ia;
    const Eigen::Index ib1 = g.cos_theta.size() > 1 ? ib + 1 : ib;
    const Complex v = (1.0 - u) * ((1.0 - w) * g.values(ia, ib) + w * g.values(ia, ib1)) +
                      u * ((1.0 - w) * g.values(ia1, ib) + w * g.values(ia1, ib1));
    return {v, outside};
}

//---------------------------------------------------------------------------//
AmplitudeModel::AmplitudeModel(Kind kind, GasEnvironment env, LevelSystem levels)
    : kind_(kind), env_(std::move(env)), levels_(std::move(levels)),
      extrapolations_(std::make_shared<std::atomic<std::uint64_t>>(0))
{
    env_.validate();
}

AmplitudeModel AmplitudeModel::born_gaussian(InteractionSpec spec, GasEnvironment env, LevelSystem levels)
{
    spec.validate();
    if (spec.coupling.system_dim() != levels.dim() ||
        spec.coupling.ancilla_dim() != static_cast<int>(env.ancilla_energies.size())) {
        throw InvalidArgument("born model: coupling dimensions do not match levels and ancilla");
    }
    AmplitudeModel model(Kind::born_gaussian, std::move(env), std::move(levels));
    const DerivedScales s = derived_scales(model.env_, spec);
    model.energy_scale_ = s.E_R;
    model.p_R_ = s.p_R;
    model.prefactor_ = born_prefactor(spec, s);
    model.data_ = std::move(spec);
    return model;
}

AmplitudeModel AmplitudeModel::tabulated(AmplitudeTable table, GasEnvironment env, LevelSystem levels,
                                         double energy_scale)
{
    if (!(energy_scale > 0.0)) {
        throw InvalidArgument("table model: energy scale must be positive");
    }
    for (const auto& [key, grid] : table.channels()) {
        const auto [i, j, k, l] = key;
        check_index(i, levels.dim(), "system");
        check_index(j, levels.dim(), "system");
        check_index(k, static_cast<int>(env.ancilla_energies.size()), "ancilla");
        check_index(l, static_cast<int>(env.ancilla_energies.size()), "ancilla");
    }
    AmplitudeModel model(Kind::table, std::move(env), std::move(levels));
    model.energy_scale_ = energy_scale;
    model.data_ = std::move(table);
    return model;
}

const InteractionSpec* AmplitudeModel::interaction() const
{
    return std::get_if<InteractionSpec>(&data_);
}

const AmplitudeTable* AmplitudeModel::table() const
{
    return std::get_if<AmplitudeTable>(&data_);
}

Complex AmplitudeModel::amplitude(const Channel& ch, const Vec3& q, const Vec3& p) const
{
    check_index(ch.i, levels_.dim(), "system");
    check_index(ch.j, levels_.dim(), "system");
    check_index(ch.k, env_.ancilla_dim(), "ancilla");
    check_index(ch.l, env_.ancilla_dim(), "ancilla");
    check_on_shell(env_, ch, q, p);
    if (const auto* spec = interaction()) {
        const double gauss = std::exp(-(q - p).squaredNorm() / (2.0 * p_R_ * p_R_));
        return prefactor_ * spec->coupling(ch.i, ch.j, ch.k, ch.l) * gauss;
    }
    const double qn = q.norm();
    const double pn = p.norm();
    const double c = (qn > 0.0 && pn > 0.0) ? std::clamp(q.dot(p) / (qn * pn), -1.0, 1.0) : 1.0;
    return isotropic(ch, pn, qn, c);
}

Complex AmplitudeModel::isotropic(const Channel& ch, double p_mag, double q_mag, double cos_theta) const
{
    if (const auto* spec = interaction()) {
        const double dq = q_mag - p_mag;
        const double sep2 = dq * dq + 2.0 * q_mag * p_mag * (1.0 - cos_theta);
        return prefactor_ * spec->coupling(ch.i, ch.j, ch.k, ch.l) * std::exp(-sep2 / (2.0 * p_R_ * p_R_));
    }
    const auto found = std::get<AmplitudeTable>(data_).lookup({ch.i, ch.j, ch.k, ch.l}, p_mag, cos_theta);
    if (found.extrapolated) {
        extrapolations_->fetch_add(1, std::memory_order_relaxed);
    }
    return found.value;
}

AmplitudeModel::Breakpoints AmplitudeModel::breakpoints(const Channel& ch) const
{
    const auto* t = table();
    if (!t || !t->has({ch.i, ch.j, ch.k, ch.l})) {
        return {};
    }
    const auto& g = t->channels().at({ch.i, ch.j, ch.k, ch.l});
    return {g.p_mag, g.cos_theta};
}

bool AmplitudeModel::null_channel(int i, int j, int k, int l) const
{
    if (const auto* spec = interaction()) {
        return spec->coupling(i, j, k, l) == Complex(0.0, 0.0) || spec->V0 == 0.0;
    }
    return !std::get<AmplitudeTable>(data_).has({i, j, k, l});
}

//---------------------------------------------------------------------------//
MicroreversibilityReport check_microreversibility(const AmplitudeModel& model, int samples, double tol,
                                                  std::uint64_t seed)
{
    if (samples < 1) {
        throw InvalidArgument("microreversibility: need at least one sample");
    }
    const GasEnvironment& env = model.env();
    const LevelSystem& levels = model.levels();
    const int ds = levels.dim();
    const int da = env.ancilla_dim();
    const std::uint64_t extrap_before = model.extrapolations();

    MicroreversibilityReport report;
    auto record = [&](const Channel& ch, const Vec3& q, const Vec3& p) {
        const Complex fwd = model.amplitude(ch, q, p);
        const Complex rev = model.amplitude(ch.reversed(), Vec3(-p), Vec3(-q));
        const double v = std::abs(fwd - rev);
        ++report.samples_checked;
        if (v > report.max_violation) {
            report.max_violation = v;
            report.worst = ch;
            report.worst_p_mag = p.norm();
            report.worst_cos_theta = q.dot(p) / (q.norm() * p.norm());
        }
    };
    auto momenta = [&](double p_mag, double q_mag, double c, std::mt19937_64& rng) {
        const Vec3 n1 = random_unit(rng);
        const Vec3 n2 = perpendicular(n1);
        const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        return std::pair<Vec3, Vec3>{q_mag * (c * n1 + s * n2), p_mag * n1};
    };

    std::vector<Channel> candidates;
    if (const auto* table = model.table()) {
        for (const auto& [key, grid] : table->channels()) {
            const auto [i, j, k, l] = key;
            candidates.push_back(Channel::make(levels, i, j, k, l));
        }
    } else {
        for (int i = 0; i < ds; ++i) {
            for (int j = 0; j < ds; ++j) {
                for (int k = 0; k < da; ++k) {
                    for (int l = 0; l < da; ++l) {
                        candidates.push_back(Channel::make(levels, i, j, k, l));
                    }
                }
            }
        }
    }
    if (candidates.empty()) {
        report.pass = true;
        return report;
    }

    // Configurations at threshold, where one of |p|, |q| rounds to zero, are
    // not resolvable in both directions and are left out.
    const double min_mom = 1e-6 * std::sqrt(2.0 * env.mass * env.kB * env.T_M);
    auto marginal = [min_mom](double p_mag, double q2) {
        return p_mag < min_mom || !(q2 > min_mom * min_mom);
    };

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double kT = env.kB * env.T_M;
    for (int n = 0; n < samples; ++n) {
        const Channel ch = candidates[pick(rng)];
        const double e_tot = ch.total_energy(env);
        const double threshold = std::sqrt(2.0 * env.mass * std::max(0.0, e_tot));
        double p_mag = 0.0;
        double c = 0.0;
        if (const auto* table = model.table()) {
            const auto& grid = table->channels().at({ch.i, ch.j, ch.k, ch.l});
            const double lo = std::max(grid.p_mag.front(), threshold);
            const double hi = grid.p_mag.back();
            if (!(hi > lo)) {
                continue;
            }
            p_mag = lo + (hi - lo) * unit(rng);
            c = grid.cos_theta.front() + (grid.cos_theta.back() - grid.cos_theta.front()) * unit(rng);
        } else {
            const double kinetic = std::max(0.0, e_tot) + 20.0 * kT * (1.0 - unit(rng));
            p_mag = std::sqrt(2.0 * env.mass * kinetic);
            c = 2.0 * unit(rng) - 1.0;
        }
        const double radicand = p_mag * p_mag - 2.0 * env.mass * e_tot;
        if (marginal(p_mag, radicand)) {
            continue;
        }
        const auto [q, p] = momenta(p_mag, std::sqrt(radicand), c, rng);
        record(ch, q, p);
    }

    if (const auto* table = model.table()) {
        for (const auto& [key, grid] : table->channels()) {
            const auto [i, j, k, l] = key;
            const Channel ch = Channel::make(levels, i, j, k, l);
            const double e_tot = ch.total_energy(env);
            for (double p_mag : grid.p_mag) {
                const double radicand = p_mag * p_mag - 2.0 * env.mass * e_tot;
                if (marginal(p_mag, radicand)) {
                    continue;
                }
                for (double c : grid.cos_theta) {
                    const auto [q, p] = momenta(p_mag, std::sqrt(radicand), c, rng);
                    record(ch, q, p);
                }
            }
        }
    }

    report.extrapolations = model.extrapolations() - extrap_before;
    report.pass = report.max_violation <= tol;
    return report;
}

Operator lindblad_channel_operator(const LevelSystem& levels, const AmplitudeModel& model, double E,
                                   int k, int l, const Vec3& direction, const Vec3& p)
{
    const GasEnvironment& env = model.env();
    if (levels.dim() != model.levels().dim()) {
        throw InvalidArgument("channel operator: level system does not match the amplitude model");
    }
    check_index(k, env.ancilla_dim(), "ancilla");
    check_index(l, env.ancilla_dim(), "ancilla");
    const double p_mag = p.norm();
    if (!(p_mag > 0.0)) {
        throw InvalidArgument("channel operator: incoming momentum must be nonzero");
    }
    if (std::abs(direction.norm() - 1.0) > 1e-9) {
        throw InvalidArgument("channel operator: direction must be a unit vector");
    }
    const double tol = 1e-9 * model.energy_scale();
    const int d = levels.dim();
    Operator L = Operator::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if (std::abs(levels.energy(i) - levels.energy(j) - E) > tol) {
                continue;
            }
            const Channel ch = Channel::make(levels, i, j, k, l);
            const double radicand = p_mag * p_mag - 2.0 * env.mass * ch.total_energy(env);
            if (!(radicand > 0.0) || model.null_channel(i, j, k, l)) {
                continue;
            }
            const double q_mag = std::sqrt(radicand);
            const Vec3 q = q_mag * direction;
            L(i, j) = std::sqrt(q_mag / p_mag) * model.amplitude(ch, q, p);
        }
    }
    return L;
}

Operator effective_hamiltonian(const LevelSystem& levels, const AmplitudeModel& model,
                               const GasEnvironment& env, const QuadratureSpec& quad)
{
    quad.validate();
    env.validate();
    const int d = levels.dim();
    Operator X = Operator::Zero(d, d);
    if (env.density == 0.0) {
        return X;
    }
    const Eigen::VectorXd pk = ancilla_populations(env);
    const double beta = env.beta_motion();
    const double tol = 1e-9 * model.energy_scale();
    AdaptiveOptions opt;
    opt.rule = PanelRule::gauss_legendre;
    opt.nodes = quad.radial_nodes;
    opt.rel_tol = quad.rel_tol;
    opt.max_panels = quad.max_subdivisions;

    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if (std::abs(levels.energy(i) - levels.energy(j)) > tol) {
                continue;
            }
            Complex acc(0.0, 0.0);
            for (int k = 0; k < env.ancilla_dim(); ++k) {
                if (model.null_channel(i, j, k, k)) {
                    continue;
                }
                const Channel ch = Channel::make(levels, i, j, k, k);
                // Forward amplitude averaged over |p| with the Maxwell-Boltzmann
                // radial weight (2/sqrt(pi)) sqrt(z) e^{-z}, z = beta p^2 / 2m.
                auto part = [&](bool imag) {
                    auto f = [&](double z) {
                        const double p_mag = std::sqrt(2.0 * env.mass * z / beta);
                        const Complex a = model.isotropic(ch, p_mag, p_mag, 1.0);
                        return 2.0 / std::sqrt(std::numbers::pi) * std::sqrt(z) * std::exp(-z) *
                               (imag ? a.imag() : a.real());
                    };
                    const QuadratureResult r = integrate_semi_infinite(f, 0.0, 1.0, opt);
                    if (!r.converged) {
                        std::ostringstream msg;
                        msg << "effective_hamiltonian: forward-amplitude average did not converge for ("
                            << i << "," << j << "," << k << "," << k << "), error " << r.error;
                        throw NumericFailure(msg.str(), r.error);
                    }
                    return r.value;
                };
                acc += pk(k) * Complex(part(false), part(true));
            }
            X(i, j) = acc;
        }
    }
    X *= -std::numbers::pi * env.hbar * env.hbar * env.density / env.mass;
    return X + X.adjoint();
}

}  // namespace gascollide
