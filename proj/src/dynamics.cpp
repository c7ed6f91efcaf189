#include "gascollide/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "gascollide/errors.hpp"

namespace gascollide {
namespace {

void check_grid(const std::vector<double>& t_grid)
{
    if (t_grid.empty() || t_grid.front() != 0.0) {
        throw InvalidArgument("time grid must be non-empty and start at 0");
    }
}

// Thrown from a record callback to leave the integrator early.
struct Converged
{
};

}  // namespace

//---------------------------------------------------------------------------//
PopulationVector::PopulationVector(Eigen::VectorXd p) : p_(std::move(p))
{
    if (p_.size() < 1 || !p_.allFinite()) {
        throw InvalidArgument("populations: must be non-empty and finite");
    }
    if (p_.minCoeff() < -1e-12) {
        throw InvalidArgument("populations: negative entry");
    }
    if (std::abs(p_.sum() - 1.0) > 1e-10) {
        throw InvalidArgument("populations: must sum to one");
    }
}

//---------------------------------------------------------------------------//
LindbladGenerator::LindbladGenerator(Operator h, std::vector<LindbladChannel> channels, double hbar)
    : dim_(static_cast<int>(h.rows())), h_(std::move(h)), channels_(std::move(channels))
{
    if (dim_ < 1 || h_.cols() != dim_) {
        throw InvalidArgument("lindblad: Hamiltonian must be square");
    }
    if (!(hbar > 0.0)) {
        throw InvalidArgument("lindblad: hbar must be positive");
    }
    if (hermiticity_defect(h_) > 1e-12 * std::max(1.0, h_.cwiseAbs().maxCoeff())) {
        throw InvalidArgument("lindblad: Hamiltonian must be Hermitian");
    }
    Operator k_dis = Operator::Zero(dim_, dim_);
    for (const LindbladChannel& c : channels_) {
        if (!std::isfinite(c.rate) || c.rate < 0.0) {
            throw InvalidArgument("lindblad: rates must be finite and non-negative");
        }
        if (c.op.rows() != dim_ || c.op.cols() != dim_) {
            throw InvalidArgument("lindblad: jump operator dimension mismatch");
        }
        k_dis -= 0.5 * c.rate * (c.op.adjoint() * c.op);
        l_.push_back(c.op.sparseView());
        l_adj_.push_back(c.op.adjoint().sparseView());
        rates_.push_back(c.rate);
    }
    k_dis_ = k_dis.sparseView();
    k_dis_adj_ = k_dis.adjoint().sparseView();
    const Operator k = Complex(0.0, -1.0 / hbar) * h_ + k_dis;
    k_ = k.sparseView();
    k_adj_ = k.adjoint().sparseView();
}

// K rho + rho K^dag is spelled out rather than taken as m + m^dag: the
// shortcut is only right for exactly Hermitian rho and lets rounding noise in
// the anti-Hermitian part grow without bound.
Eigen::MatrixXcd LindbladGenerator::apply(const Eigen::MatrixXcd& rho) const
{
    Eigen::MatrixXcd out = k_ * rho;
    out += rho * k_adj_;
    for (std::size_t c = 0; c < l_.size(); ++c) {
        if (rates_[c] == 0.0) {
            continue;
        }
        const Eigen::MatrixXcd a = l_[c] * rho;
        out += rates_[c] * (a * l_adj_[c]);
    }
    return out;
}

Eigen::MatrixXcd LindbladGenerator::dissipative(const Eigen::MatrixXcd& rho) const
{
    Eigen::MatrixXcd out = k_dis_ * rho;
    out += rho * k_dis_adj_;
    for (std::size_t c = 0; c < l_.size(); ++c) {
        if (rates_[c] == 0.0) {
            continue;
        }
        const Eigen::MatrixXcd a = l_[c] * rho;
        out += rates_[c] * (a * l_adj_[c]);
    }
    return out;
}

double LindbladGenerator::min_positive_rate() const
{
    double r = 0.0;
    for (double g : rates_) {
        if (g > 0.0 && (r == 0.0 || g < r)) {
            r = g;
        }
    }
    return r;
}

LindbladGenerator classical_generator(const RateMatrix& R, const LevelSystem& levels)
{
    if (R.dim() != levels.dim()) {
        throw InvalidArgument("classical_generator: rate matrix and levels differ in dimension");
    }
    std::vector<LindbladChannel> channels;
    for (int j = 0; j < R.dim(); ++j) {
        for (int i = 0; i < R.dim(); ++i) {
            if (R(i, j) > 0.0) {
                Operator L = Operator::Zero(R.dim(), R.dim());
                L(i, j) = 1.0;
                channels.push_back({R(i, j), std::move(L)});
            }
        }
    }
    return LindbladGenerator(levels.hamiltonian(), std::move(channels));
}

//---------------------------------------------------------------------------//
Trajectory<DensityMatrix> evolve_lindblad(const LindbladGenerator& gen, const DensityMatrix& rho0,
                                          const std::vector<double>& t_grid, const OdeOptions& opt)
{
    check_grid(t_grid);
    if (rho0.dim() != gen.dim()) {
        throw InvalidArgument("evolve_lindblad: initial state dimension mismatch");
    }
    Trajectory<DensityMatrix> traj;
    traj.times.reserve(t_grid.size());
    traj.states.reserve(t_grid.size());
    auto rhs = [&gen](double, const Eigen::MatrixXcd& rho) { return gen.apply(rho); };
    auto record = [&traj](std::size_t, double t, const Eigen::MatrixXcd& rho) {
        if (auto bad = check_state(rho, kTrajectoryTolerance)) {
            std::ostringstream msg;
            msg << "evolve_lindblad: state left the physical set at t = " << t << ": " << *bad;
            throw NumericFailure(msg.str(), t);
        }
        traj.times.push_back(t);
        traj.states.emplace_back(rho, kTrajectoryTolerance);
    };
    integrate_ode(rhs, Eigen::MatrixXcd(rho0.matrix()), t_grid, opt, record);
    return traj;
}

Trajectory<DensityMatrix> evolve_lindblad(const Operator& h, const std::vector<LindbladChannel>& channels,
                                          const DensityMatrix& rho0, const std::vector<double>& t_grid,
                                          const OdeOptions& opt)
{
    return evolve_lindblad(LindbladGenerator(h, channels), rho0, t_grid, opt);
}

Trajectory<PopulationVector> evolve_populations(const RateMatrix& R, const PopulationVector& P0,
                                                const std::vector<double>& t_grid, const OdeOptions& opt)
{
    check_grid(t_grid);
    if (P0.dim() != R.dim()) {
        throw InvalidArgument("evolve_populations: initial populations dimension mismatch");
    }
    const Eigen::MatrixXd G = R.generator();
    Trajectory<PopulationVector> traj;
    auto rhs = [&G](double, const Eigen::VectorXd& p) -> Eigen::VectorXd { return G * p; };
    auto record = [&traj](std::size_t, double t, const Eigen::VectorXd& p) {
        const double drift = std::abs(p.sum() - 1.0);
        if (drift > 1e-10 || p.minCoeff() < -1e-12) {
            std::ostringstream msg;
            msg << "evolve_populations: invalid populations at t = " << t << " (sum drift " << drift
                << ", min " << p.minCoeff() << ")";
            throw NumericFailure(msg.str(), t);
        }
        traj.times.push_back(t);
        traj.states.emplace_back(p);
    };
    integrate_ode(rhs, Eigen::VectorXd(P0.values()), t_grid, opt, record);
    return traj;
}

//---------------------------------------------------------------------------//
DensityMatrix steady_state(const LindbladGenerator& gen, const SteadyStateOptions& opt)
{
    if (!(opt.tol > 0.0)) {
        throw InvalidArgument("steady_state: tolerance must be positive");
    }
    const double rate = gen.min_positive_rate();
    if (rate == 0.0) {
        throw InvalidArgument("steady_state: at least one channel needs a positive rate");
    }
    const double horizon = opt.horizon > 0.0 ? opt.horizon : 50.0 / rate;
    const DensityMatrix start = opt.initial ? *opt.initial : DensityMatrix::maximally_mixed(gen.dim());
    if (start.dim() != gen.dim()) {
        throw InvalidArgument("steady_state: initial state dimension mismatch");
    }

    constexpr int checkpoints = 1000;
    std::vector<double> grid(checkpoints + 1);
    for (int n = 0; n <= checkpoints; ++n) {
        grid[static_cast<std::size_t>(n)] = horizon * n / checkpoints;
    }
    Eigen::MatrixXcd last = start.matrix();
    double residual = 0.0;
    auto rhs = [&gen](double, const Eigen::MatrixXcd& rho) { return gen.apply(rho); };
    auto record = [&](std::size_t, double t, const Eigen::MatrixXcd& rho) {
        if (auto bad = check_state(rho, kTrajectoryTolerance)) {
            std::ostringstream msg;
            msg << "steady_state: state left the physical set at t = " << t << ": " << *bad;
            throw NumericFailure(msg.str(), t);
        }
        last = rho;
        residual = gen.apply(rho).norm();
        if (residual < opt.tol) {
            throw Converged{};
        }
    };
    try {
        integrate_ode(rhs, Eigen::MatrixXcd(start.matrix()), grid, opt.ode, record);
    } catch (const Converged&) {
        return DensityMatrix(last, kTrajectoryTolerance);
    }
    std::ostringstream msg;
    msg << "steady_state: residual " << residual << " still above " << opt.tol << " after t = " << horizon;
    throw NumericFailure(msg.str(), residual);
}

std::vector<double> uniform_grid(double t_max, int n_samples)
{
    if (!(t_max > 0.0) || !std::isfinite(t_max) || n_samples < 2) {
        throw InvalidArgument("uniform_grid: need t_max > 0 and at least two samples");
    }
    std::vector<double> g(static_cast<std::size_t>(n_samples));
    for (int n = 0; n < n_samples; ++n) {
        g[static_cast<std::size_t>(n)] = t_max * n / (n_samples - 1);
    }
    g.back() = t_max;
    return g;
}

}  // namespace gascollide
