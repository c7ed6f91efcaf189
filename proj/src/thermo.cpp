#include "gascollide/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "gascollide/errors.hpp"

namespace gascollide {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_diagonal(const Eigen::MatrixXcd& a)
{
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (i != j && a(i, j) != Complex(0.0, 0.0)) {
                return false;
            }
        }
    }
    return true;
}

// sum_i e_i^asc lambda_i^desc
double passive_energy(std::vector<double> energies, std::vector<double> weights)
{
    std::stable_sort(energies.begin(), energies.end());
    std::stable_sort(weights.begin(), weights.end(), std::greater<>());
    double s = 0.0;
    for (std::size_t i = 0; i < energies.size(); ++i) {
        s += energies[i] * weights[i];
    }
    return s;
}

}  // namespace

double heat_power(const Operator& h_S, const Eigen::MatrixXcd& c_rho)
{
    if (h_S.rows() != c_rho.rows() || h_S.cols() != c_rho.cols() || h_S.rows() != h_S.cols()) {
        throw InvalidArgument("heat_power: dimension mismatch");
    }
    return (h_S.cwiseProduct(c_rho.transpose())).sum().real();
}

std::optional<double> entropy_rate(const DensityMatrix& rho, const Eigen::MatrixXcd& c_rho, double min_eigenvalue)
{
    if (c_rho.rows() != rho.dim() || c_rho.cols() != rho.dim()) {
        throw InvalidArgument("entropy_rate: dimension mismatch");
    }
    const EigenSystem es = eigh(rho.matrix());
    if (es.values.minCoeff() <= min_eigenvalue) {
        return std::nullopt;
    }
    const Eigen::MatrixXcd c_eig = es.vectors.adjoint() * c_rho * es.vectors;
    double s = 0.0;
    for (Eigen::Index k = 0; k < es.values.size(); ++k) {
        s -= std::log(es.values(k)) * c_eig(k, k).real();
    }
    return s;
}

ClausiusReport entropy_production_check(const Trajectory<DensityMatrix>& traj, const LindbladGenerator& gen,
                                        const Operator& h_S, double beta)
{
    if (!std::isfinite(beta)) {
        throw InvalidArgument("clausius: beta must be finite");
    }
    ClausiusReport rep;
    rep.residuals.assign(traj.size(), kNaN);
    double min_res = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < traj.size(); ++n) {
        const DensityMatrix& rho = traj.states[n];
        const Eigen::MatrixXcd c_rho = gen.dissipative(rho.matrix());
        const auto s_dot = entropy_rate(rho, c_rho);
        if (!s_dot) {
            rep.skipped.push_back(n);
            continue;
        }
        const double r = *s_dot - beta * heat_power(h_S, c_rho);
        rep.residuals[n] = r;
        rep.max_abs_entropy_rate = std::max(rep.max_abs_entropy_rate, std::abs(*s_dot));
        min_res = std::min(min_res, r);
    }
    if (rep.skipped.size() == traj.size()) {
        rep.note = "every sample was near-singular; nothing checked";
        rep.min_residual = kNaN;
        rep.pass = false;
        return rep;
    }
    rep.min_residual = min_res;
    rep.pass = min_res >= -1e-8 * std::max(rep.max_abs_entropy_rate, 1.0);
    if (!rep.skipped.empty()) {
        std::ostringstream os;
        os << rep.skipped.size() << " near-singular sample(s) skipped, first at t = "
           << traj.times[rep.skipped.front()];
        rep.note = os.str();
    }
    return rep;
}

double ergotropy_diagonal(const LevelSystem& levels, const PopulationVector& P)
{
    if (P.dim() != levels.dim()) {
        throw InvalidArgument("ergotropy: populations and levels differ in dimension");
    }
    const std::vector<double>& e = levels.energies();
    std::vector<double> p(P.values().data(), P.values().data() + P.dim());
    double actual = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        actual += e[i] * p[i];
    }
    return std::max(0.0, actual - passive_energy(e, std::move(p)));
}

double ergotropy_general(const Operator& h_S, const DensityMatrix& rho)
{
    if (h_S.rows() != rho.dim() || h_S.cols() != rho.dim()) {
        throw InvalidArgument("ergotropy: dimension mismatch");
    }
    const Eigen::MatrixXcd& r = rho.matrix();
    if (is_diagonal(h_S) && is_diagonal(r)) {
        const Eigen::VectorXd e = h_S.diagonal().real();
        const Eigen::VectorXd p = r.diagonal().real();
        double actual = 0.0;
        for (Eigen::Index i = 0; i < e.size(); ++i) {
            actual += e(i) * p(i);
        }
        return std::max(0.0, actual - passive_energy({e.data(), e.data() + e.size()},
                                                     {p.data(), p.data() + p.size()}));
    }
    const Eigen::VectorXd e = eigh(h_S).values;
    const Eigen::VectorXd lam = eigh(r).values;
    const double actual = (h_S.cwiseProduct(r.transpose())).sum().real();
    return std::max(0.0, actual - passive_energy({e.data(), e.data() + e.size()},
                                                 {lam.data(), lam.data() + lam.size()}));
}

std::vector<ThermoSample> annotate(Trajectory<DensityMatrix>& traj, const LindbladGenerator& gen,
                                   const Operator& h_S, double beta)
{
    std::vector<ThermoSample> out;
    out.reserve(traj.size());
    for (std::size_t n = 0; n < traj.size(); ++n) {
        const DensityMatrix& rho = traj.states[n];
        const Eigen::MatrixXcd c_rho = gen.dissipative(rho.matrix());
        ThermoSample s;
        s.t = traj.times[n];
        s.E_S = (h_S.cwiseProduct(rho.matrix().transpose())).sum().real();
        s.Q_dot = heat_power(h_S, c_rho);
        s.S = von_neumann_entropy(rho);
        const auto s_dot = entropy_rate(rho, c_rho);
        s.S_dot = s_dot ? *s_dot : kNaN;
        s.clausius_residual = s_dot ? *s_dot - beta * s.Q_dot : kNaN;
        s.ergotropy = ergotropy_general(h_S, rho);
        out.push_back(s);
    }
    auto column = [&out](double ThermoSample::*field) {
        std::vector<double> v;
        v.reserve(out.size());
        for (const ThermoSample& s : out) {
            v.push_back(s.*field);
        }
        return v;
    };
    traj.add_observable("E_S", column(&ThermoSample::E_S));
    traj.add_observable("S", column(&ThermoSample::S));
    traj.add_observable("Q_dot", column(&ThermoSample::Q_dot));
    traj.add_observable("S_dot", column(&ThermoSample::S_dot));
    traj.add_observable("clausius_residual", column(&ThermoSample::clausius_residual));
    traj.add_observable("ergotropy", column(&ThermoSample::ergotropy));
    return out;
}

}  // namespace gascollide
