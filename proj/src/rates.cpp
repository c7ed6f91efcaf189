#include "gascollide/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gascollide/errors.hpp"

namespace gascollide {
namespace {

// 1 / (1 + e^x) without overflow.
double fermi(double x)
{
    if (x > 0.0) {
        const double e = std::exp(-x);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(x));
}

std::string channel_name(int i, int j, int k, int l)
{
    std::ostringstream os;
    os << "(i=" << i << ", j=" << j << ", k=" << k << ", l=" << l << ")";
    return os.str();
}

}  // namespace

//---------------------------------------------------------------------------//
RateMatrix::RateMatrix(Eigen::MatrixXd R) : R_(std::move(R))
{
    if (R_.rows() < 1 || R_.rows() != R_.cols()) {
        throw InvalidArgument("rate matrix: must be square and non-empty");
    }
    for (Eigen::Index i = 0; i < R_.rows(); ++i) {
        for (Eigen::Index j = 0; j < R_.cols(); ++j) {
            const double r = R_(i, j);
            if (!std::isfinite(r) || r < 0.0) {
                throw InvalidArgument("rate matrix: entries must be finite and non-negative");
            }
            if (i == j && r != 0.0) {
                throw InvalidArgument("rate matrix: diagonal must be zero");
            }
        }
    }
}

Eigen::MatrixXd RateMatrix::generator() const
{
    Eigen::MatrixXd G = R_;
    G.diagonal() -= R_.colwise().sum().transpose();
    return G;
}

//---------------------------------------------------------------------------//
double integral_I(double alpha, double s)
{
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw InvalidArgument("integral_I: alpha must be positive and finite");
    }
    if (!std::isfinite(s)) {
        throw InvalidArgument("integral_I: s must be finite");
    }
    const double a = 2.0 + alpha;
    auto f = [&](double z) {
        const double r = std::sqrt(std::max(0.0, z * (z - s)));
        const double base = s - a * z;
        return 0.5 * (std::exp(base + 2.0 * r) - std::exp(base - 2.0 * r));
    };
    AdaptiveOptions opt;
    opt.rule = PanelRule::gauss_kronrod_15;
    opt.rel_tol = 1e-10;
    opt.max_panels = 4000;
    const QuadratureResult res = integrate_semi_infinite(f, std::max(0.0, s), 1.0 / alpha, opt);
    if (!res.converged) {
        std::ostringstream msg;
        msg << "integral_I(" << alpha << ", " << s << ") did not converge, error " << res.error;
        throw NumericFailure(msg.str(), res.error);
    }
    return std::max(0.0, res.value);
}

SpinRates spin_rates(const GasEnvironment& env, const InteractionSpec& spec, double omega_S, double Delta)
{
    env.validate();
    spec.validate();
    if (!std::isfinite(omega_S) || !std::isfinite(Delta)) {
        throw InvalidArgument("spin_rates: frequencies must be finite");
    }
    const DerivedScales sc = derived_scales(env, spec);
    const double alpha = sc.E_R / (env.kB * env.T_M);
    const double s = env.hbar * Delta / sc.E_R;
    const double x = env.hbar * (omega_S + Delta) / (env.kB * env.T_A);
    return {sc.gamma_tilde * integral_I(alpha, -s) * fermi(x), sc.gamma_tilde * integral_I(alpha, s) * fermi(-x)};
}

EffectiveTemperature effective_temperature(double omega_S, double Delta, double T_A, double T_M)
{
    if (!(T_A > 0.0) || !(T_M > 0.0) || !std::isfinite(T_A) || !std::isfinite(T_M)) {
        throw InvalidArgument("effective_temperature: T_A and T_M must be positive");
    }
    const double omega_A = omega_S + Delta;
    const double denom = omega_A * T_M - Delta * T_A;
    if (denom == 0.0) {
        return {true, 0.0};
    }
    return {false, omega_S * T_A * T_M / denom};
}

//---------------------------------------------------------------------------//
RateMatrix rate_matrix(const LevelSystem& levels, const AmplitudeModel& model, const GasEnvironment& env,
                       const QuadratureSpec& quad)
{
    quad.validate();
    env.validate();
    if (model.levels().dim() != levels.dim() || model.env().ancilla_dim() != env.ancilla_dim()) {
        throw InvalidArgument("rate_matrix: amplitude model does not match the level system or gas");
    }
    const int d = levels.dim();
    const int da = env.ancilla_dim();
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(d, d);
    if (env.density == 0.0) {
        return RateMatrix(R);
    }
    const Eigen::VectorXd pl = ancilla_populations(env);
    const double beta = env.beta_motion();
    const double m = env.mass;

    AdaptiveOptions radial;
    radial.rule = PanelRule::gauss_legendre;
    radial.nodes = quad.radial_nodes;
    radial.rel_tol = quad.rel_tol;
    radial.max_panels = quad.max_subdivisions;
    AdaptiveOptions angular = radial;
    angular.nodes = quad.angular_nodes;
    angular.rel_tol = 0.1 * quad.rel_tol;

    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if (i == j) {
                continue;
            }
            double acc = 0.0;
            for (int k = 0; k < da; ++k) {
                for (int l = 0; l < da; ++l) {
                    if (model.null_channel(i, j, k, l) || pl(l) == 0.0) {
                        continue;
                    }
                    const Channel ch = Channel::make(levels, i, j, k, l);
                    const double e_tot = ch.total_energy(env);
                    const AmplitudeModel::Breakpoints kinks = model.breakpoints(ch);
                    std::vector<double> z_kinks;
                    for (double pk : kinks.p_mag) {
                        z_kinks.push_back(beta * pk * pk / (2.0 * m));
                    }
                    bool angular_failed = false;
                    double angular_error = 0.0;
                    auto radial_integrand = [&](double z) {
                        const double p2 = 2.0 * m * z / beta;
                        const double q2 = p2 - 2.0 * m * e_tot;
                        if (!(q2 > 0.0)) {
                            return 0.0;
                        }
                        const double p = std::sqrt(p2);
                        const double q = std::sqrt(q2);
                        auto cross_section = [&](double c) { return std::norm(model.isotropic(ch, p, q, c)); };
                        const QuadratureResult a =
                            integrate_piecewise(cross_section, -1.0, 1.0, kinks.cos_theta, 1.0, angular);
                        if (!a.converged) {
                            angular_failed = true;
                            angular_error = std::max(angular_error, a.error);
                        }
                        return 2.0 / std::sqrt(std::numbers::pi) * std::sqrt(z) * std::exp(-z) * q *
                               2.0 * std::numbers::pi * a.value;
                    };
                    const double z_min = std::max(0.0, beta * e_tot);
                    const QuadratureResult r = integrate_piecewise(
                        radial_integrand, z_min, std::numeric_limits<double>::infinity(), z_kinks, 1.0, radial);
                    if (!r.converged || angular_failed) {
                        std::ostringstream msg;
                        msg << "rate_matrix: quadrature did not converge for channel " << channel_name(i, j, k, l)
                            << " (radial error " << r.error << ", angular error " << angular_error << ")";
                        throw NumericFailure(msg.str(), std::max(r.error, angular_error));
                    }
                    acc += pl(l) * env.density / m * r.value;
                }
            }
            R(i, j) = std::max(0.0, acc);
        }
    }
    return RateMatrix(std::move(R));
}

RateMatrix spin_rate_matrix(SpinQuantum j, const SpinRates& rates)
{
    if (!(rates.gamma_plus >= 0.0) || !(rates.gamma_minus >= 0.0)) {
        throw InvalidArgument("spin_rate_matrix: rates must be non-negative");
    }
    const int d = j.dim();
    const double jj = j.value();
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(d, d);
    for (int a = 0; a + 1 < d; ++a) {
        const double mq = -jj + a;
        const double c2 = jj * (jj + 1.0) - mq * (mq + 1.0);
        R(a + 1, a) = rates.gamma_plus * c2;
        R(a, a + 1) = rates.gamma_minus * c2;
    }
    return RateMatrix(std::move(R));
}

//---------------------------------------------------------------------------//
DetailedBalanceReport check_local_detailed_balance(const RateMatrix& R, const LevelSystem& levels, double beta,
                                                   double tol)
{
    if (R.dim() != levels.dim()) {
        throw InvalidArgument("detailed balance: rate matrix and levels differ in dimension");
    }
    if (!std::isfinite(beta)) {
        throw InvalidArgument("detailed balance: beta must be finite");
    }
    constexpr double tiny = 1e-300;
    DetailedBalanceReport rep;
    const int d = R.dim();
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            const double rij = R(i, j);
            const double rji = R(j, i);
            const bool zi = rij < tiny;
            const bool zj = rji < tiny;
            if (zi && zj) {
                continue;
            }
            if (zi != zj) {
                if (!rep.one_sided) {
                    rep.one_sided = true;
                    rep.worst_i = i;
                    rep.worst_j = j;
                    rep.max_log_violation = std::numeric_limits<double>::infinity();
                    std::ostringstream msg;
                    msg << "one-sided pair (" << i << ", " << j << "): R_ij = " << rij << ", R_ji = " << rji;
                    rep.message = msg.str();
                }
                continue;
            }
            ++rep.pairs_checked;
            const double v = std::abs(std::log(rij / rji) + beta * (levels.energy(i) - levels.energy(j)));
            if (!rep.one_sided && v > rep.max_log_violation) {
                rep.max_log_violation = v;
                rep.worst_i = i;
                rep.worst_j = j;
            }
        }
    }
    if (rep.pairs_checked == 0 && !rep.one_sided) {
        throw InvalidArgument("detailed balance: no pair with both rates nonzero");
    }
    rep.pass = !rep.one_sided && rep.max_log_violation <= tol;
    if (rep.message.empty()) {
        std::ostringstream msg;
        msg << "max |ln(R_ij/R_ji) + beta(e_i - e_j)| = " << rep.max_log_violation << " at (" << rep.worst_i
            << ", " << rep.worst_j << ")";
        rep.message = msg.str();
    }
    return rep;
}

}  // namespace gascollide
