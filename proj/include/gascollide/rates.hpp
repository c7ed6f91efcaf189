#pragma once

#include <string>

#include <Eigen/Dense>

#include "gascollide/gas.hpp"
#include "gascollide/level_system.hpp"
#include "gascollide/quadrature.hpp"
#include "gascollide/scattering.hpp"

namespace gascollide {

/*!
 * Classical transition rates between system levels, R(i, j) = rate j -> i.
 *
 * Off-diagonal entries are non-negative and the diagonal is zero; outflow is
 * added when the Markov generator is built.
 */
class RateMatrix
{
  public:
    explicit RateMatrix(Eigen::MatrixXd R);

    int dim() const { return static_cast<int>(R_.rows()); }
    double operator()(int i, int j) const { return R_(i, j); }
    const Eigen::MatrixXd& matrix() const { return R_; }

    // G = R - diag(column sums), so dP/dt = G P.
    Eigen::MatrixXd generator() const;

  private:
    Eigen::MatrixXd R_;
};

/*!
 * e^s int_{max(0,s)}^inf e^{-(2+alpha) z} sinh(2 sqrt(z) sqrt(z - s)) dz.
 *
 * The sinh is folded into the exponential so |s| up to several hundred does
 * not overflow. Evaluated to relative accuracy 1e-9.
 */
double integral_I(double alpha, double s);

struct SpinRates
{
    double gamma_plus;
    double gamma_minus;
};

/*!
 * Ladder rates of a spin in a gas of two-level ancillas with gap
 * hbar*(omega_S + Delta).
 */
SpinRates spin_rates(const GasEnvironment& env, const InteractionSpec& spec, double omega_S, double Delta);

/*!
 * Temperature at which the spin rates satisfy detailed balance.
 *
 * Negative values mean population inversion. When the denominator
 * omega_A T_M - Delta T_A vanishes the temperature is infinite, which is
 * reported through `infinite` rather than as a division by zero.
 */
struct EffectiveTemperature
{
    bool infinite = false;
    double value = 0.0;  // meaningful only when finite

    // 1/(kB T); zero for infinite temperature.
    double beta(double kB = 1.0) const { return infinite ? 0.0 : 1.0 / (kB * value); }
};

EffectiveTemperature effective_temperature(double omega_S, double Delta, double T_A, double T_M);

/*!
 * Generic rates from a momentum-space integral over the amplitude model.
 *
 * For every (i, j) the ancilla pairs (k, l) are summed with the Gibbs weight of
 * l; the incoming momentum is integrated radially in z = beta p^2 / 2m and the
 * scattering direction over the angle relative to p. Channels with identically
 * vanishing amplitude contribute an exact zero. Throws NumericFailure naming
 * the channel if an integral does not converge.
 */
RateMatrix rate_matrix(const LevelSystem& levels, const AmplitudeModel& model, const GasEnvironment& env,
                       const QuadratureSpec& quad);

// Nearest-neighbour ladder: R(m+1, m) = G+ c_m^2, R(m, m+1) = G- c_m^2.
RateMatrix spin_rate_matrix(SpinQuantum j, const SpinRates& rates);

struct DetailedBalanceReport
{
    double max_log_violation = 0.0;
    bool pass = false;
    int worst_i = -1;
    int worst_j = -1;
    // Set when a pair has one direction zero and the other not.
    bool one_sided = false;
    int pairs_checked = 0;
    std::string message;
};

/*!
 * max over level pairs of |ln(R_ij / R_ji) + beta (e_i - e_j)|.
 *
 * Pairs where both rates are below 1e-300 are skipped. A one-sided pair fails
 * the check outright. At least one two-sided pair is required.
 */
DetailedBalanceReport check_local_detailed_balance(const RateMatrix& R, const LevelSystem& levels, double beta,
                                                   double tol = 1e-7);

}  // namespace gascollide
