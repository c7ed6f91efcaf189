#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gascollide/dynamics.hpp"
#include "gascollide/level_system.hpp"
#include "gascollide/qmath.hpp"

namespace gascollide {

struct ThermoSample
{
    double t = 0.0;
    double E_S = 0.0;
    double Q_dot = 0.0;
    double S = 0.0;
    double S_dot = 0.0;              // NaN when the state is too close to singular
    double clausius_residual = 0.0;  // S_dot - beta Q_dot, NaN with S_dot
    double ergotropy = 0.0;
};

// tr(h_S C rho); the collision-induced Hamiltonian is not part of h_S.
double heat_power(const Operator& h_S, const Eigen::MatrixXcd& c_rho);

/*!
 * -tr(C rho ln rho).
 *
 * Empty when the smallest eigenvalue of rho is at or below `min_eigenvalue`,
 * where the logarithm is dominated by noise.
 */
std::optional<double> entropy_rate(const DensityMatrix& rho, const Eigen::MatrixXcd& c_rho,
                                   double min_eigenvalue = 1e-12);

struct ClausiusReport
{
    double min_residual = 0.0;
    double max_abs_entropy_rate = 0.0;
    bool pass = false;
    std::vector<double> residuals;  // NaN for skipped samples
    std::vector<std::size_t> skipped;
    std::string note;
};

/*!
 * Checks S_dot >= beta Q_dot along a trajectory generated by `gen`.
 *
 * Passes iff min residual >= -1e-8 max(max |S_dot|, 1). Samples with a
 * near-singular state are skipped and listed.
 */
ClausiusReport entropy_production_check(const Trajectory<DensityMatrix>& traj, const LindbladGenerator& gen,
                                        const Operator& h_S, double beta);

// Sum_i e_i (P_i - P_i^desc); zero exactly when P is already non-increasing.
double ergotropy_diagonal(const LevelSystem& levels, const PopulationVector& P);

// tr(h rho) - sum_i e_i^asc lambda_i^desc.
double ergotropy_general(const Operator& h_S, const DensityMatrix& rho);

/*!
 * Thermodynamic series along a trajectory.
 *
 * Also stores them as observables E_S, S, Q_dot, S_dot, clausius_residual and
 * ergotropy on the trajectory.
 */
std::vector<ThermoSample> annotate(Trajectory<DensityMatrix>& traj, const LindbladGenerator& gen,
                                   const Operator& h_S, double beta);

}  // namespace gascollide
