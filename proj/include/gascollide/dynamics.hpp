#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "gascollide/integrator.hpp"
#include "gascollide/qmath.hpp"
#include "gascollide/rates.hpp"

namespace gascollide {

/*!
 * Level populations: entries >= -1e-12, sum within 1e-10 of one.
 */
class PopulationVector
{
  public:
    explicit PopulationVector(Eigen::VectorXd p);

    int dim() const { return static_cast<int>(p_.size()); }
    double operator()(int i) const { return p_(i); }
    const Eigen::VectorXd& values() const { return p_; }

  private:
    Eigen::VectorXd p_;
};

/*!
 * Recorded states on a time grid plus named observable series.
 */
template<class State>
struct Trajectory
{
    std::vector<double> times;
    std::vector<State> states;
    std::map<std::string, std::vector<double>> observables;

    std::size_t size() const { return times.size(); }

    void add_observable(const std::string& name, std::vector<double> values)
    {
        if (values.size() != times.size()) {
            throw InvalidArgument("trajectory: observable '" + name + "' has the wrong length");
        }
        observables[name] = std::move(values);
    }
};

struct LindbladChannel
{
    double rate;
    Operator op;
};

/*!
 * drho/dt = -(i/hbar)[h, rho] + sum_c rate_c D[L_c] rho.
 *
 * Operators are held sparse: the spin ladder has at most three nonzeros per
 * row, which keeps large-J trajectories cheap.
 */
class LindbladGenerator
{
  public:
    LindbladGenerator(Operator h, std::vector<LindbladChannel> channels, double hbar = 1.0);

    int dim() const { return dim_; }
    const Operator& hamiltonian() const { return h_; }
    const std::vector<LindbladChannel>& channels() const { return channels_; }

    // Full right-hand side.
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;

    // Dissipative part C rho only.
    Eigen::MatrixXcd dissipative(const Eigen::MatrixXcd& rho) const;

    // Smallest positive channel rate, or 0 when every rate vanishes.
    double min_positive_rate() const;

  private:
    using Sparse = Eigen::SparseMatrix<Complex>;

    int dim_;
    Operator h_;
    std::vector<LindbladChannel> channels_;
    Sparse k_;           // -(i/hbar) h - 1/2 sum rate L^dag L
    Sparse k_adj_;
    Sparse k_dis_;       // dissipative part of k_
    Sparse k_dis_adj_;
    std::vector<Sparse> l_;
    std::vector<Sparse> l_adj_;
    std::vector<double> rates_;
};

/*!
 * Lindblad form of a classical rate matrix: h = diag(energies) and one jump
 * |i><j| at rate R(i, j) per nonzero entry. On diagonal states it reproduces
 * the population equation exactly.
 */
LindbladGenerator classical_generator(const RateMatrix& R, const LevelSystem& levels);

// Recorded-state tolerances for integrator output.
inline constexpr StateTolerance kTrajectoryTolerance{1e-8, 1e-8, -1e-7};

/*!
 * Integrates the Lindblad equation and records the state on t_grid
 * (ascending, starting at 0).
 *
 * Every recorded state is re-validated; the first violation throws
 * NumericFailure carrying the time.
 */
Trajectory<DensityMatrix> evolve_lindblad(const LindbladGenerator& gen, const DensityMatrix& rho0,
                                          const std::vector<double>& t_grid, const OdeOptions& opt = {});

Trajectory<DensityMatrix> evolve_lindblad(const Operator& h, const std::vector<LindbladChannel>& channels,
                                          const DensityMatrix& rho0, const std::vector<double>& t_grid,
                                          const OdeOptions& opt = {});

// Tolerances tuned for population equations where absolute values span many decades.
inline OdeOptions population_ode_options()
{
    OdeOptions o;
    o.rtol = 1e-10;
    o.atol = 1e-14;
    return o;
}

/*!
 * dP_i/dt = sum_j (R_ij P_j - R_ji P_i).
 *
 * Throws NumericFailure when probability drifts by more than 1e-10 or a
 * population drops below -1e-12.
 */
Trajectory<PopulationVector> evolve_populations(const RateMatrix& R, const PopulationVector& P0,
                                                const std::vector<double>& t_grid,
                                                const OdeOptions& opt = population_ode_options());

struct SteadyStateOptions
{
    double tol = 1e-10;
    // Integration horizon; 0 means 50 / (smallest positive rate).
    double horizon = 0.0;
    // Defaults to the maximally mixed state.
    std::optional<DensityMatrix> initial;
    // Tight by default: the stopping test looks at the derivative, which
    // amplifies integration noise in the fast modes.
    OdeOptions ode{.rtol = 1e-12, .atol = 1e-14};
};

/*!
 * Integrates until ||drho/dt||_F < tol and returns the final state.
 *
 * Throws NumericFailure with the residual if the horizon is exhausted.
 */
DensityMatrix steady_state(const LindbladGenerator& gen, const SteadyStateOptions& opt = {});

// Equally spaced grid 0, t_max/(n-1), ..., t_max.
std::vector<double> uniform_grid(double t_max, int n_samples);

}  // namespace gascollide
