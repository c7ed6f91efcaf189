#pragma once

#include <complex>
#include <optional>
#include <string>

#include <Eigen/Dense>

namespace gascollide {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using Vec3 = Eigen::Vector3d;

//---------------------------------------------------------------------------//
/*!
 * Total spin quantum number, stored as the integer 2J so half-integers are exact.
 */
class SpinQuantum
{
  public:
    explicit SpinQuantum(int twice_j);

    // Accepts 0.5, 1, 1.5, ...; anything else is an InvalidArgument.
    static SpinQuantum from_value(double j);

    int twice_j() const { return twice_j_; }
    double value() const { return 0.5 * twice_j_; }
    int dim() const { return twice_j_ + 1; }

  private:
    int twice_j_;
};

struct SpinOperators
{
    Operator jz;
    Operator jplus;
    Operator jminus;
};

// Basis ordered m = -J..+J, i.e. ascending Jz.
SpinOperators spin_operators(SpinQuantum j);

//---------------------------------------------------------------------------//
struct StateTolerance
{
    double hermiticity = 1e-12;
    double trace = 1e-10;
    double min_eigenvalue = -1e-10;
};

/*!
 * Hermitian, unit-trace, positive semidefinite matrix.
 *
 * The constructor checks all three invariants against the given tolerances and
 * throws InvalidArgument on the first violation. Integrator output uses looser
 * tolerances than hand-built states, hence the parameter.
 */
class DensityMatrix
{
  public:
    explicit DensityMatrix(Eigen::MatrixXcd rho, StateTolerance tol = {});

    static DensityMatrix maximally_mixed(int dim);
    static DensityMatrix from_populations(const Eigen::VectorXd& populations);
    static DensityMatrix pure(const Eigen::VectorXcd& psi);

    int dim() const { return static_cast<int>(rho_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return rho_; }
    Eigen::VectorXd populations() const { return rho_.diagonal().real(); }

  private:
    Eigen::MatrixXcd rho_;
};

// Returns a description of the first violated invariant, or nothing.
std::optional<std::string>
check_state(const Eigen::MatrixXcd& rho, const StateTolerance& tol);

//---------------------------------------------------------------------------//
// D[L]rho = L rho L^dag - 1/2 {L^dag L, rho}
Eigen::MatrixXcd dissipator(const Operator& L, const Eigen::MatrixXcd& rho);
Eigen::MatrixXcd dissipator(const Operator& L, const DensityMatrix& rho);

Eigen::MatrixXcd commutator(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// max_ij |A_ij - conj(A_ji)|
double hermiticity_defect(const Eigen::MatrixXcd& a);

struct EigenSystem
{
    Eigen::VectorXd values;    // ascending
    Eigen::MatrixXcd vectors;  // columns, unitary
};

/*!
 * Eigen-decomposition of a Hermitian operator.
 *
 * Defects up to 1e-10 (relative to max(1, max|A_ij|)) are symmetrized away
 * before decomposition; larger defects are an InvalidArgument.
 */
EigenSystem eigh(const Operator& a);

// Eigenvalues below 1e-14 contribute nothing.
double von_neumann_entropy(const DensityMatrix& rho);

// 1/2 sum |eig(a - b)|
double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// exp(-beta h) / Z for any Hermitian h; beta may be negative.
DensityMatrix gibbs_state(const Operator& h, double beta);

}  // namespace gascollide
