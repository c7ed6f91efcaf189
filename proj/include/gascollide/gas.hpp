#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gascollide/qmath.hpp"

namespace gascollide {

/*!
 * Thermal gas of particles with internal (ancilla) levels.
 *
 * Ancilla populations are Gibbs weights at T_A, the motion is Maxwell-Boltzmann
 * at T_M. The library runs with hbar = kB = m = 1 by default, but every
 * formula keeps the constants explicit.
 */
struct GasEnvironment
{
    std::vector<double> ancilla_energies;
    double T_A = 1.0;
    double T_M = 1.0;
    double density = 1.0;
    double mass = 1.0;
    double hbar = 1.0;
    double kB = 1.0;

    // Throws InvalidArgument. A zero density is accepted (no collisions).
    void validate() const;

    double beta_motion() const { return 1.0 / (kB * T_M); }
    double beta_ancilla() const { return 1.0 / (kB * T_A); }
    int ancilla_dim() const { return static_cast<int>(ancilla_energies.size()); }
};

/*!
 * Coupling tensor v_{ij}^{kl} = <e_i, a_k| v |e_j, a_l>.
 *
 * Stored as a joint (system x ancilla) matrix with row index i*dA + k and
 * column index j*dA + l; i,j are system levels, k,l ancilla levels, and the
 * first index of each pair is the outgoing one.
 */
class CouplingTensor
{
  public:
    CouplingTensor(int system_dim, int ancilla_dim, Eigen::MatrixXcd joint);

    // system_op (x) ancilla_op
    static CouplingTensor product(const Operator& system_op, const Operator& ancilla_op);

    // J+ (x) sigma- + J- (x) sigma+, ancilla level 0 = ground.
    static CouplingTensor spin_exchange(SpinQuantum j);

    Complex operator()(int i, int j, int k, int l) const
    {
        return joint_(i * ancilla_dim_ + k, j * ancilla_dim_ + l);
    }

    int system_dim() const { return system_dim_; }
    int ancilla_dim() const { return ancilla_dim_; }
    const Eigen::MatrixXcd& joint() const { return joint_; }

    CouplingTensor operator*(Complex c) const;

  private:
    int system_dim_;
    int ancilla_dim_;
    Eigen::MatrixXcd joint_;
};

// V = V0 v (x) exp(-x^2 / 2R^2)
struct InteractionSpec
{
    double V0;
    double R;
    CouplingTensor coupling;

    // Positive R, finite V0, Hermitian coupling (1e-12).
    void validate() const;
};

struct DerivedScales
{
    double E_R;          // hbar^2 / 2 m R^2
    double p_R;          // hbar / R
    double lambda_th;    // sqrt(2 pi hbar^2 / m kB T_M)
    double gamma_tilde;  // n lambda_th^3 V0^2 / (2 hbar E_R)
};

double maxwell_boltzmann(const GasEnvironment& env, const Vec3& p);

// Gibbs weights at T_A, shift-invariant in the energies.
Eigen::VectorXd ancilla_populations(const GasEnvironment& env);

DerivedScales derived_scales(const GasEnvironment& env, const InteractionSpec& spec);

}  // namespace gascollide
