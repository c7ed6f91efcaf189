#include "gascollide/gas.hpp"

#include <cmath>
#include <numbers>

#include "gascollide/errors.hpp"

namespace gascollide {

void GasEnvironment::validate() const
{
    if (ancilla_energies.empty()) {
        throw InvalidArgument("gas: at least one ancilla level is required");
    }
    for (double e : ancilla_energies) {
        if (!std::isfinite(e)) {
            throw InvalidArgument("gas: non-finite ancilla energy");
        }
    }
    auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
    if (!positive(T_A) || !positive(T_M)) {
        throw InvalidArgument("gas: temperatures must be positive");
    }
    if (!positive(mass) || !positive(hbar) || !positive(kB)) {
        throw InvalidArgument("gas: mass, hbar and kB must be positive");
    }
    if (!std::isfinite(density) || density < 0.0) {
        throw InvalidArgument("gas: density must be non-negative");
    }
}

//---------------------------------------------------------------------------//
CouplingTensor::CouplingTensor(int system_dim, int ancilla_dim, Eigen::MatrixXcd joint)
    : system_dim_(system_dim), ancilla_dim_(ancilla_dim), joint_(std::move(joint))
{
    if (system_dim < 1 || ancilla_dim < 1) {
        throw InvalidArgument("coupling: dimensions must be positive");
    }
    const int n = system_dim * ancilla_dim;
    if (joint_.rows() != n || joint_.cols() != n) {
        throw InvalidArgument("coupling: joint matrix must be (dS*dA) x (dS*dA)");
    }
    if (!joint_.allFinite()) {
        throw InvalidArgument("coupling: non-finite entries");
    }
}

CouplingTensor CouplingTensor::product(const Operator& system_op, const Operator& ancilla_op)
{
    const auto ds = static_cast<int>(system_op.rows());
    const auto da = static_cast<int>(ancilla_op.rows());
    Eigen::MatrixXcd joint(ds * da, ds * da);
    for (int i = 0; i < ds; ++i) {
        for (int j = 0; j < ds; ++j) {
            joint.block(i * da, j * da, da, da) = system_op(i, j) * ancilla_op;
        }
    }
    return CouplingTensor(ds, da, std::move(joint));
}

CouplingTensor CouplingTensor::spin_exchange(SpinQuantum j)
{
    const SpinOperators s = spin_operators(j);
    Operator sigma_minus = Operator::Zero(2, 2);
    sigma_minus(0, 1) = 1.0;
    const Operator sigma_plus = sigma_minus.adjoint();
    const CouplingTensor a = product(s.jplus, sigma_minus);
    const CouplingTensor b = product(s.jminus, sigma_plus);
    return CouplingTensor(a.system_dim(), 2, a.joint() + b.joint());
}

CouplingTensor CouplingTensor::operator*(Complex c) const
{
    return CouplingTensor(system_dim_, ancilla_dim_, joint_ * c);
}

void InteractionSpec::validate() const
{
    if (!std::isfinite(V0)) {
        throw InvalidArgument("interaction: V0 must be finite");
    }
    if (!std::isfinite(R) || R <= 0.0) {
        throw InvalidArgument("interaction: R must be positive");
    }
    if (hermiticity_defect(coupling.joint()) > 1e-12) {
        throw InvalidArgument("interaction: coupling must be Hermitian on the joint space");
    }
}

//---------------------------------------------------------------------------//
double maxwell_boltzmann(const GasEnvironment& env, const Vec3& p)
{
    const double beta = env.beta_motion();
    const double norm = std::pow(beta / (2.0 * std::numbers::pi * env.mass), 1.5);
    return norm * std::exp(-beta * p.squaredNorm() / (2.0 * env.mass));
}

Eigen::VectorXd ancilla_populations(const GasEnvironment& env)
{
    const auto n = static_cast<Eigen::Index>(env.ancilla_energies.size());
    Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(env.ancilla_energies.data(), n);
    Eigen::VectorXd w = (-(e.array() - e.minCoeff()) * env.beta_ancilla()).exp();
    return w / w.sum();
}

DerivedScales derived_scales(const GasEnvironment& env, const InteractionSpec& spec)
{
    DerivedScales s{};
    s.p_R = env.hbar / spec.R;
    s.E_R = env.hbar * env.hbar / (2.0 * env.mass * spec.R * spec.R);
    s.lambda_th = std::sqrt(2.0 * std::numbers::pi * env.hbar * env.hbar / (env.mass * env.kB * env.T_M));
    s.gamma_tilde = env.density * std::pow(s.lambda_th, 3) * spec.V0 * spec.V0 / (2.0 * env.hbar * s.E_R);
    return s;
}

}  // namespace gascollide
