#include "gascollide/spin_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gascollide/errors.hpp"

namespace gascollide {

SpinScenario SpinScenario::equilibrium(SpinQuantum J, double D, double alpha, double omega_S_over_ER,
                                       double gamma_tilde)
{
    return {J, D, alpha * omega_S_over_ER + D, alpha, omega_S_over_ER, gamma_tilde};
}

SpinModel build_spin_model(const SpinScenario& sc)
{
    auto finite = [](double x) { return std::isfinite(x); };
    if (!finite(sc.D) || !finite(sc.A) || !finite(sc.alpha) || !finite(sc.omega_S_over_ER) ||
        !finite(sc.gamma_tilde)) {
        throw InvalidArgument("spin scenario: parameters must be finite");
    }
    if (!(sc.alpha > 0.0)) {
        throw InvalidArgument("spin scenario: alpha must be positive");
    }
    if (!(sc.omega_S_over_ER > 0.0)) {
        throw InvalidArgument("spin scenario: omega_S_over_ER must be positive");
    }
    if (!(sc.gamma_tilde > 0.0)) {
        throw InvalidArgument("spin scenario: gamma_tilde must be positive");
    }
    const double T_M = 1.0 / sc.alpha;
    const double omega_S = sc.omega_S_over_ER;
    const double Delta = sc.D * T_M;
    const double omega_A = omega_S + Delta;
    if (!(omega_A > 0.0)) {
        std::ostringstream msg;
        msg << "spin scenario: ancilla gap omega_S + Delta = " << omega_A << " must be positive";
        throw InvalidArgument(msg.str());
    }
    if (!(sc.A > 0.0)) {
        throw InvalidArgument("spin scenario: A must be positive (finite ancilla temperature)");
    }
    const double T_A = omega_A / sc.A;

    GasEnvironment env;
    env.ancilla_energies = {0.0, omega_A};
    env.T_A = T_A;
    env.T_M = T_M;
    const double R = 1.0 / std::numbers::sqrt2;  // E_R = 1
    const double lambda_th = std::sqrt(2.0 * std::numbers::pi / T_M);
    env.density = 2.0 * sc.gamma_tilde / std::pow(lambda_th, 3);
    env.validate();

    InteractionSpec spec{1.0, R, CouplingTensor::spin_exchange(sc.J)};
    const DerivedScales scales = derived_scales(env, spec);
    const SpinRates rates = spin_rates(env, spec, omega_S, Delta);
    const EffectiveTemperature T_eff = effective_temperature(omega_S, Delta, T_A, T_M);

    return SpinModel{sc,     omega_S, Delta, omega_A, env, spec, LevelSystem::spin_ladder(sc.J, omega_S),
                     scales, rates,   T_eff};
}

LindbladGenerator SpinModel::generator() const
{
    const SpinOperators s = spin_operators(scenario.J);
    const double g = scales.gamma_tilde;
    return LindbladGenerator((omega_S / g) * s.jz,
                             {{rates.gamma_plus / g, s.jplus}, {rates.gamma_minus / g, s.jminus}});
}

Operator SpinModel::energy_operator() const
{
    return spin_operators(scenario.J).jz;
}

double SpinModel::beta_eff() const
{
    return T_eff.infinite ? 0.0 : omega_S / T_eff.value;
}

AmplitudeModel SpinModel::amplitude_model() const
{
    return AmplitudeModel::born_gaussian(interaction, env, levels);
}

}  // namespace gascollide
