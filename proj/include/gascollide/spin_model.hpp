#pragma once

#include "gascollide/dynamics.hpp"
#include "gascollide/gas.hpp"
#include "gascollide/level_system.hpp"
#include "gascollide/rates.hpp"
#include "gascollide/scattering.hpp"

namespace gascollide {

/*!
 * Dimensionless parameters of a spin in a gas of detuned two-level particles.
 *
 * D = hbar Delta / kB T_M, A = hbar omega_A / kB T_A, alpha = E_R / kB T_M.
 */
struct SpinScenario
{
    SpinQuantum J{1};
    double D = 1.0;
    double A = 1.0;
    double alpha = 1.0;
    double omega_S_over_ER = 1.0;
    double gamma_tilde = 1.0;  // in units of E_R / hbar

    // Equilibrium gas (T_A = T_M) for the given D: A = alpha omega_S/E_R + D.
    static SpinScenario equilibrium(SpinQuantum J, double D, double alpha, double omega_S_over_ER,
                                    double gamma_tilde = 1.0);
};

/*!
 * Physical model behind a SpinScenario, in units hbar = kB = m = E_R = 1.
 *
 * The ancilla levels are {0, hbar omega_A}; V0 = 1 and the density is chosen
 * to produce the requested gamma_tilde.
 */
struct SpinModel
{
    SpinScenario scenario;
    double omega_S;
    double Delta;
    double omega_A;
    GasEnvironment env;
    InteractionSpec interaction;
    LevelSystem levels;  // hbar omega_S m
    DerivedScales scales;
    SpinRates rates;
    EffectiveTemperature T_eff;

    // Lindblad generator with time in units of 1/gamma_tilde.
    LindbladGenerator generator() const;

    // Jz: system energy in units of hbar omega_S.
    Operator energy_operator() const;

    // Inverse effective temperature in units of 1/(hbar omega_S).
    double beta_eff() const;

    AmplitudeModel amplitude_model() const;
};

SpinModel build_spin_model(const SpinScenario& sc);

}  // namespace gascollide
