#include "doctest.h"

#include <cmath>

#include "gascollide/errors.hpp"
#include "gascollide/dynamics.hpp"
#include "gascollide/integrator.hpp"
#include "gascollide/spin_model.hpp"
#include "support.hpp"

using namespace gascollide;
using namespace gascollide::testing;

namespace {

Operator sigma_minus()
{
    Operator s = Operator::Zero(2, 2);
    s(0, 1) = 1.0;
    return s;
}

Eigen::VectorXd null_vector(const Eigen::MatrixXd& G)
{
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
    Eigen::VectorXd v = lu.kernel().col(0);
    return v / v.sum();
}

}  // namespace

TEST_CASE("ode integrator")
{
    // y' = -y + cos t, exact y = (cos t + sin t)/2 + (y0 - 1/2) e^{-t}
    auto f = [](double t, const Eigen::VectorXd& y) -> Eigen::VectorXd {
        return -y + Eigen::VectorXd::Constant(1, std::cos(t));
    };
    const std::vector<double> grid = uniform_grid(10.0, 21);
    for (auto method : {OdeOptions::Method::dormand_prince, OdeOptions::Method::rk4}) {
        OdeOptions opt;
        opt.method = method;
        opt.rtol = opt.atol = 1e-11;
        std::vector<double> seen;
        integrate_ode(f, Eigen::VectorXd(Eigen::VectorXd::Constant(1, 2.0)), grid, opt,
                      [&](std::size_t n, double t, const Eigen::VectorXd& y) {
                          CHECK(t == grid[n]);
                          const double exact = 0.5 * (std::cos(t) + std::sin(t)) + 1.5 * std::exp(-t);
                          CHECK(std::abs(y(0) - exact) <= 1e-9);
                          seen.push_back(t);
                      });
        CHECK(seen.size() == grid.size());
    }

    OdeOptions tiny;
    tiny.max_steps = 3;
    CHECK_THROWS_AS(integrate_ode(f, Eigen::VectorXd(Eigen::VectorXd::Constant(1, 2.0)), grid, tiny,
                                  [](std::size_t, double, const Eigen::VectorXd&) {}),
                    NumericFailure);
    OdeOptions bad;
    bad.rtol = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("lindblad evolution: closed-form cases")
{
    SUBCASE("no channels and a diagonal state stay put")
    {
        const Operator h = LevelSystem({0.0, 0.5, 2.0}).hamiltonian();
        Eigen::VectorXd p(3);
        p << 0.5, 0.3, 0.2;
        const auto traj = evolve_lindblad(h, {}, DensityMatrix::from_populations(p), uniform_grid(10.0, 11));
        for (const auto& rho : traj.states) {
            CHECK((rho.matrix() - DensityMatrix::from_populations(p).matrix()).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }

    SUBCASE("qubit decay follows e^{-gamma t}")
    {
        const double gamma = 0.7;
        const Operator h = LevelSystem({0.0, 1.0}).hamiltonian();
        Eigen::VectorXd excited(2);
        excited << 0.0, 1.0;
        const auto traj = evolve_lindblad(h, {{gamma, sigma_minus()}}, DensityMatrix::from_populations(excited),
                                          uniform_grid(8.0, 81));
        for (std::size_t n = 0; n < traj.size(); ++n) {
            CHECK(std::abs(traj.states[n].populations()(1) - std::exp(-gamma * traj.times[n])) <= 1e-6);
        }
    }

    SUBCASE("coherence decays at half the rate and rotates")
    {
        const double gamma = 0.4, w = 2.0;
        const Operator h = LevelSystem({0.0, w}).hamiltonian();
        Eigen::VectorXcd plus(2);
        plus << 1.0, 1.0;
        const auto traj = evolve_lindblad(h, {{gamma, sigma_minus()}}, DensityMatrix::pure(plus), uniform_grid(5.0, 51));
        for (std::size_t n = 0; n < traj.size(); ++n) {
            const double t = traj.times[n];
            const Complex expected = 0.5 * std::exp(Complex(-0.5 * gamma, w) * t);
            CHECK(std::abs(traj.states[n].matrix()(0, 1) - expected) <= 1e-7);
        }
    }

    CHECK_THROWS_AS(evolve_lindblad(Operator::Identity(2, 2), {}, DensityMatrix::maximally_mixed(2), {0.5, 1.0}),
                    InvalidArgument);
    CHECK_THROWS_AS(LindbladGenerator(Operator::Identity(2, 2), {{-1.0, sigma_minus()}}), InvalidArgument);
}

TEST_CASE("an unstable integration is reported with the time of failure")
{
    // fixed-step RK4 far outside its stability region
    const LindbladGenerator gen(LevelSystem({0.0, 1.0}).hamiltonian(), {{1000.0, sigma_minus()}});
    OdeOptions opt;
    opt.method = OdeOptions::Method::rk4;
    opt.rk4_step = 0.01;
    Eigen::VectorXd excited(2);
    excited << 0.0, 1.0;
    try {
        evolve_lindblad(gen, DensityMatrix::from_populations(excited), uniform_grid(1.0, 101), opt);
        FAIL("expected a numeric failure");
    } catch (const NumericFailure& e) {
        CHECK(e.where() > 0.0);
        CHECK(e.where() <= 1.0);
    }
}

TEST_CASE("population equation")
{
    SUBCASE("symmetric two-level chain goes to one half")
    {
        Eigen::MatrixXd R(2, 2);
        R << 0.0, 0.3, 0.3, 0.0;
        Eigen::VectorXd p(2);
        p << 1.0, 0.0;
        const auto traj = evolve_populations(RateMatrix(R), PopulationVector(p), uniform_grid(100.0, 11));
        CHECK(traj.states.back()(0) == doctest::Approx(0.5).epsilon(1e-10));
    }

    SUBCASE("detailed-balanced rates keep the gibbs populations")
    {
        const LevelSystem levels({0.0, 0.6, 1.1});
        const double beta = 1.3;
        Eigen::MatrixXd R = Eigen::MatrixXd::Zero(3, 3);
        Rng rng(1);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < i; ++j) {
                const double k = uniform(rng, 0.1, 2.0);
                R(i, j) = k * std::exp(-beta * (levels.energy(i) - levels.energy(j)) / 2);
                R(j, i) = k * std::exp(beta * (levels.energy(i) - levels.energy(j)) / 2);
            }
        }
        const Eigen::VectorXd g = gibbs_state(levels.hamiltonian(), beta).populations();
        const auto traj = evolve_populations(RateMatrix(R), PopulationVector(g), uniform_grid(20.0, 21));
        for (const auto& p : traj.states) {
            CHECK((p.values() - g).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }

    SUBCASE("generic chains relax to the null vector of the generator")
    {
        Rng rng(77);
        for (int trial = 0; trial < 20; ++trial) {
            Eigen::MatrixXd R = Eigen::MatrixXd::Zero(3, 3);
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    if (i != j) {
                        R(i, j) = uniform(rng, 0.2, 2.0);
                    }
                }
            }
            const RateMatrix rm(R);
            const auto traj = evolve_populations(rm, PopulationVector(random_populations(rng, 3)), uniform_grid(200.0, 3));
            CHECK((traj.states.back().values() - null_vector(rm.generator())).cwiseAbs().maxCoeff() <= 1e-8);
        }
    }

    CHECK_THROWS_AS(PopulationVector((Eigen::VectorXd(2) << 0.5, 0.6).finished()), InvalidArgument);
    CHECK_THROWS_AS(PopulationVector((Eigen::VectorXd(2) << 1.1, -0.1).finished()), InvalidArgument);
}

TEST_CASE("populations from the rate equation match the lindblad diagonal")
{
    const SpinScenario sc{SpinQuantum(6), 1.0, 1.8, 1.0, 0.5, 1.0};
    const SpinModel m = build_spin_model(sc);
    const RateMatrix R = spin_rate_matrix(sc.J, {m.rates.gamma_plus / m.scales.gamma_tilde,
                                                 m.rates.gamma_minus / m.scales.gamma_tilde});
    Rng rng(3);
    const Eigen::VectorXd p0 = random_populations(rng, 7);
    const auto grid = uniform_grid(10.0, 51);
    const auto pops = evolve_populations(R, PopulationVector(p0), grid);
    OdeOptions tight;
    tight.rtol = tight.atol = 1e-11;
    const auto full = evolve_lindblad(m.generator(), DensityMatrix::from_populations(p0), grid, tight);
    for (std::size_t n = 0; n < grid.size(); ++n) {
        CHECK((full.states[n].populations() - pops.states[n].values()).cwiseAbs().maxCoeff() <= 1e-7);
    }
}

TEST_CASE("off-diagonal elements decohere")
{
    const SpinScenario sc = SpinScenario::equilibrium(SpinQuantum(4), 1.0, 1.0, 0.5);
    const SpinModel m = build_spin_model(sc);
    Rng rng(19);
    const DensityMatrix rho0 = random_density(rng, 5);
    const auto traj = evolve_lindblad(m.generator(), rho0, uniform_grid(20.0, 41));
    // l1 norm of coherences is a contraction under this phase-covariant dynamics
    double first = -1.0, last = 1e300;
    for (const auto& rho : traj.states) {
        Eigen::MatrixXcd off = rho.matrix();
        off.diagonal().setZero();
        const double l1 = off.cwiseAbs().sum();
        CHECK(l1 <= last * (1.0 + 1e-9) + 1e-12);
        last = l1;
        if (first < 0.0) {
            first = l1;
        }
    }
    CHECK(last < 0.5 * first);
}

TEST_CASE("steady states")
{
    SUBCASE("pure decay ends in the ground state")
    {
        const LindbladGenerator gen(LevelSystem({0.0, 1.0}).hamiltonian(), {{1.0, sigma_minus()}});
        const DensityMatrix ss = steady_state(gen);
        CHECK(ss.matrix()(0, 0).real() == doctest::Approx(1.0).epsilon(1e-9));
    }

    SUBCASE("equilibrium gas gives the gibbs state, independent of start")
    {
        // The stopping test bounds ||d rho/dt||, so the distance to the true
        // fixed point is about tol / gap; this scenario has a gap near 0.15.
        const SpinScenario sc = SpinScenario::equilibrium(SpinQuantum(4), 0.0, 1.0, 0.5);
        const SpinModel m = build_spin_model(sc);
        const auto gen = m.generator();
        const DensityMatrix a = steady_state(gen);
        Rng rng(8);
        SteadyStateOptions opt;
        opt.initial = random_density(rng, 5);
        const DensityMatrix b = steady_state(gen, opt);
        CHECK(trace_distance(a.matrix(), b.matrix()) <= 1e-9);
        const DensityMatrix g = gibbs_state(m.energy_operator(), m.beta_eff());
        CHECK(trace_distance(a.matrix(), g.matrix()) <= 1e-8);
    }

    SUBCASE("cold motion inverts the populations")
    {
        // T_M below Delta T_A / (omega_S + Delta)
        const SpinScenario sc{SpinQuantum(4), 3.0, 1.5, 1.0, 0.5, 1.0};
        const SpinModel m = build_spin_model(sc);
        REQUIRE_FALSE(m.T_eff.infinite);
        REQUIRE(m.T_eff.value < 0.0);
        const DensityMatrix ss = steady_state(m.generator());
        const Eigen::VectorXd p = ss.populations();
        for (int i = 1; i < 5; ++i) {
            CHECK(p(i) > p(i - 1));
        }
        CHECK(trace_distance(ss.matrix(), gibbs_state(m.energy_operator(), m.beta_eff()).matrix()) <= 1e-8);
    }

    const LindbladGenerator frozen(Operator::Identity(2, 2), {});
    CHECK_THROWS_AS(steady_state(frozen), InvalidArgument);

    SteadyStateOptions short_run;
    short_run.horizon = 1e-3;
    const LindbladGenerator slow(LevelSystem({0.0, 1.0}).hamiltonian(), {{1.0, sigma_minus()}});
    CHECK_THROWS_AS(steady_state(slow, short_run), NumericFailure);
}

TEST_CASE("classical generator reproduces the population equation")
{
    const LevelSystem levels({0.0, 0.5, 1.2});
    Eigen::MatrixXd R(3, 3);
    R << 0.0, 0.4, 0.1, 0.7, 0.0, 0.3, 0.2, 0.6, 0.0;
    const RateMatrix rm(R);
    const LindbladGenerator gen = classical_generator(rm, levels);
    Rng rng(2);
    const Eigen::VectorXd p = random_populations(rng, 3);
    const Eigen::MatrixXcd drho = gen.apply(DensityMatrix::from_populations(p).matrix());
    CHECK((drho.diagonal().real() - rm.generator() * p).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(gen.min_positive_rate() == doctest::Approx(0.1));
}
