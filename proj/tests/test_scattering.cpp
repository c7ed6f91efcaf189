#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gascollide/errors.hpp"
#include "gascollide/rates.hpp"
#include "gascollide/scattering.hpp"
#include "support.hpp"

using namespace gascollide;
using namespace gascollide::testing;

namespace {

const double kR = 1.0 / std::sqrt(2.0);  // E_R = 1 with hbar = m = 1
const double kForward = -std::sqrt(std::numbers::pi / 2.0) * kR;

GasEnvironment gas(double gap, double density = 1.0)
{
    GasEnvironment env;
    env.ancilla_energies = {0.0, gap};
    env.density = density;
    return env;
}

// Real symmetric coupling on a 3-level system x 2-level ancilla.
CouplingTensor random_real_coupling(Rng& rng)
{
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 6);
    for (int r = 0; r < 6; ++r) {
        for (int c = 0; c <= r; ++c) {
            a(r, c) = a(c, r) = uniform(rng, -1, 1);
        }
    }
    return CouplingTensor(3, 2, a.cast<Complex>());
}

AmplitudeTable born_table(const AmplitudeModel& born, const std::vector<std::array<int, 4>>& keys)
{
    AmplitudeTable t;
    const GasEnvironment& env = born.env();
    for (const auto& [i, j, k, l] : keys) {
        const Channel ch = Channel::make(born.levels(), i, j, k, l);
        AmplitudeTable::Grid g;
        for (int a = 0; a <= 60; ++a) {
            g.p_mag.push_back(0.1 * a);
        }
        for (int b = 0; b <= 40; ++b) {
            g.cos_theta.push_back(-1.0 + 0.05 * b);
        }
        g.values = Eigen::MatrixXcd::Zero(61, 41);
        for (int a = 0; a <= 60; ++a) {
            const double p = g.p_mag[a];
            const double q2 = p * p - 2.0 * env.mass * ch.total_energy(env);
            const double q = std::sqrt(std::max(q2, 0.0));
            for (int b = 0; b <= 40; ++b) {
                g.values(a, b) = born.isotropic(ch, p, q, g.cos_theta[b]);
            }
        }
        t.add_channel({i, j, k, l}, g);
    }
    return t;
}

}  // namespace

TEST_CASE("outgoing momentum")
{
    CHECK(outgoing_momentum(2.0, 0.0, 0.0, 0.0, 1.0) == 2.0);
    // p^2/2 = q^2/2 + E + eps_k - eps_l
    CHECK(outgoing_momentum(2.0, 1.0, 0.0, 0.5, 1.0) == doctest::Approx(std::sqrt(4.0 - 1.0)).epsilon(1e-15));
    CHECK_THROWS_AS(outgoing_momentum(1.0, 1.0, 0.0, 0.0, 1.0), ChannelClosed);
    CHECK_THROWS_AS(outgoing_momentum(1.0, 0.5, 0.0, 0.0, 1.0), ChannelClosed);  // exactly at threshold

    Rng rng(2);
    for (int n = 0; n < 1000; ++n) {
        const double E = uniform(rng, -2, 2), ek = uniform(rng, 0, 2), el = uniform(rng, 0, 2);
        const double m = log_uniform(rng, 0.1, 10);
        const double p = uniform(rng, 0, 6);
        if (p * p - 2.0 * m * (E + ek - el) <= 1e-6) {
            CHECK_THROWS_AS(outgoing_momentum(p, E, ek, el, m), ChannelClosed);
            continue;
        }
        const double q = outgoing_momentum(p, E, ek, el, m);
        CHECK(std::abs(outgoing_momentum(q, -E, el, ek, m) - p) <= 1e-12 * std::max(1.0, p));
    }
}

TEST_CASE("born gaussian amplitude")
{
    const LevelSystem levels({0.0, 0.3});
    const GasEnvironment env = gas(0.5);
    const InteractionSpec spec{1.0, kR, CouplingTensor::product(Operator::Identity(2, 2), Operator::Identity(2, 2))};

    const Channel elastic = Channel::make(levels, 0, 0, 0, 0);
    const Vec3 p(0.0, 0.0, 1.5);
    CHECK(std::abs(born_gaussian_amplitude(spec, env, elastic, p, p) - kForward) < 1e-14);

    // |q - p| = p_R on an elastic channel: q and p at the same length, chord p_R
    const double p_R = 1.0 / kR;
    const double half = std::asin(0.5 * p_R / 1.5);
    const Vec3 q(0.0, 1.5 * std::sin(2 * half), 1.5 * std::cos(2 * half));
    CHECK((q - p).norm() == doctest::Approx(p_R).epsilon(1e-14));
    CHECK(std::abs(born_gaussian_amplitude(spec, env, elastic, q, p)) == doctest::Approx(-kForward * std::exp(-0.5)));

    const InteractionSpec silent{1.0, kR, CouplingTensor(2, 2, Eigen::MatrixXcd::Zero(4, 4))};
    CHECK(born_gaussian_amplitude(silent, env, elastic, q, p) == Complex(0.0));

    const Channel up = Channel::make(levels, 1, 0, 1, 0);  // needs 0.8 of kinetic energy
    CHECK_THROWS_AS(born_gaussian_amplitude(spec, env, up, Vec3(0, 0, 0.1), Vec3(0, 0, 1.0)), ChannelClosed);
    CHECK_THROWS_AS(born_gaussian_amplitude(spec, env, elastic, Vec3(0, 0, 1.2), p), InvalidArgument);
}

TEST_CASE("micro-reversibility of the born model")
{
    Rng rng(17);
    const LevelSystem levels({0.0, 0.4, 1.1});
    for (int trial = 0; trial < 5; ++trial) {
        const InteractionSpec spec{uniform(rng, 0.2, 2.0), kR, random_real_coupling(rng)};
        const auto model = AmplitudeModel::born_gaussian(spec, gas(0.7), levels);
        const auto r = check_microreversibility(model, 2000, 1e-12, 100 + trial);
        CHECK(r.pass);
        CHECK(r.max_violation <= 1e-12);
        CHECK(r.samples_checked > 0);
    }
    const InteractionSpec silent{1.0, kR, CouplingTensor(3, 2, Eigen::MatrixXcd::Zero(6, 6))};
    const auto r = check_microreversibility(AmplitudeModel::born_gaussian(silent, gas(0.7), levels), 500, 1e-12);
    CHECK(r.pass);
    CHECK(r.max_violation == 0.0);
}

TEST_CASE("tabulated amplitudes")
{
    const LevelSystem levels({0.0, 1.0});
    const GasEnvironment env = gas(1.2, 0.1);
    const InteractionSpec spec{1.0, kR, CouplingTensor::spin_exchange(SpinQuantum(1))};
    const auto born = AmplitudeModel::born_gaussian(spec, env, levels);
    AmplitudeTable table = born_table(born, {{1, 0, 0, 1}, {0, 1, 1, 0}});

    SUBCASE("bilinear lookup is exact for bilinear data and flags extrapolation")
    {
        AmplitudeTable t;
        AmplitudeTable::Grid g{{0.0, 1.0, 3.0}, {-1.0, 0.0, 1.0}, Eigen::MatrixXcd(3, 3)};
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                g.values(a, b) = Complex(2.0 * g.p_mag[a] + 3.0 * g.cos_theta[b] + g.p_mag[a] * g.cos_theta[b], 1.0);
            }
        }
        t.add_channel({0, 0, 0, 0}, g);
        const auto in = t.lookup({0, 0, 0, 0}, 2.2, 0.3);
        CHECK(in.value.real() == doctest::Approx(4.4 + 0.9 + 0.66).epsilon(1e-14));
        CHECK_FALSE(in.extrapolated);
        const auto out = t.lookup({0, 0, 0, 0}, 5.0, 0.3);
        CHECK(out.extrapolated);
        CHECK(out.value == t.lookup({0, 0, 0, 0}, 3.0, 0.3).value);
        CHECK(t.lookup({1, 1, 1, 1}, 1.0, 0.0).value == Complex(0.0));
    }

    SUBCASE("csv round trip and malformed input")
    {
        std::ostringstream csv;
        csv << "p_mag,cos_theta,i,j,k,l,re,im\n";
        for (double p : {0.0, 1.0}) {
            for (double c : {-1.0, 1.0}) {
                csv << p << ',' << c << ",0,0,0,0," << p + c << ",0.5\n";
            }
        }
        std::istringstream in(csv.str());
        const AmplitudeTable t = AmplitudeTable::read_csv(in);
        CHECK(t.lookup({0, 0, 0, 0}, 0.5, 0.0).value == Complex(0.5, 0.5));

        std::istringstream bad_header("p,c,i,j,k,l,re,im\n");
        CHECK_THROWS_AS(AmplitudeTable::read_csv(bad_header), InvalidArgument);
        std::istringstream incomplete("p_mag,cos_theta,i,j,k,l,re,im\n0,0,0,0,0,0,1,0\n1,0,0,0,0,0,1,0\n0,1,0,0,0,0,1,0\n");
        CHECK_THROWS_AS(AmplitudeTable::read_csv(incomplete), InvalidArgument);
        std::istringstream garbage("p_mag,cos_theta,i,j,k,l,re,im\n0,x,0,0,0,0,1,0\n");
        CHECK_THROWS_AS(AmplitudeTable::read_csv(garbage), InvalidArgument);
        CHECK_THROWS_AS(AmplitudeTable::read_csv_file("/nonexistent/table.csv"), IoError);
    }

    SUBCASE("a table built from the born model is symmetric to interpolation accuracy")
    {
        const auto model = AmplitudeModel::tabulated(table, env, levels);
        const auto r = check_microreversibility(model, 2000, 5e-2);
        CHECK(r.pass);
        CHECK(r.max_violation > 0.0);
    }

    SUBCASE("rates from the table follow the born rates to interpolation accuracy")
    {
        const auto model = AmplitudeModel::tabulated(table, env, levels);
        const RateMatrix from_table = rate_matrix(levels, model, env, QuadratureSpec{});
        const RateMatrix from_born = rate_matrix(levels, born, env, QuadratureSpec{});
        CHECK(from_table(1, 0) == doctest::Approx(from_born(1, 0)).epsilon(1e-2));
        CHECK(from_table(0, 1) == doctest::Approx(from_born(0, 1)).epsilon(1e-2));
    }

    SUBCASE("a corrupted node is found")
    {
        const std::size_t a = 20, b = 40;
        const Complex v = table.lookup({1, 0, 0, 1}, 2.0, 1.0).value;
        table.set_value({1, 0, 0, 1}, a, b, v + 0.5);
        const auto model = AmplitudeModel::tabulated(table, env, levels);
        const auto r = check_microreversibility(model, 2000, 5e-2);
        CHECK_FALSE(r.pass);
        CHECK(r.max_violation == doctest::Approx(0.5).epsilon(0.02));
        CHECK(r.worst.i == 1);
        CHECK(r.worst.j == 0);
        CHECK(r.worst_p_mag == doctest::Approx(2.0));
        CHECK(r.worst_cos_theta == doctest::Approx(1.0));
    }
}

TEST_CASE("lindblad channel operators")
{
    Rng rng(4);
    const LevelSystem ladder = LevelSystem::spin_ladder(SpinQuantum(4), 0.4);
    const GasEnvironment env = gas(0.9);
    const InteractionSpec exchange{1.0, kR, CouplingTensor::spin_exchange(SpinQuantum(4))};
    const auto model = AmplitudeModel::born_gaussian(exchange, env, ladder);

    SUBCASE("only the two exchange channels survive and each has one entry per ladder step")
    {
        const Vec3 p(0.3, -0.2, 2.5);
        const Vec3 dir = Vec3(0.2, 0.9, -0.3).normalized();
        for (double E : {-0.8, -0.4, 0.0, 0.4, 0.8}) {
            for (int k = 0; k < 2; ++k) {
                for (int l = 0; l < 2; ++l) {
                    const Operator L = lindblad_channel_operator(ladder, model, E, k, l, dir, p);
                    const bool expected = (E == 0.4 && k == 0 && l == 1) || (E == -0.4 && k == 1 && l == 0);
                    CHECK((L.cwiseAbs().maxCoeff() > 0.0) == expected);
                    if (expected) {
                        CHECK((L.array().abs() > 0.0).count() == 4);
                    }
                }
            }
        }
    }

    SUBCASE("nondegenerate levels give at most one nonzero entry")
    {
        const LevelSystem levels({0.0, 0.3, 1.0});
        const InteractionSpec spec{1.0, kR, random_real_coupling(rng)};
        const auto m = AmplitudeModel::born_gaussian(spec, env, levels);
        for (double E : {-1.0, -0.7, -0.3, 0.0, 0.3, 0.7, 1.0}) {
            const Operator L = lindblad_channel_operator(levels, m, E, 1, 0, Vec3::UnitX(), Vec3(0, 0, 3.0));
            CHECK((L.array().abs() > 0.0).count() <= (E == 0.0 ? 3 : 1));
        }
    }

    SUBCASE("elastic forward scattering is diagonal with forward amplitudes")
    {
        const LevelSystem levels({0.0, 0.3, 1.0});
        const InteractionSpec flat{1.0, kR, CouplingTensor::product(Operator::Identity(3, 3), Operator::Identity(2, 2))};
        const auto m = AmplitudeModel::born_gaussian(flat, env, levels);
        const Vec3 p(0.0, 0.0, 1.7);
        const Operator L = lindblad_channel_operator(levels, m, 0.0, 1, 1, Vec3::UnitZ(), p);
        CHECK((L - kForward * Operator::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
    }

    SUBCASE("linear in V0")
    {
        InteractionSpec scaled = exchange;
        scaled.V0 = 2.7;
        const auto m2 = AmplitudeModel::born_gaussian(scaled, env, ladder);
        for (int n = 0; n < 50; ++n) {
            const Vec3 p(uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, 1.5, 3));
            const Vec3 dir = Vec3(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)).normalized();
            const Operator a = lindblad_channel_operator(ladder, model, 0.4, 0, 1, dir, p);
            const Operator b = lindblad_channel_operator(ladder, m2, 0.4, 0, 1, dir, p);
            CHECK((b - 2.7 * a).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, b.cwiseAbs().maxCoeff()));
        }
    }

    SUBCASE("closed pairs contribute nothing")
    {
        // Going up by 0.4 with an ancilla also going up needs 1.3 of kinetic energy.
        const Operator L = lindblad_channel_operator(ladder, model, 0.4, 1, 0, Vec3::UnitZ(), Vec3(0, 0, 0.5));
        CHECK(L.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("collision-induced hamiltonian")
{
    const LevelSystem levels({0.0, 0.3, 1.0});
    const QuadratureSpec quad;

    const InteractionSpec exchange{1.0, kR, CouplingTensor::spin_exchange(SpinQuantum(2))};
    const auto ladder = LevelSystem::spin_ladder(SpinQuantum(2), 1.0);
    const auto spin = AmplitudeModel::born_gaussian(exchange, gas(1.5), ladder);
    CHECK(effective_hamiltonian(ladder, spin, spin.env(), quad).cwiseAbs().maxCoeff() == 0.0);

    const InteractionSpec flat{1.0, kR, CouplingTensor::product(Operator::Identity(3, 3), Operator::Identity(2, 2))};
    const GasEnvironment env = gas(0.8, 0.3);
    const auto m = AmplitudeModel::born_gaussian(flat, env, levels);
    const Operator h = effective_hamiltonian(levels, m, env, quad);
    CHECK(hermiticity_defect(h) <= 1e-10);
    // forward amplitude is constant, so the momentum average is trivial
    const double expected = -2.0 * std::numbers::pi * env.density * kForward;
    CHECK((h - expected * Operator::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-8 * std::abs(expected));

    Rng rng(9);
    const InteractionSpec generic{1.0, kR, random_real_coupling(rng)};
    const auto g = AmplitudeModel::born_gaussian(generic, env, levels);
    const Operator hg = effective_hamiltonian(levels, g, env, quad);
    CHECK(hermiticity_defect(hg) <= 1e-10);
    CHECK(commutator(hg, levels.hamiltonian()).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, hg.norm()));

    const GasEnvironment empty = gas(0.8, 0.0);
    const auto e = AmplitudeModel::born_gaussian(flat, empty, levels);
    CHECK(effective_hamiltonian(levels, e, empty, quad).cwiseAbs().maxCoeff() == 0.0);
}
