#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "gascollide/qmath.hpp"

namespace gascollide::testing {

// Hand-rolled generators for property tests; every test seeds its own engine.
using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double log_uniform(Rng& rng, double lo, double hi)
{
    return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

inline Eigen::MatrixXcd ginibre(Rng& rng, int n)
{
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            a(i, j) = Complex(g(rng), g(rng));
        }
    }
    return a;
}

inline Eigen::MatrixXcd random_hermitian(Rng& rng, int n)
{
    const Eigen::MatrixXcd a = ginibre(rng, n);
    return 0.5 * (a + a.adjoint());
}

// Haar-distributed unitary: QR of a Ginibre matrix with the phases of R fixed.
inline Eigen::MatrixXcd random_unitary(Rng& rng, int n)
{
    const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(ginibre(rng, n));
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR();
    for (int i = 0; i < n; ++i) {
        const Complex d = r(i, i);
        q.col(i) *= d / std::abs(d);
    }
    return q;
}

// Full-rank density matrix A A^dag / tr.
inline DensityMatrix random_density(Rng& rng, int n)
{
    const Eigen::MatrixXcd a = ginibre(rng, n);
    Eigen::MatrixXcd rho = a * a.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(rho);
}

inline Eigen::VectorXd random_populations(Rng& rng, int n)
{
    Eigen::VectorXd p(n);
    for (int i = 0; i < n; ++i) {
        p(i) = uniform(rng, 0.01, 1.0);
    }
    return p / p.sum();
}

}  // namespace gascollide::testing
