#include "gascollide/qmath.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gascollide/errors.hpp"

namespace gascollide {

SpinQuantum::SpinQuantum(int twice_j) : twice_j_(twice_j)
{
    if (twice_j < 1) {
        throw InvalidArgument("spin: 2J must be a positive integer, got " + std::to_string(twice_j));
    }
}

SpinQuantum SpinQuantum::from_value(double j)
{
    const double twice = 2.0 * j;
    const double rounded = std::round(twice);
    if (!std::isfinite(j) || std::abs(twice - rounded) > 1e-12 || rounded < 1.0) {
        std::ostringstream msg;
        msg << "spin: J must be a positive half-integer, got " << j;
        throw InvalidArgument(msg.str());
    }
    return SpinQuantum(static_cast<int>(rounded));
}

SpinOperators spin_operators(SpinQuantum j)
{
    const int d = j.dim();
    const double jv = j.value();
    SpinOperators ops{Operator::Zero(d, d), Operator::Zero(d, d), Operator::Zero(d, d)};
    for (int a = 0; a < d; ++a) {
        const double m = -jv + a;
        ops.jz(a, a) = m;
        if (a + 1 < d) {
            ops.jplus(a + 1, a) = std::sqrt(jv * (jv + 1.0) - m * (m + 1.0));
        }
    }
    ops.jminus = ops.jplus.adjoint();
    return ops;
}

//---------------------------------------------------------------------------//
double hermiticity_defect(const Eigen::MatrixXcd& a)
{
    if (a.size() == 0) {
        return 0.0;
    }
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

std::optional<std::string>
check_state(const Eigen::MatrixXcd& rho, const StateTolerance& tol)
{
    std::ostringstream msg;
    if (rho.rows() != rho.cols() || rho.rows() == 0) {
        return std::string("density matrix must be square and non-empty");
    }
    if (!rho.allFinite()) {
        return std::string("density matrix has non-finite entries");
    }
    const double herm = hermiticity_defect(rho);
    if (herm > tol.hermiticity) {
        msg << "hermiticity defect " << herm << " exceeds " << tol.hermiticity;
        return msg.str();
    }
    const double tr_err = std::abs(rho.trace() - Complex(1.0, 0.0));
    if (tr_err > tol.trace) {
        msg << "trace deviates from 1 by " << tr_err;
        return msg.str();
    }
    const Eigen::MatrixXcd sym = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym, Eigen::EigenvaluesOnly);
    const double lo = solver.eigenvalues().minCoeff();
    if (lo < tol.min_eigenvalue) {
        msg << "smallest eigenvalue " << lo << " below " << tol.min_eigenvalue;
        return msg.str();
    }
    return std::nullopt;
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd rho, StateTolerance tol) : rho_(std::move(rho))
{
    if (auto err = check_state(rho_, tol)) {
        throw InvalidArgument("invalid density matrix: " + *err);
    }
}

DensityMatrix DensityMatrix::maximally_mixed(int dim)
{
    if (dim < 1) {
        throw InvalidArgument("maximally_mixed: dimension must be positive");
    }
    return DensityMatrix(Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::from_populations(const Eigen::VectorXd& populations)
{
    return DensityMatrix(populations.cast<Complex>().asDiagonal());
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& psi)
{
    const double norm = psi.norm();
    if (norm == 0.0) {
        throw InvalidArgument("pure: zero state vector");
    }
    const Eigen::VectorXcd unit = psi / norm;
    return DensityMatrix(unit * unit.adjoint());
}

//---------------------------------------------------------------------------//
Eigen::MatrixXcd commutator(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b)
{
    return a * b - b * a;
}

Eigen::MatrixXcd dissipator(const Operator& L, const Eigen::MatrixXcd& rho)
{
    if (L.rows() != L.cols() || L.rows() != rho.rows() || rho.rows() != rho.cols()) {
        throw InvalidArgument("dissipator: operator and state dimensions differ");
    }
    const Eigen::MatrixXcd LdL = L.adjoint() * L;
    return L * rho * L.adjoint() - 0.5 * (LdL * rho + rho * LdL);
}

Eigen::MatrixXcd dissipator(const Operator& L, const DensityMatrix& rho)
{
    return dissipator(L, rho.matrix());
}

EigenSystem eigh(const Operator& a)
{
    if (a.rows() != a.cols()) {
        throw InvalidArgument("eigh: matrix must be square");
    }
    if (!a.allFinite()) {
        throw InvalidArgument("eigh: matrix has non-finite entries");
    }
    const double scale = a.size() == 0 ? 1.0 : std::max(1.0, a.cwiseAbs().maxCoeff());
    const double defect = hermiticity_defect(a);
    if (defect > 1e-10 * scale) {
        std::ostringstream msg;
        msg << "eigh: matrix is not Hermitian (defect " << defect << ")";
        throw InvalidArgument(msg.str());
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (a + a.adjoint()));
    if (solver.info() != Eigen::Success) {
        throw NumericFailure("eigh: eigen-decomposition did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

double von_neumann_entropy(const DensityMatrix& rho)
{
    const EigenSystem es = eigh(rho.matrix());
    double s = 0.0;
    for (double lam : es.values) {
        if (lam > 1e-14) {
            s -= lam * std::log(lam);
        }
    }
    return std::max(s, 0.0);
}

double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b)
{
    const EigenSystem es = eigh(a - b);
    return 0.5 * es.values.cwiseAbs().sum();
}

DensityMatrix gibbs_state(const Operator& h, double beta)
{
    const EigenSystem es = eigh(h);
    // Shift by the dominant exponent so neither sign of beta overflows.
    Eigen::VectorXd expo = -beta * es.values;
    expo.array() -= expo.maxCoeff();
    Eigen::VectorXd w = expo.array().exp();
    w /= w.sum();
    Eigen::MatrixXcd rho = es.vectors * w.cast<Complex>().asDiagonal() * es.vectors.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(std::move(rho));
}

}  // namespace gascollide
