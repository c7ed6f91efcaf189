#include "gascollide/level_system.hpp"

#include <cmath>

#include "gascollide/errors.hpp"

namespace gascollide {

LevelSystem::LevelSystem(std::vector<double> energies, std::vector<std::string> labels)
    : energies_(std::move(energies)), labels_(std::move(labels))
{
    if (energies_.empty()) {
        throw InvalidArgument("level system: no levels");
    }
    for (std::size_t i = 0; i < energies_.size(); ++i) {
        if (!std::isfinite(energies_[i])) {
            throw InvalidArgument("level system: non-finite energy");
        }
        if (i > 0 && energies_[i] < energies_[i - 1]) {
            throw InvalidArgument("level system: energies must be ascending");
        }
    }
    if (!labels_.empty() && labels_.size() != energies_.size()) {
        throw InvalidArgument("level system: label count does not match level count");
    }
}

LevelSystem LevelSystem::spin_ladder(SpinQuantum j, double hbar_omega)
{
    if (!(hbar_omega > 0.0)) {
        throw InvalidArgument("spin ladder: level spacing must be positive");
    }
    std::vector<double> e;
    std::vector<std::string> labels;
    for (int a = 0; a < j.dim(); ++a) {
        const double m = -j.value() + a;
        e.push_back(hbar_omega * m);
        labels.push_back("m=" + std::to_string(m));
    }
    return LevelSystem(std::move(e), std::move(labels));
}

Operator LevelSystem::hamiltonian() const
{
    Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(energies_.data(), dim());
    return e.cast<Complex>().asDiagonal();
}

bool LevelSystem::nondegenerate(double tol) const
{
    for (std::size_t i = 1; i < energies_.size(); ++i) {
        if (energies_[i] - energies_[i - 1] <= tol) {
            return false;
        }
    }
    return true;
}

}  // namespace gascollide
