#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gascollide/qmath.hpp"

namespace gascollide {

/*!
 * Internal energy ladder of the scatterer, eigenbasis ordered by ascending energy.
 *
 * Degenerate entries are allowed here; modules that need a nondegenerate
 * spectrum check it themselves.
 */
class LevelSystem
{
  public:
    explicit LevelSystem(std::vector<double> energies, std::vector<std::string> labels = {});

    // Spin ladder hbar*omega*m for m = -J..+J.
    static LevelSystem spin_ladder(SpinQuantum j, double hbar_omega);

    int dim() const { return static_cast<int>(energies_.size()); }
    double energy(int i) const { return energies_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& energies() const { return energies_; }
    const std::vector<std::string>& labels() const { return labels_; }

    // Diagonal Hamiltonian sum_i e_i |i><i|.
    Operator hamiltonian() const;

    bool nondegenerate(double tol) const;

  private:
    std::vector<double> energies_;
    std::vector<std::string> labels_;
};

}  // namespace gascollide
