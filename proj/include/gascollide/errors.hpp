#pragma once

#include <stdexcept>
#include <string>

namespace gascollide {

// Bad input to any library call: shape mismatch, broken invariant, divergent parameters.
class InvalidArgument : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

// An energetically forbidden scattering channel was asked for a kinematic quantity.
class ChannelClosed : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

// Quadrature non-convergence, integrator breakdown, or a state that left the physical set.
class NumericFailure : public std::runtime_error
{
  public:
    explicit NumericFailure(const std::string& what, double where = 0.0)
        : std::runtime_error(what), where_(where)
    {
    }

    // Time of first violation, residual, or error estimate depending on the source.
    double where() const noexcept { return where_; }

  private:
    double where_;
};

class IoError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace gascollide
