#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "gascollide/integrator.hpp"
#include "gascollide/quadrature.hpp"
#include "gascollide/spin_model.hpp"

namespace gascollide::cli {

/*!
 * Flat `key = value` document; `#` starts a comment, blank lines are ignored.
 *
 * Keys keep their file order so the config echo in reports is stable.
 */
class KeyValueConfig
{
  public:
    static KeyValueConfig parse(std::istream& in);
    static KeyValueConfig parse_file(const std::string& path);

    bool has(const std::string& key) const { return index_.count(key) != 0; }
    const std::string& get(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  private:
    std::vector<std::pair<std::string, std::string>> entries_;
    std::map<std::string, std::size_t> index_;
};

struct InitialState
{
    enum class Kind
    {
        ground,
        gibbs,   // temperature in units of hbar omega_S / kB (negative allowed)
        custom,  // explicit populations, ascending energy
        mixed    // (1 - eps) ground + eps * identity / d
    };

    Kind kind = Kind::ground;
    double temperature = 1.0;
    double eps = 0.0;
    std::vector<double> populations;
};

enum class LdbReference
{
    motional,
    effective
};

/*!
 * Parsed and validated run configuration.
 *
 * `model = spin` uses the dimensionless spin parameters; `model = table`
 * reads amplitudes from `amplitude_table` and takes the level structure and
 * gas parameters in raw units.
 */
struct ScenarioConfig
{
    std::string model = "spin";

    SpinScenario spin;
    double t_max = 40.0;
    int n_samples = 201;
    InitialState initial;

    std::vector<double> alpha_grid;
    std::vector<double> s_grid;

    LdbReference ldb_reference = LdbReference::motional;
    std::string amplitude_table;
    double micro_tol = 1e-12;
    int micro_samples = 10000;
    // 0 means 10 * quad.rel_tol.
    double ldb_tol = 0.0;
    double gibbs_tol = 1e-8;

    // table model
    std::vector<double> system_energies;
    std::vector<double> ancilla_energies;
    double T_A = 1.0;
    double T_M = 1.0;
    double density = 1.0;

    QuadratureSpec quad;
    OdeOptions ode;

    // Throws InvalidArgument on unknown keys or invalid values.
    static ScenarioConfig from(const KeyValueConfig& kv);
};

// "1,2,3" or "start:stop:count" (inclusive, count >= 1).
std::vector<double> parse_grid(const std::string& text);

// Accepts "2", "20", "0.5" and "1/2"-style fractions.
SpinQuantum parse_spin(const std::string& text);

}  // namespace gascollide::cli
