#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "gascollide/gas.hpp"
#include "gascollide/level_system.hpp"
#include "gascollide/qmath.hpp"
#include "gascollide/quadrature.hpp"

namespace gascollide {

/*!
 * Joint transition |e_j, a_l> -> |e_i, a_k>.
 *
 * E is the system transition energy e_i - e_j; the kinetic energy budget of
 * the channel also includes the ancilla change a_k - a_l.
 */
struct Channel
{
    double E;
    int i;
    int j;
    int k;
    int l;

    static Channel make(const LevelSystem& levels, int i, int j, int k, int l);

    // Index-swapped reverse process (i<->j, k<->l).
    Channel reversed() const { return {-E, j, i, l, k}; }

    // E + a_k - a_l
    double total_energy(const GasEnvironment& env) const;
};

/*!
 * Outgoing momentum magnitude fixed by energy conservation.
 *
 * Throws ChannelClosed when the incoming kinetic energy cannot pay for the
 * internal energy change.
 */
double outgoing_momentum(double p_mag, double E, double eps_k, double eps_l, double m);

// -V0/E_R sqrt(pi/2) R v_{ij}^{kl} exp(-(q - p)^2 / 2 p_R^2), with on-shell checks.
Complex born_gaussian_amplitude(const InteractionSpec& spec, const GasEnvironment& env,
                                const Channel& ch, const Vec3& q, const Vec3& p);

//---------------------------------------------------------------------------//
/*!
 * Sampled amplitudes on a (|p|, cos theta) grid, one grid per channel.
 *
 * Values between nodes are bilinear; outside the grid the nearest edge value
 * is used and the lookup is flagged as extrapolated.
 */
class AmplitudeTable
{
  public:
    using Key = std::tuple<int, int, int, int>;  // i, j, k, l

    struct Grid
    {
        std::vector<double> p_mag;
        std::vector<double> cos_theta;
        Eigen::MatrixXcd values;  // rows: p_mag, cols: cos_theta
    };

    struct Lookup
    {
        Complex value;
        bool extrapolated;
    };

    AmplitudeTable() = default;

    // Header `p_mag,cos_theta,i,j,k,l,re,im`; every channel must fill a full grid.
    static AmplitudeTable read_csv(std::istream& in);
    static AmplitudeTable read_csv_file(const std::string& path);

    void add_channel(Key key, Grid grid);
    // Overwrite a single node, e.g. to inject a defect.
    void set_value(const Key& key, std::size_t p_index, std::size_t cos_index, Complex value);

    const std::map<Key, Grid>& channels() const { return channels_; }
    bool has(const Key& key) const { return channels_.count(key) != 0; }

    // Zero for channels that are not tabulated.
    Lookup lookup(const Key& key, double p_mag, double cos_theta) const;

  private:
    std::map<Key, Grid> channels_;
};

//---------------------------------------------------------------------------//
/*!
 * Rotation-invariant on-shell amplitude f_{ij}^{kl}(q, p).
 *
 * Both supported kinds depend on the momenta only through |p| and the angle
 * between q and p, which is what lets rate integrals reduce to a radial times
 * a relative-angle quadrature. The model carries the level structure so it can
 * resolve |q| for any channel.
 */
class AmplitudeModel
{
  public:
    enum class Kind
    {
        born_gaussian,
        table
    };

    static AmplitudeModel born_gaussian(InteractionSpec spec, GasEnvironment env, LevelSystem levels);
    static AmplitudeModel tabulated(AmplitudeTable table, GasEnvironment env, LevelSystem levels,
                                    double energy_scale = 1.0);

    Kind kind() const { return kind_; }
    const LevelSystem& levels() const { return levels_; }
    const GasEnvironment& env() const { return env_; }
    const InteractionSpec* interaction() const;
    const AmplitudeTable* table() const;

    // Reference energy for grouping transitions (E_R for the Born model).
    double energy_scale() const { return energy_scale_; }

    // Full vector form; validates the kinematics and throws ChannelClosed.
    Complex amplitude(const Channel& ch, const Vec3& q, const Vec3& p) const;

    // Hot path: caller guarantees q_mag is on shell for p_mag.
    Complex isotropic(const Channel& ch, double p_mag, double q_mag, double cos_theta) const;

    // Grid lines of a tabulated channel, where the interpolant has kinks.
    // Empty for analytic models.
    struct Breakpoints
    {
        std::vector<double> p_mag;
        std::vector<double> cos_theta;
    };
    Breakpoints breakpoints(const Channel& ch) const;

    // True when the amplitude vanishes identically on this channel.
    bool null_channel(int i, int j, int k, int l) const;

    // Number of table lookups that fell outside a grid so far.
    std::uint64_t extrapolations() const { return extrapolations_->load(); }

  private:
    AmplitudeModel(Kind kind, GasEnvironment env, LevelSystem levels);

    Kind kind_;
    GasEnvironment env_;
    LevelSystem levels_;
    std::variant<AmplitudeTable, InteractionSpec> data_;
    double energy_scale_ = 1.0;
    double prefactor_ = 0.0;  // Born: -sqrt(pi/2) R V0 / E_R
    double p_R_ = 1.0;
    std::shared_ptr<std::atomic<std::uint64_t>> extrapolations_;
};

//---------------------------------------------------------------------------//
struct MicroreversibilityReport
{
    double max_violation = 0.0;
    bool pass = true;
    int samples_checked = 0;
    // Location of the largest violation.
    Channel worst{0.0, 0, 0, 0, 0};
    double worst_p_mag = 0.0;
    double worst_cos_theta = 0.0;
    std::uint64_t extrapolations = 0;
};

/*!
 * Compares f_{ij}^{kl}(q, p) against f_{ji}^{lk}(-p, -q).
 *
 * Draws `samples` random open configurations (fixed seed) and, for tables,
 * additionally visits every tabulated node. Closed channels are skipped.
 */
MicroreversibilityReport check_microreversibility(const AmplitudeModel& model, int samples, double tol,
                                                  std::uint64_t seed = 20240917);

/*!
 * Collision operator for system transition energy E with ancilla l -> k,
 * outgoing direction `direction` and incoming momentum p.
 *
 * Sums sqrt(|q|/|p|) f_{ij}^{kl}(q, p) |i><j| over level pairs whose spacing
 * matches E within 1e-9 * energy_scale; closed pairs contribute nothing.
 */
Operator lindblad_channel_operator(const LevelSystem& levels, const AmplitudeModel& model, double E,
                                   int k, int l, const Vec3& direction, const Vec3& p);

// Hermitian shift -(pi hbar^2 n/m) sum_k int d^3p mu_k(p) L_0^{kk}(0, p) + h.c.
Operator effective_hamiltonian(const LevelSystem& levels, const AmplitudeModel& model,
                               const GasEnvironment& env, const QuadratureSpec& quad);

}  // namespace gascollide
