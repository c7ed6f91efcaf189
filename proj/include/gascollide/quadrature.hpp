#pragma once

#include <functional>
#include <vector>

namespace gascollide {

struct QuadratureResult
{
    double value = 0.0;
    double error = 0.0;
    int panels = 0;
    bool converged = false;
};

enum class PanelRule
{
    gauss_kronrod_15,  // error = |K15 - G7| on the panel
    gauss_legendre,    // error = |G_n(panel) - G_n(left) - G_n(right)|
};

struct AdaptiveOptions
{
    PanelRule rule = PanelRule::gauss_kronrod_15;
    int nodes = 16;  // Gauss-Legendre only
    double rel_tol = 1e-9;
    double abs_tol = 0.0;
    int max_panels = 2000;
};

// Nodes and weights on [-1, 1].
struct GaussLegendre
{
    explicit GaussLegendre(int n);

    std::vector<double> nodes;
    std::vector<double> weights;
};

/*!
 * Globally adaptive integration of f over [a, b].
 *
 * The panel with the largest error estimate is bisected until the summed
 * error drops below max(abs_tol, rel_tol * |value|). Non-convergence within
 * max_panels is reported through `converged`, not thrown; callers decide.
 * Panels are summed in left-to-right order so results are reproducible
 * bit-for-bit for a given input.
 */
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const AdaptiveOptions& opt);

/*!
 * Integral of f over [lower, inf) using z = lower + scale * t / (1 - t).
 *
 * f must decay fast enough that f(z) dz/dt -> 0 as t -> 1.
 */
QuadratureResult integrate_semi_infinite(const std::function<double(double)>& f, double lower,
                                         double scale, const AdaptiveOptions& opt);

/*!
 * Integral over [a, b] (b may be +inf) split at the interior breakpoints.
 *
 * Use this when f has kinks at known positions, e.g. interpolated data. An
 * infinite upper end uses integrate_semi_infinite with `scale` on the last
 * piece. Values, errors and panel counts are summed left to right.
 */
QuadratureResult integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                                     const std::vector<double>& breakpoints, double scale,
                                     const AdaptiveOptions& opt);

/*!
 * Node counts and tolerance for the momentum-space integrals behind rate
 * matrices and the collision-induced Hamiltonian.
 *
 * Each radial or angular integral runs Gauss-Legendre panels of the given
 * order and bisects panels until successive refinements agree to rel_tol.
 */
struct QuadratureSpec
{
    int radial_nodes = 16;
    int angular_nodes = 16;
    double rel_tol = 1e-8;
    int max_subdivisions = 400;

    // node counts >= 4, rel_tol in (0, 1e-2], max_subdivisions >= 1
    void validate() const;
};

}  // namespace gascollide
