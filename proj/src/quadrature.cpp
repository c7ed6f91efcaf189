#include "gascollide/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "gascollide/errors.hpp"

namespace gascollide {
namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for kKronrodNodes[1], [3], [5], [7].
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel
{
    double a;
    double b;
    double value;
    double error;
    // Gauss-Legendre only: halves, reused as the coarse estimate after a split.
    double left = 0.0;
    double right = 0.0;
};

Panel kronrod_panel(const std::function<double(double)>& f, double a, double b)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double k = fc * kKronrodWeights[7];
    double g = fc * kGaussWeights[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kKronrodNodes[static_cast<std::size_t>(i)];
        const double s = f(c - dx) + f(c + dx);
        k += kKronrodWeights[static_cast<std::size_t>(i)] * s;
        if (i % 2 == 1) {
            g += kGaussWeights[static_cast<std::size_t>(i / 2)] * s;
        }
    }
    return {a, b, k * h, std::abs((k - g) * h)};
}

double legendre_sum(const std::function<double(double)>& f, const GaussLegendre& rule, double a, double b)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        s += rule.weights[i] * f(c + h * rule.nodes[i]);
    }
    return s * h;
}

Panel legendre_panel(const std::function<double(double)>& f, const GaussLegendre& rule, double a,
                     double b, double coarse)
{
    const double m = 0.5 * (a + b);
    const double l = legendre_sum(f, rule, a, m);
    const double r = legendre_sum(f, rule, m, b);
    return {a, b, l + r, std::abs(coarse - l - r), l, r};
}

const GaussLegendre& cached_rule(int n)
{
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<GaussLegendre>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[n];
    if (!slot) {
        slot = std::make_unique<GaussLegendre>(n);
    }
    return *slot;
}

}  // namespace

GaussLegendre::GaussLegendre(int n)
{
    if (n < 1) {
        throw InvalidArgument("Gauss-Legendre: node count must be positive");
    }
    nodes.resize(static_cast<std::size_t>(n));
    weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[static_cast<std::size_t>(i)] = -x;
        nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        weights[static_cast<std::size_t>(i)] = w;
        weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    if (n % 2 == 1) {
        nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    }
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const AdaptiveOptions& opt)
{
    if (!(opt.rel_tol > 0.0) || opt.max_panels < 1) {
        throw InvalidArgument("adaptive quadrature: bad tolerance or panel budget");
    }
    const GaussLegendre* rule = nullptr;
    auto make = [&](double lo, double hi, double coarse) {
        return opt.rule == PanelRule::gauss_kronrod_15 ? kronrod_panel(f, lo, hi)
                                                       : legendre_panel(f, *rule, lo, hi, coarse);
    };
    if (opt.rule == PanelRule::gauss_legendre) {
        rule = &cached_rule(opt.nodes);
    }

    std::vector<Panel> panels;
    double coarse = 0.0;
    if (rule) {
        coarse = legendre_sum(f, *rule, a, b);
    }
    panels.push_back(make(a, b, coarse));

    auto totals = [&panels]() {
        double v = 0.0;
        double e = 0.0;
        for (const Panel& p : panels) {
            v += p.value;
            e += p.error;
        }
        return std::pair{v, e};
    };

    QuadratureResult out;
    while (true) {
        auto [value, error] = totals();
        out.value = value;
        out.error = error;
        out.panels = static_cast<int>(panels.size());
        if (!std::isfinite(value)) {
            out.converged = false;
            return out;
        }
        if (error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(value))) {
            out.converged = true;
            return out;
        }
        if (static_cast<int>(panels.size()) >= opt.max_panels) {
            out.converged = false;
            return out;
        }
        auto worst = std::max_element(panels.begin(), panels.end(),
                                      [](const Panel& x, const Panel& y) { return x.error < y.error; });
        const Panel p = *worst;
        const double mid = 0.5 * (p.a + p.b);
        if (!(mid > p.a && mid < p.b)) {
            // Panel width at machine resolution; nothing left to refine.
            out.converged = false;
            return out;
        }
        *worst = make(p.a, mid, p.left);
        panels.insert(worst + 1, make(mid, p.b, p.right));
    }
}

QuadratureResult integrate_semi_infinite(const std::function<double(double)>& f, double lower,
                                         double scale, const AdaptiveOptions& opt)
{
    if (!(scale > 0.0) || !std::isfinite(lower)) {
        throw InvalidArgument("semi-infinite quadrature: scale must be positive, lower bound finite");
    }
    auto g = [&](double t) {
        if (t >= 1.0) {
            return 0.0;
        }
        const double u = 1.0 - t;
        const double z = lower + scale * t / u;
        const double v = f(z);
        return v == 0.0 ? 0.0 : v * scale / (u * u);
    };
    return integrate_adaptive(g, 0.0, 1.0, opt);
}

QuadratureResult integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                                     const std::vector<double>& breakpoints, double scale,
                                     const AdaptiveOptions& opt)
{
    if (!(b > a) || std::isnan(b)) {
        throw InvalidArgument("piecewise quadrature: need b > a");
    }
    std::vector<double> edges{a};
    for (double x : breakpoints) {
        if (x > edges.back() && x < b) {
            edges.push_back(x);
        }
    }
    QuadratureResult out;
    out.converged = true;
    auto add = [&out](const QuadratureResult& r) {
        out.value += r.value;
        out.error += r.error;
        out.panels += r.panels;
        out.converged = out.converged && r.converged;
    };
    for (std::size_t n = 0; n + 1 < edges.size(); ++n) {
        add(integrate_adaptive(f, edges[n], edges[n + 1], opt));
    }
    if (std::isinf(b)) {
        add(integrate_semi_infinite(f, edges.back(), scale, opt));
    } else {
        add(integrate_adaptive(f, edges.back(), b, opt));
    }
    return out;
}

void QuadratureSpec::validate() const
{
    if (radial_nodes < 4 || angular_nodes < 4) {
        throw InvalidArgument("quadrature spec: node counts must be at least 4");
    }
    if (!(rel_tol > 0.0 && rel_tol <= 1e-2)) {
        throw InvalidArgument("quadrature spec: rel_tol must lie in (0, 1e-2]");
    }
    if (max_subdivisions < 1) {
        throw InvalidArgument("quadrature spec: max_subdivisions must be positive");
    }
}

}  // namespace gascollide
