#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "gascollide/errors.hpp"

namespace gascollide {

struct OdeOptions
{
    enum class Method
    {
        dormand_prince,  // adaptive 5(4) pair
        rk4              // fixed step, cross-check only
    };

    Method method = Method::dormand_prince;
    double rtol = 1e-9;
    double atol = 1e-9;
    double initial_step = 0.0;  // 0: pick from the first grid interval
    double rk4_step = 1e-3;
    long max_steps = 50'000'000;

    void validate() const
    {
        if (!(rtol > 0.0) || !(atol > 0.0)) {
            throw InvalidArgument("ode: tolerances must be positive");
        }
        if (!(rk4_step > 0.0) || max_steps < 1 || initial_step < 0.0) {
            throw InvalidArgument("ode: bad step settings");
        }
    }
};

namespace detail {

// max_i |e_i| / (atol + rtol max(|y0_i|, |y1_i|))
template<class State>
double scaled_error(const State& err, const State& y0, const State& y1, double atol, double rtol)
{
    const auto scale = (atol + rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).eval();
    return (err.cwiseAbs().array() / scale).maxCoeff();
}

}  // namespace detail

/*!
 * Integrates dy/dt = f(t, y) and hands the state at every grid time to
 * `record(index, t, y)`.
 *
 * Steps are shortened so that each grid time is hit exactly, which keeps the
 * recorded states at full integrator accuracy. State is any Eigen dense type;
 * f must return the same type.
 */
template<class State, class Rhs, class Record>
void integrate_ode(Rhs&& f, State y, const std::vector<double>& t_grid, const OdeOptions& opt, Record&& record)
{
    opt.validate();
    if (t_grid.empty()) {
        throw InvalidArgument("ode: empty time grid");
    }
    for (std::size_t n = 1; n < t_grid.size(); ++n) {
        if (!(t_grid[n] > t_grid[n - 1])) {
            throw InvalidArgument("ode: time grid must be strictly ascending");
        }
    }
    double t = t_grid.front();
    record(std::size_t{0}, t, static_cast<const State&>(y));
    if (t_grid.size() == 1) {
        return;
    }

    long steps = 0;
    auto count_step = [&]() {
        if (++steps > opt.max_steps) {
            std::ostringstream msg;
            msg << "ode: step budget of " << opt.max_steps << " exhausted at t = " << t;
            throw NumericFailure(msg.str(), t);
        }
    };

    if (opt.method == OdeOptions::Method::rk4) {
        for (std::size_t n = 1; n < t_grid.size(); ++n) {
            const double target = t_grid[n];
            while (t < target) {
                count_step();
                const double h = std::min(opt.rk4_step, target - t);
                const State k1 = f(t, y);
                const State k2 = f(t + 0.5 * h, (y + 0.5 * h * k1).eval());
                const State k3 = f(t + 0.5 * h, (y + 0.5 * h * k2).eval());
                const State k4 = f(t + h, (y + h * k3).eval());
                y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                t = (target - t - h <= 0.0) ? target : t + h;
            }
            record(n, t, static_cast<const State&>(y));
        }
        return;
    }

    // Dormand-Prince 5(4) with first-same-as-last.
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    double h = opt.initial_step > 0.0 ? opt.initial_step : 1e-3 * (t_grid[1] - t_grid[0]);
    State k1 = f(t, y);
    for (std::size_t n = 1; n < t_grid.size(); ++n) {
        const double target = t_grid[n];
        while (t < target) {
            count_step();
            const bool last = h >= target - t;
            const double hs = last ? target - t : h;
            const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
            if (hs < h_min && !last) {
                std::ostringstream msg;
                msg << "ode: step size underflow (h = " << hs << ") at t = " << t;
                throw NumericFailure(msg.str(), t);
            }
            const State k2 = f(t + c2 * hs, (y + hs * a21 * k1).eval());
            const State k3 = f(t + c3 * hs, (y + hs * (a31 * k1 + a32 * k2)).eval());
            const State k4 = f(t + c4 * hs, (y + hs * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
            const State k5 = f(t + c5 * hs, (y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
            const State k6 =
                f(t + hs, (y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
            State y_new = (y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6)).eval();
            State k7 = f(t + hs, y_new);
            const State err = (hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7)).eval();
            const double en = detail::scaled_error(err, y, y_new, opt.atol, opt.rtol);
            if (!std::isfinite(en)) {
                h = 0.1 * hs;
                if (h < h_min) {
                    throw NumericFailure("ode: non-finite derivative", t);
                }
                continue;
            }
            const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
            if (en <= 1.0) {
                t = last ? target : t + hs;
                y = std::move(y_new);
                k1 = std::move(k7);
                // A short landing step says nothing about the natural step size.
                h = last ? std::max(h, hs * factor) : hs * factor;
            } else {
                h = hs * std::min(1.0, factor);
            }
        }
        record(n, t, static_cast<const State&>(y));
    }
}

}  // namespace gascollide
