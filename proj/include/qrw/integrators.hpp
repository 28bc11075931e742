#pragma once

// Fixed-step classical Runge-Kutta integration with uniform-stride sampling.
//
// The integrators are generic over the state type. A state S with rate type R
// needs a member `double t`, and the free functions
//     S displaced(const S&, const R&, double h)   // s + h*r, t advanced by h
//     bool finite(const R&)
// together with R + R and double * R.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <type_traits>
#include <utility>
#include <vector>

#include "qrw/error.hpp"

namespace qrw {

template <class F, class S>
using rate_of_t = std::decay_t<std::invoke_result_t<F&, const S&>>;

template <class F, class S>
concept RhsFor = requires(F& f, const S& s, double h) {
    { s.t } -> std::convertible_to<double>;
    { displaced(s, f(s), h) } -> std::convertible_to<S>;
    { finite(f(s)) } -> std::convertible_to<bool>;
    { f(s) + f(s) } -> std::convertible_to<rate_of_t<F, S>>;
    { h * f(s) } -> std::convertible_to<rate_of_t<F, S>>;
};

struct IntegrationPlan {
    double dt = 0.01;
    double t_end = 100.0;
    std::size_t sample_stride = 1;

    /// Number of RK4 steps needed to reach t_end (rounded down, with a
    /// relative slack so t_end = k*dt is not lost to representation error).
    std::size_t steps() const {
        return static_cast<std::size_t>(std::floor(t_end / dt * (1.0 + 1e-12)));
    }

    std::size_t sample_count() const { return steps() / sample_stride + 1; }

    void validate() const {
        if (!(dt > 0.0)) throw ValidationError("integration plan: dt must be > 0");
        if (!(t_end > 0.0)) throw ValidationError("integration plan: t_end must be > 0");
        if (sample_stride < 1) throw ValidationError("integration plan: sample_stride must be >= 1");
    }
};

/// Suggested upper bound for dt given the fastest rate in the problem.
inline double recommended_dt_limit(double fastest_rate) {
    return 0.1 / std::max(1.0, std::abs(fastest_rate));
}

template <class S, class F>
    requires RhsFor<F, S>
S rk4_step(F&& rhs, const S& s, double dt) {
    const auto k1 = rhs(s);
    const auto k2 = rhs(displaced(s, k1, 0.5 * dt));
    const auto k3 = rhs(displaced(s, k2, 0.5 * dt));
    const auto k4 = rhs(displaced(s, k3, dt));
    const auto incr = (1.0 / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!finite(incr)) {
        throw IntegrationDiverged(s.t);
    }
    return displaced(s, incr, dt);
}

/// Integrates and hands every stored sample to `sink(const S&)` in order.
/// Sample times are recomputed from the step index, so the stride is exactly
/// uniform and no rounding accumulates in t.
template <class S, class F, class Sink>
    requires RhsFor<F, S>
S integrate_each(F&& rhs, const S& state0, const IntegrationPlan& plan, Sink&& sink) {
    plan.validate();
    const std::size_t n = plan.steps();
    const double t0 = state0.t;
    S s = state0;
    sink(std::as_const(s));
    for (std::size_t k = 1; k <= n; ++k) {
        s = rk4_step(rhs, s, plan.dt);
        s.t = t0 + static_cast<double>(k) * plan.dt;
        if (k % plan.sample_stride == 0) {
            sink(std::as_const(s));
        }
    }
    return s;
}

template <class S>
struct TimeSeries {
    double dt_out = 0.0;
    std::vector<S> samples;
};

template <class S, class F>
    requires RhsFor<F, S>
TimeSeries<S> integrate(F&& rhs, const S& state0, const IntegrationPlan& plan) {
    TimeSeries<S> out;
    out.dt_out = plan.dt * static_cast<double>(plan.sample_stride);
    out.samples.reserve(plan.sample_count());
    integrate_each(rhs, state0, plan, [&out](const S& s) { out.samples.push_back(s); });
    return out;
}

}  // namespace qrw
