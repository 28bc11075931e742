#pragma once

// Monte Carlo ensembles of discretized trajectories. Each member draws its
// initial condition from its own seeded stream and is reduced in index order,
// so results do not depend on the number of workers.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "qrw/dynamics.hpp"
#include "qrw/error.hpp"
#include "qrw/integrators.hpp"
#include "qrw/parallel.hpp"
#include "qrw/walk.hpp"

namespace qrw {

struct ThermalWidths {
    double position_phase = 0.0;  // delta x0 in units of the mode phase
    double momentum = 0.0;        // delta p0 in units of hbar k
};

/// Widths of a cavity-cooled wavepacket: dp0 = 1/sqrt(2 omega_r), dx0 = 1/(sqrt(2 U0) eta_L).
inline ThermalWidths thermal_widths(const SystemParams& P) {
    const double U0 = P.U0();
    if (!(U0 * P.eta_L * P.eta_L > 0.0)) {
        throw ValidationError("thermal sampler needs U0 * eta_L^2 > 0 (got " +
                              std::to_string(U0 * P.eta_L * P.eta_L) + ")");
    }
    return {1.0 / (std::sqrt(2.0 * U0) * P.eta_L), 1.0 / std::sqrt(2.0 * P.omega_r)};
}

/// Gaussian initial condition; returns (q0 in site units, p0).
template <class Rng>
std::pair<double, double> thermal_init_sampler(const SystemParams& P, Rng& rng) {
    const auto w = thermal_widths(P);
    std::normal_distribution<double> nx(0.0, w.position_phase / two_pi);
    std::normal_distribution<double> np(0.0, w.momentum);
    const double q0 = nx(rng);
    const double p0 = np(rng);
    return {q0, p0};
}

struct InitBox {
    double x_half_width = 0.1;  // site units
    double p_half_width = 0.1;
};

enum class InitKind { box, thermal };

struct EnsembleSpec {
    InitKind init = InitKind::box;
    InitBox box;
    std::size_t n_traj = 1000;
    std::size_t n_steps = 100;
    std::uint64_t master_seed = 1;
    ModelVariant model;
    double dt = 0.01;
    unsigned workers = 0;
    std::size_t tau_max = 10;
    SiteRounding rounding = SiteRounding::half_integer;
};

struct MemberSummary {
    std::uint64_t seed = 0;
    double q0 = 0.0;
    double p0 = 0.0;
    double start_site = 0.0;
    std::vector<double> sites;  // x_1 .. x_N
    double final_site() const { return sites.empty() ? start_site : sites.back(); }
};

struct EnsembleStats {
    double period = 0.0;
    std::vector<double> variance;  // <(x_n - x_0)^2>, n = 0..N
    SiteHistogram histogram;       // final sites
    double hist_mean = 0.0;
    double hist_std = 0.0;
    LinearFit diffusion;
    CorrelationSeries correlation;       // equal-weight average of per-member series
    std::size_t correlation_members = 0;  // members with a non-degenerate jump sequence
    std::vector<MemberSummary> members;
};

/// Draws the initial condition of member `index`.
inline std::pair<double, double> member_initial_condition(const SystemParams& P, const EnsembleSpec& spec,
                                                          std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    if (spec.init == InitKind::thermal) {
        return thermal_init_sampler(P, rng);
    }
    std::uniform_real_distribution<double> ux(-spec.box.x_half_width, spec.box.x_half_width);
    std::uniform_real_distribution<double> up(-spec.box.p_half_width, spec.box.p_half_width);
    const double q0 = ux(rng);
    const double p0 = up(rng);
    return {q0, p0};
}

/// Integrates one member over n_steps jump periods and returns its windowed sites.
inline MemberSummary run_member(const SystemParams& P, const EnsembleSpec& spec, std::size_t index) {
    MemberSummary m;
    m.seed = stream_seed(spec.master_seed, index);
    std::tie(m.q0, m.p0) = member_initial_condition(P, spec, m.seed);
    m.start_site = round_to_site(m.q0, spec.rounding);

    const double T = P.jump_period();
    DynState s0;
    s0.theta = two_pi * m.q0;
    s0.p = m.p0;

    IntegrationPlan plan{spec.dt, T * static_cast<double>(spec.n_steps), 1};
    WindowAverager avg(T, 0.0);
    try {
        visit_model(P, spec.model, [&](auto rhs) {
            integrate_each(rhs, s0, plan, [&](const DynState& s) { avg.push(s.t, s.site_coordinate()); });
        });
    } catch (const Error& e) {
        throw Error(e.category(), std::string(e.what()) + " (ensemble member " + std::to_string(index) +
                                      ", seed " + std::to_string(m.seed) + ")");
    }
    const auto& means = avg.means();
    m.sites.reserve(means.size());
    for (double q : means) m.sites.push_back(round_to_site(q, spec.rounding));
    return m;
}

/// Aggregates member walks; pure and independent of how members were produced.
inline EnsembleStats aggregate_members(std::vector<MemberSummary> members, double period,
                                       std::size_t tau_max) {
    if (members.empty()) throw StatisticsError("empty ensemble");
    EnsembleStats st;
    st.period = period;
    const std::size_t n_steps = members.front().sites.size();
    for (const auto& m : members) {
        if (m.sites.size() != n_steps) throw StatisticsError("ensemble members of unequal length");
    }

    st.variance.assign(n_steps + 1, 0.0);
    for (const auto& m : members) {
        for (std::size_t n = 1; n <= n_steps; ++n) {
            const double d = m.sites[n - 1] - m.start_site;
            st.variance[n] += d * d;
        }
        st.histogram.add(m.final_site());
    }
    const double count = static_cast<double>(members.size());
    for (auto& v : st.variance) v /= count;

    st.hist_mean = st.histogram.mean();
    st.hist_std = st.histogram.stddev();

    if (n_steps >= 1) {
        std::vector<double> ns(n_steps + 1);
        for (std::size_t n = 0; n <= n_steps; ++n) ns[n] = static_cast<double>(n);
        st.diffusion = fit_line(ns, st.variance);
    }

    st.correlation.values.assign(tau_max + 1, 0.0);
    for (const auto& m : members) {
        const auto jumps = jumps_of(m.sites);
        if (jumps.size() < 2 || tau_max > jumps.size() / 2) continue;
        try {
            const auto c = autocorrelation(jumps, tau_max);
            for (std::size_t k = 0; k <= tau_max; ++k) st.correlation.values[k] += c.values[k];
            ++st.correlation_members;
        } catch (const StatisticsError&) {
            // all-equal jump sequences carry no correlation information
        }
    }
    if (st.correlation_members > 0) {
        for (auto& v : st.correlation.values) v /= static_cast<double>(st.correlation_members);
    }
    st.members = std::move(members);
    return st;
}

inline EnsembleStats ensemble_run(const SystemParams& P, const EnsembleSpec& spec) {
    P.validate();
    if (spec.n_traj < 1) throw ValidationError("ensemble needs n_traj >= 1");
    if (spec.n_steps < 1) throw ValidationError("ensemble needs n_steps >= 1");
    const double T = P.jump_period();

    std::vector<MemberSummary> members(spec.n_traj);
    parallel_for(spec.n_traj, spec.workers,
                 [&](std::size_t i) { members[i] = run_member(P, spec, i); });
    return aggregate_members(std::move(members), T, spec.tau_max);
}

struct MixingReport {
    std::size_t n_positive = 0;
    std::size_t n_negative = 0;
    double mean_positive = 0.0;
    double mean_negative = 0.0;
    double mean_difference = 0.0;  // positive minus negative
    double overlap = 0.0;
};

/// Compares final-site distributions of members started at q0 > 0 and q0 < 0.
inline MixingReport mixing_report(const std::vector<MemberSummary>& members) {
    SiteHistogram pos, neg;
    for (const auto& m : members) {
        if (m.q0 > 0.0) pos.add(m.final_site());
        else if (m.q0 < 0.0) neg.add(m.final_site());
    }
    if (pos.total() == 0 || neg.total() == 0) {
        throw StatisticsError("mixing report needs members on both sides of the origin");
    }
    MixingReport r;
    r.n_positive = static_cast<std::size_t>(pos.total());
    r.n_negative = static_cast<std::size_t>(neg.total());
    r.mean_positive = pos.mean();
    r.mean_negative = neg.mean();
    r.mean_difference = r.mean_positive - r.mean_negative;
    r.overlap = overlap_coefficient(pos, neg);
    return r;
}

}  // namespace qrw
