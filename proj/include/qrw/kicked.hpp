#pragma once

// Frequency-comb transverse driving and its kicked-rotor limit.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qrw/dynamics.hpp"
#include "qrw/error.hpp"
#include "qrw/parallel.hpp"
#include "qrw/walk.hpp"

namespace qrw {

struct CombParams {
    int n_f = 0;          // comb half-width: 2 n_f + 1 teeth
    double delta = 0.1;   // tooth spacing
    double eta_T = 0.55;  // per-tooth amplitude

    double period() const { return two_pi / delta; }

    void validate() const {
        if (n_f < 0) throw ValidationError("comb: n_f must be >= 0");
        if (!(delta > 0.0)) throw ValidationError("comb: delta must be > 0");
    }
};

/// eta_T * sum_{n=-N}^{N} e^{i n delta t} = eta_T * sin((2N+1) x / 2) / sin(x / 2), x = delta t.
/// The phase is reduced to [-pi, pi) first; near x = 0 the series limit 2N+1
/// is used.
inline double comb_drive(double t, const CombParams& comb) {
    const double teeth = 2.0 * comb.n_f + 1.0;
    double x = std::remainder(comb.delta * t, two_pi);
    const double half = 0.5 * x;
    const double s = std::sin(half);
    if (std::abs(s) < 1e-8) {
        // sin(a h)/sin(h) ~ a (1 - (a^2 - 1) h^2 / 6)
        return comb.eta_T * teeth * (1.0 - (teeth * teeth - 1.0) * half * half / 6.0);
    }
    return comb.eta_T * std::sin(teeth * half) / s;
}

/// Comb-driven dipole without decay or cavity back-action, with the cavity
/// field frozen at alpha = eta_L. The alpha component of the state is kept
/// constant.
inline DynRate rhs_comb(const DynState& s, const SystemParams& P, const CombParams& comb) {
    const cplx i{0.0, 1.0};
    const cplx alpha{P.eta_L, 0.0};
    DynRate r;
    r.beta = i * P.delta_a * s.beta + comb_drive(s.t, comb);
    r.alpha = 0.0;
    r.theta = 2.0 * P.omega_r * s.p;
    r.p = detail::optical_force(P.g, mode_df(s.theta), alpha, s.beta);
    return r;
}

struct KickedState {
    double x = 0.0;
    double p = 0.0;
    long n = 0;

    double x_wrapped() const {
        double w = std::fmod(x, two_pi);
        if (w < 0.0) w += two_pi;
        return w;
    }
};

/// Kick then drift: p' = p - K sin x, x' = x + drift * p'.
inline KickedState standard_map_step(const KickedState& s, double kick, double drift = 1.0) {
    KickedState out;
    out.p = s.p - kick * std::sin(s.x);
    out.x = s.x + drift * out.p;
    out.n = s.n + 1;
    return out;
}

/// Momentum impulse per comb period in the many-teeth limit, written as the
/// K of p' = p - K sin x. The comb sum tends to T_delta times a Dirac comb and
/// the adiabatic dipole gives g beta = i eta_bar_T sum_n e^{i n delta t}, so
/// K = -2 eta_L eta_bar_T T_delta.
inline double comb_kick_strength(const SystemParams& P, const CombParams& comb) {
    return -2.0 * P.eta_L * P.eta_bar_T() * comb.period();
}

/// Free-flight phase advance per unit momentum over one comb period.
inline double comb_drift(const SystemParams& P, const CombParams& comb) {
    return 2.0 * P.omega_r * comb.period();
}

/// Kick strength in standard-map normalization (unit drift).
inline double effective_kick(const SystemParams& P, const CombParams& comb) {
    return comb_drift(P, comb) * comb_kick_strength(P, comb);
}

/// Dipole value that removes the undamped homogeneous oscillation when the
/// comb is switched on at time t: the sum of per-tooth steady states
/// i eta_T e^{i n delta t} / (delta_a - n delta).
inline cplx comb_steady_dipole(double t, const SystemParams& P, const CombParams& comb) {
    cplx b{0.0, 0.0};
    for (int n = -comb.n_f; n <= comb.n_f; ++n) {
        const double w = n * comb.delta;
        b += cplx{0.0, comb.eta_T} * cplx{std::cos(w * t), std::sin(w * t)} / (P.delta_a - w);
    }
    return b;
}

enum class KickRegime { bounded, diffusive };

inline std::string to_string(KickRegime r) { return r == KickRegime::bounded ? "bounded" : "diffusive"; }

struct ChaosScanRow {
    double k_eff = 0.0;
    double growth_rate = 0.0;  // fitted d<(p_n - p_0)^2>/dn
    double late_ratio = 0.0;   // <dp^2>(N) / <dp^2>(N/2); ~2 when diffusive, ~1 when bounded
    KickRegime regime = KickRegime::bounded;
};

/// Growth of the momentum variance under the normalized standard map.
/// Initial phases are uniform on [0, 2 pi), momenta uniform on [-pi, pi).
inline std::vector<ChaosScanRow> chaos_scan(const std::vector<double>& k_values, std::size_t n_steps,
                                            std::size_t ensemble_size, std::uint64_t seed,
                                            unsigned workers = 1) {
    if (n_steps < 4) throw ValidationError("chaos scan: need at least four steps");
    if (ensemble_size < 1) throw ValidationError("chaos scan: empty ensemble");

    std::vector<ChaosScanRow> rows;
    rows.reserve(k_values.size());
    for (double K : k_values) {
        std::vector<std::vector<double>> per_member(ensemble_size);
        parallel_for(ensemble_size, workers, [&](std::size_t e) {
            std::mt19937_64 rng(stream_seed(seed, e));
            std::uniform_real_distribution<double> ux(0.0, two_pi);
            std::uniform_real_distribution<double> up(-std::numbers::pi, std::numbers::pi);
            KickedState s;
            s.x = ux(rng);
            s.p = up(rng);
            const double p0 = s.p;
            auto& out = per_member[e];
            out.resize(n_steps + 1);
            out[0] = 0.0;
            for (std::size_t k = 1; k <= n_steps; ++k) {
                s = standard_map_step(s, K, 1.0);
                out[k] = (s.p - p0) * (s.p - p0);
            }
        });
        std::vector<double> msd(n_steps + 1, 0.0);
        for (const auto& m : per_member) {
            for (std::size_t k = 0; k <= n_steps; ++k) msd[k] += m[k];
        }
        std::vector<double> ns(n_steps + 1);
        for (std::size_t k = 0; k <= n_steps; ++k) {
            msd[k] /= static_cast<double>(ensemble_size);
            ns[k] = static_cast<double>(k);
        }
        ChaosScanRow row;
        row.k_eff = K;
        row.growth_rate = fit_line(ns, msd).slope;
        const double half = msd[n_steps / 2];
        row.late_ratio = half > 0.0 ? msd[n_steps] / half : 1.0;
        row.regime = row.late_ratio > 1.5 ? KickRegime::diffusive : KickRegime::bounded;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace qrw
