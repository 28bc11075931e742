#pragma once

// Adiabatic layer: dipole and cavity field replaced by their instantaneous
// steady states, and the resulting optical force split into longitudinal,
// transverse and time-dependent interference parts. Forces are in hbar*k*kappa.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "qrw/dynamics.hpp"

namespace qrw {

struct ForceBreakdown {
    double f_L = 0.0;
    double f_T = 0.0;
    double f_LT = 0.0;
    double total = 0.0;
};

/// g * beta with the dipole adiabatically eliminated (|delta_a| >> gamma, eta_T).
inline cplx eliminated_dipole(const cplx& alpha, double theta, double t, const SystemParams& P) {
    const cplx i{0.0, 1.0};
    return i * P.U0() * alpha * mode_f(theta) + i * P.eta_bar_T() * detail::pump_phase(P, t);
}

/// Position-dependent cavity detuning delta_c - U0 f^2(theta).
inline double shifted_detuning(double theta, const SystemParams& P) {
    const double f = mode_f(theta);
    return P.delta_c - P.U0() * f * f;
}

inline cplx steady_alpha(double theta, double t, const SystemParams& P) {
    const cplx i{0.0, 1.0};
    const double f = mode_f(theta);
    const cplx num = P.eta_L - i * P.eta_bar_T() * f * detail::pump_phase(P, t);
    return num / cplx{P.kappa, -shifted_detuning(theta, P)};
}

/// Closed-form cavity photon number of the steady field.
inline double steady_photon_number(double theta, double t, const SystemParams& P) {
    const double f = mode_f(theta);
    const double eb = P.eta_bar_T();
    const double D = shifted_detuning(theta, P);
    return (P.eta_L * P.eta_L + eb * eb * f * f + 2.0 * P.eta_L * eb * f * std::sin(P.delta_T * t)) /
           (P.kappa * P.kappa + D * D);
}

/// -2 f'(theta) Im{alpha^* (g beta)} for arbitrary field and dipole values.
inline double eliminated_force(double theta, const cplx& alpha, const cplx& g_beta) {
    return -2.0 * mode_df(theta) * std::imag(std::conj(alpha) * g_beta);
}

/// The force with both fast variables at their steady states.
inline double adiabatic_force(double theta, double t, const SystemParams& P) {
    const cplx a = steady_alpha(theta, t, P);
    return eliminated_force(theta, a, eliminated_dipole(a, theta, t, P));
}

inline ForceBreakdown force_breakdown(double theta, double t, const SystemParams& P) {
    const double f = mode_f(theta);
    const double df = mode_df(theta);
    const double U0 = P.U0();
    const double eb = P.eta_bar_T();
    const double D = P.delta_c - U0 * f * f;
    const double denom = P.kappa * P.kappa + D * D;
    const double c = std::cos(P.delta_T * t);
    const double s = std::sin(P.delta_T * t);

    ForceBreakdown out;
    out.f_L = -2.0 * df * f * P.eta_L * P.eta_L * U0 / denom;
    out.f_T = -2.0 * df * f * eb * eb * P.delta_c / denom;
    out.f_LT = -2.0 * df * eb * P.eta_L * (P.kappa * c + (P.delta_c + U0 * f * f) * s) / denom;
    out.total = out.f_L + out.f_T + out.f_LT;
    return out;
}

/// Static limit (delta_T = 0) of the interference force.
inline double interference_force_static(double theta, const SystemParams& P) {
    const double f = mode_f(theta);
    const double D = shifted_detuning(theta, P);
    return -2.0 * mode_df(theta) * P.eta_bar_T() * P.eta_L * P.kappa / (P.kappa * P.kappa + D * D);
}

/// Interference force with U0 f^2 dropped against delta_c:
/// 2 sin(theta) eta_bar_T eta_L / sqrt(kappa^2 + delta_c^2) * cos(delta_T t - phi_Delta).
inline double force_interference_approx(double theta, double t, const SystemParams& P) {
    const double r = std::hypot(P.kappa, P.delta_c);
    return 2.0 * std::sin(theta) * P.eta_bar_T() * P.eta_L / r *
           std::cos(P.delta_T * t - P.phi_Delta());
}

/// A squared frequency that may be negative (no trapping); the frequency
/// itself only exists when the square is non-negative.
struct SignedSquare {
    double squared = 0.0;

    std::optional<double> frequency() const {
        if (squared < 0.0) return std::nullopt;
        return std::sqrt(squared);
    }
};

struct TrapSpectrum {
    SignedSquare omega_tr_LT;
    SignedSquare omega_tr_L;
    SignedSquare omega_bar_plus;
    SignedSquare omega_bar_minus;
};

/// Which pump amplitude enters the double-well frequencies. The printed
/// expression uses the bare eta_T; dimensional agreement with the interference
/// force suggests eta_bar_T instead.
enum class DoubleWellPump { bare_eta_T, effective_eta_bar_T };

inline TrapSpectrum trap_spectrum(const SystemParams& P,
                                  DoubleWellPump pump = DoubleWellPump::bare_eta_T) {
    const double denom = P.kappa * P.kappa + P.delta_c * P.delta_c;
    const double U0 = P.U0();
    const double eT = pump == DoubleWellPump::bare_eta_T ? P.eta_T : P.eta_bar_T();

    TrapSpectrum out;
    out.omega_tr_LT.squared = 4.0 * P.omega_r * P.kappa * std::abs(P.eta_bar_T()) * P.eta_L / denom;
    out.omega_tr_L.squared = 8.0 * P.omega_r * U0 * P.eta_L * P.eta_L / denom;
    out.omega_bar_plus.squared = 8.0 * P.omega_r * P.eta_L * (U0 * P.eta_L + eT) / denom;
    out.omega_bar_minus.squared = 8.0 * P.omega_r * P.eta_L * (U0 * P.eta_L - eT) / denom;
    return out;
}

enum class Regime { interference_trapping, longitudinal_trapping, unclassified };

inline std::string to_string(Regime r) {
    switch (r) {
        case Regime::interference_trapping: return "interference-trapping";
        case Regime::longitudinal_trapping: return "longitudinal-trapping";
        case Regime::unclassified: return "unclassified";
    }
    return "unclassified";
}

struct ForceMaxima {
    double f_L = 0.0;
    double f_LT = 0.0;
};

/// Grid maxima of |F_L| over theta and of |F_LT| over theta and one beat period.
inline ForceMaxima force_maxima(const SystemParams& P, int n_theta = 720, int n_t = 180) {
    ForceMaxima m;
    const double t_span = P.delta_T != 0.0 ? two_pi / std::abs(P.delta_T) : 0.0;
    const int nt = P.delta_T != 0.0 ? n_t : 1;
    for (int i = 0; i < n_theta; ++i) {
        const double theta = two_pi * i / n_theta;
        for (int k = 0; k < nt; ++k) {
            const auto fb = force_breakdown(theta, t_span * k / nt, P);
            m.f_L = std::max(m.f_L, std::abs(fb.f_L));
            m.f_LT = std::max(m.f_LT, std::abs(fb.f_LT));
        }
    }
    return m;
}

/// "Much greater" and "much less" are read as a factor of ten.
inline Regime regime_check(const SystemParams& P) {
    const double U0 = P.U0();
    const bool strong_interference = P.eta_T > 10.0 * P.g * P.eta_L;
    const double upper = (P.g * P.delta_c) != 0.0
                             ? 0.1 * std::abs(P.eta_L * P.delta_a / (P.g * P.delta_c))
                             : std::numeric_limits<double>::infinity();
    const bool weak_enough = P.eta_T < upper;
    const bool small_shift = std::abs(U0 * P.delta_c) < 0.1;
    if (strong_interference && weak_enough && small_shift) {
        return Regime::interference_trapping;
    }
    const auto m = force_maxima(P);
    if (m.f_L > m.f_LT) {
        return Regime::longitudinal_trapping;
    }
    return Regime::unclassified;
}

/// Transverse pump at which the maxima of |F_L| and |F_LT| coincide,
/// with U0 f^2 neglected inside the detuning: eta_L g / (2 sqrt(kappa^2 + delta_c^2)).
inline double jump_threshold_estimate(const SystemParams& P) {
    return P.eta_L * P.g / (2.0 * std::hypot(P.kappa, P.delta_c));
}

}  // namespace qrw
