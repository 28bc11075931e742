#pragma once

// Semiclassical equations of motion for a two-level particle in a cavity
// pumped longitudinally (through a mirror) and transversally (directly on
// the dipole). Units: kappa = 1, times in 1/kappa, momenta in hbar*k, and
// positions as the mode phase theta = k*x.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "qrw/error.hpp"

namespace qrw {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

struct SystemParams {
    double kappa = 1.0;
    double gamma = 1.0;
    double delta_a = -1.5;
    double delta_c = -1.5;
    double delta_T = std::numbers::pi / 100.0;
    double eta_L = 1.0;
    double eta_T = 0.55;
    double g = 0.01;
    double omega_r = 0.1;

    /// Per-photon light shift g^2 / delta_a.
    double U0() const {
        if (delta_a == 0.0) {
            throw ValidationError("singular detuning: delta_a = 0");
        }
        return g * g / delta_a;
    }

    /// Effective transverse pump scattered into the cavity, g * eta_T / delta_a.
    double eta_bar_T() const {
        if (delta_a == 0.0) {
            throw ValidationError("singular detuning: delta_a = 0");
        }
        return g * eta_T / delta_a;
    }

    double phi_Delta() const { return std::atan(delta_c / kappa); }

    /// Half the beat period of the interference potential: pi / delta_T.
    double jump_period() const {
        if (delta_T == 0.0) {
            throw ValidationError("jump period undefined for delta_T = 0");
        }
        return std::numbers::pi / delta_T;
    }

    std::vector<std::string> problems() const {
        std::vector<std::string> out;
        if (!(kappa > 0.0)) out.emplace_back("kappa must be > 0");
        if (!(gamma >= 0.0)) out.emplace_back("gamma must be >= 0");
        if (!(g >= 0.0)) out.emplace_back("g must be >= 0");
        if (!(eta_L >= 0.0)) out.emplace_back("eta_L must be >= 0");
        if (!(eta_T >= 0.0)) out.emplace_back("eta_T must be >= 0");
        if (!(omega_r > 0.0)) out.emplace_back("omega_r must be > 0");
        if (!std::isfinite(delta_a) || !std::isfinite(delta_c) || !std::isfinite(delta_T)) {
            out.emplace_back("detunings must be finite");
        }
        return out;
    }

    void validate() const {
        auto p = problems();
        if (!p.empty()) {
            std::string msg = "invalid system parameters:";
            for (const auto& s : p) msg += " " + s + ";";
            throw ValidationError(msg);
        }
    }

    /// Parameter set of the reference quasi-random-walk runs.
    static SystemParams reference() { return SystemParams{}; }
};

/// Instantaneous semiclassical state. beta_z only evolves in the full model;
/// the linearized and collective models leave it pinned at -1.
struct DynState {
    double t = 0.0;
    double theta = 0.0;
    double p = 0.0;
    cplx alpha{0.0, 0.0};
    cplx beta{0.0, 0.0};
    double beta_z = -1.0;

    double site_coordinate() const { return theta / two_pi; }
};

struct DynRate {
    double theta = 0.0;
    double p = 0.0;
    cplx alpha{0.0, 0.0};
    cplx beta{0.0, 0.0};
    double beta_z = 0.0;

    friend DynRate operator+(const DynRate& a, const DynRate& b) {
        return {a.theta + b.theta, a.p + b.p, a.alpha + b.alpha, a.beta + b.beta,
                a.beta_z + b.beta_z};
    }
    friend DynRate operator*(double s, const DynRate& a) {
        return {s * a.theta, s * a.p, s * a.alpha, s * a.beta, s * a.beta_z};
    }

    bool finite() const {
        return std::isfinite(theta) && std::isfinite(p) && std::isfinite(alpha.real()) &&
               std::isfinite(alpha.imag()) && std::isfinite(beta.real()) &&
               std::isfinite(beta.imag()) && std::isfinite(beta_z);
    }
};

/// s + h * r, with time advanced by h.
inline DynState displaced(const DynState& s, const DynRate& r, double h) {
    return {s.t + h, s.theta + h * r.theta, s.p + h * r.p, s.alpha + h * r.alpha,
            s.beta + h * r.beta, s.beta_z + h * r.beta_z};
}

inline bool finite(const DynRate& r) { return r.finite(); }

inline double mode_f(double theta) { return std::cos(theta); }
inline double mode_df(double theta) { return -std::sin(theta); }

namespace detail {

inline cplx pump_phase(const SystemParams& P, double t) {
    return {std::cos(P.delta_T * t), std::sin(P.delta_T * t)};
}

// dp/dt = -2 g f'(theta) Im{alpha^* beta}; shared by every model.
inline double optical_force(double g, double df, const cplx& alpha, const cplx& beta) {
    const double im = alpha.real() * beta.imag() - alpha.imag() * beta.real();
    return -2.0 * g * df * im;
}

}  // namespace detail

/// Full model with finite saturation (inversion beta_z evolves). The
/// inversion couples with the sign that keeps 4|beta|^2 + beta_z^2 <= 1.
inline DynRate rhs_full(const DynState& s, const SystemParams& P) {
    const double f = std::cos(s.theta);
    const double df = -std::sin(s.theta);
    const cplx drive = detail::pump_phase(P, s.t);
    const cplx cav{-P.kappa, P.delta_c};
    const cplx dip{-P.gamma, P.delta_a};

    DynRate r;
    r.alpha = cav * s.alpha - P.g * f * s.beta + P.eta_L;
    r.beta = dip * s.beta - P.g * f * s.alpha * s.beta_z - P.eta_T * s.beta_z * drive;
    const double re_ba = std::real(std::conj(s.beta) * s.alpha);
    const double re_bd = std::real(std::conj(s.beta) * drive);
    r.beta_z = -2.0 * P.gamma * (s.beta_z + 1.0) + 4.0 * P.g * f * re_ba + 4.0 * P.eta_T * re_bd;
    r.theta = 2.0 * P.omega_r * s.p;
    r.p = detail::optical_force(P.g, df, s.alpha, s.beta);
    return r;
}

/// Low-saturation model (beta_z -> -1).
inline DynRate rhs_linear(const DynState& s, const SystemParams& P) {
    const double f = std::cos(s.theta);
    const double df = -std::sin(s.theta);
    const cplx drive = detail::pump_phase(P, s.t);
    const cplx cav{-P.kappa, P.delta_c};
    const cplx dip{-P.gamma, P.delta_a};

    DynRate r;
    r.alpha = cav * s.alpha - P.g * f * s.beta + P.eta_L;
    r.beta = dip * s.beta + P.g * f * s.alpha + P.eta_T * drive;
    r.theta = 2.0 * P.omega_r * s.p;
    r.p = detail::optical_force(P.g, df, s.alpha, s.beta);
    return r;
}

/// Bosonic-limit model for N emitters sharing one centre of mass; beta holds
/// the collective coherence <S^->. The caller supplies the (reduced) recoil
/// frequency of the heavier particle through P.omega_r.
inline DynRate rhs_collective(const DynState& s, const SystemParams& P, int n_emitters) {
    if (n_emitters < 1) {
        throw ValidationError("collective model needs n_emitters >= 1");
    }
    const double n = static_cast<double>(n_emitters);
    const double f = std::cos(s.theta);
    const double df = -std::sin(s.theta);
    const cplx drive = detail::pump_phase(P, s.t);
    const cplx cav{-P.kappa, P.delta_c};
    const cplx dip{-P.gamma, P.delta_a};

    DynRate r;
    r.alpha = cav * s.alpha - P.g * f * s.beta + P.eta_L;
    r.beta = dip * s.beta + P.g * n * f * s.alpha + n * P.eta_T * drive;
    r.theta = 2.0 * P.omega_r * s.p;
    r.p = detail::optical_force(P.g, df, s.alpha, s.beta);
    return r;
}

enum class ModelKind { full, linear, collective };

struct ModelVariant {
    ModelKind kind = ModelKind::linear;
    int n_emitters = 1;

    std::string name() const {
        switch (kind) {
            case ModelKind::full: return "full";
            case ModelKind::linear: return "linear";
            case ModelKind::collective: return "collective";
        }
        return "unknown";
    }
};

/// Calls fn with a concrete RHS functor for the variant, so the integrator
/// loop is instantiated once per model instead of branching per step.
template <class Fn>
decltype(auto) visit_model(const SystemParams& P, const ModelVariant& model, Fn&& fn) {
    switch (model.kind) {
        case ModelKind::full:
            return fn([&P](const DynState& s) { return rhs_full(s, P); });
        case ModelKind::collective: {
            if (model.n_emitters < 1) {
                throw ValidationError("collective model needs n_emitters >= 1");
            }
            const int n = model.n_emitters;
            return fn([&P, n](const DynState& s) { return rhs_collective(s, P, n); });
        }
        case ModelKind::linear:
        default:
            return fn([&P](const DynState& s) { return rhs_linear(s, P); });
    }
}

/// Distance outside the Bloch ball: max(|beta_z| - 1, |beta|^2 - (1 - beta_z^2)/4, 0).
inline double bloch_violation(const DynState& s) {
    const double over_z = std::abs(s.beta_z) - 1.0;
    const double over_b = std::norm(s.beta) - (1.0 - s.beta_z * s.beta_z) / 4.0;
    return std::max({over_z, over_b, 0.0});
}

inline constexpr double bloch_warning_tolerance = 1e-6;

/// |beta_N|^2 / N; the bosonic approximation wants this well below one.
inline double collective_saturation(const DynState& s, int n_emitters) {
    return std::norm(s.beta) / static_cast<double>(n_emitters);
}

}  // namespace qrw
