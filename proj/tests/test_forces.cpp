#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>

#include "qrw/dynamics.hpp"
#include "qrw/forces.hpp"
#include "qrw/integrators.hpp"

using namespace qrw;
using Catch::Approx;

TEST_CASE("force decomposition reassembles the eliminated-variable force") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ut(0.0, 1000.0);
    std::uniform_real_distribution<double> uth(0.0, two_pi);
    for (const auto& P : {SystemParams::reference(), SystemParams{1.0, 1.0, -3.0, 0.7, 0.2, 2.0, 1.3, 0.4, 0.1}}) {
        for (int i = 0; i < 1000; ++i) {
            const double theta = uth(rng), t = ut(rng);
            const auto fb = force_breakdown(theta, t, P);
            const double direct = adiabatic_force(theta, t, P);
            const double scale = std::abs(fb.f_L) + std::abs(fb.f_T) + std::abs(fb.f_LT);
            REQUIRE(std::abs(fb.total - direct) <= 1e-10 * std::max(scale, std::abs(direct)));
        }
    }
}

TEST_CASE("static interference force is the delta_T = 0 limit") {
    SystemParams P;
    P.delta_T = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double theta = 0.13 * i;
        const double a = force_breakdown(theta, 17.0, P).f_LT;
        const double b = interference_force_static(theta, P);
        CHECK(std::abs(a - b) <= 1e-12 * std::max(std::abs(b), 1e-300));
    }
}

TEST_CASE("photon number closed form matches the steady field") {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(0.0, 200.0);
    SystemParams P;
    P.g = 0.3;
    for (int i = 0; i < 200; ++i) {
        const double theta = u(rng), t = u(rng);
        CHECK(std::norm(steady_alpha(theta, t, P)) == Approx(steady_photon_number(theta, t, P)).epsilon(1e-12));
    }
}

TEST_CASE("steady cavity field is the fixed point of the cavity equation with eliminated dipole") {
    SystemParams P;
    P.delta_T = 0.0;
    P.g = 0.2;
    const double theta = 0.4;
    // State component alpha evolves; everything else is frozen.
    auto rhs = [&](const DynState& s) {
        DynRate r;
        const cplx gb = eliminated_dipole(s.alpha, theta, s.t, P);
        r.alpha = cplx(-P.kappa, P.delta_c) * s.alpha - mode_f(theta) * gb + P.eta_L;
        return r;
    };
    const auto end = integrate_each(rhs, DynState{}, IntegrationPlan{0.01, 40.0, 1}, [](const DynState&) {});
    CHECK(std::abs(end.alpha - steady_alpha(theta, 0.0, P)) < 1e-8);
}

TEST_CASE("eliminated dipole matches the relaxed dipole at large detuning") {
    SystemParams P;
    P.delta_T = 0.0;
    P.delta_a = -100.0;
    P.g = 0.5;
    const double theta = 0.9;
    const cplx alpha{0.4, -0.3};
    auto rhs = [&](const DynState& s) {
        DynRate r;
        r.beta = cplx(-P.gamma, P.delta_a) * s.beta + P.g * mode_f(theta) * alpha + P.eta_T;
        return r;
    };
    const auto end = integrate_each(rhs, DynState{}, IntegrationPlan{0.001, 20.0, 1}, [](const DynState&) {});
    const cplx numeric = P.g * end.beta;
    const cplx elim = eliminated_dipole(alpha, theta, 0.0, P);
    CHECK(std::abs(numeric - elim) <= 2.0 * P.gamma / std::abs(P.delta_a) * std::abs(elim));
}

TEST_CASE("interference approximation with the light shift dropped") {
    const SystemParams P;
    for (int i = 0; i < 40; ++i) {
        const double theta = 0.3 + 0.15 * i, t = 7.0 * i;
        const double exact = force_breakdown(theta, t, P).f_LT;
        const double approx = force_interference_approx(theta, t, P);
        CHECK(std::abs(exact - approx) <= 1e-3 * 2.0 * std::abs(P.eta_bar_T()) * P.eta_L /
                                              std::hypot(P.kappa, P.delta_c));
    }
}

TEST_CASE("forces vanish at theta = 0") {
    const SystemParams P;
    const auto fb = force_breakdown(0.0, 12.3, P);
    CHECK(fb.f_L == 0.0);
    CHECK(fb.f_T == 0.0);
    CHECK(fb.f_LT == 0.0);
}

TEST_CASE("static interference trap frequency matches the potential curvature") {
    SystemParams P;
    P.delta_T = 0.0;
    const double h = 1e-4;
    double best = 0.0;
    for (double th : {0.0, std::numbers::pi}) {
        const double dF = (interference_force_static(th + h, P) - interference_force_static(th - h, P)) / (2 * h);
        best = std::max(best, -2.0 * P.omega_r * dF);
    }
    const auto spec = trap_spectrum(P);
    REQUIRE(spec.omega_tr_LT.frequency().has_value());
    CHECK(best == Approx(spec.omega_tr_LT.squared).epsilon(1e-3));
}

TEST_CASE("trap spectrum reports negative squares as untrapped") {
    const SystemParams P;  // U0 < 0
    const auto spec = trap_spectrum(P);
    CHECK(spec.omega_tr_L.squared < 0.0);
    CHECK_FALSE(spec.omega_tr_L.frequency().has_value());
    const auto eff = trap_spectrum(P, DoubleWellPump::effective_eta_bar_T);
    CHECK(eff.omega_bar_plus.squared != spec.omega_bar_plus.squared);
}

TEST_CASE("regime classification") {
    const SystemParams P;
    CHECK(regime_check(P) == Regime::interference_trapping);
    SystemParams Q;
    Q.eta_T = 0.0;
    CHECK(regime_check(Q) == Regime::longitudinal_trapping);
    CHECK(to_string(Regime::interference_trapping) == "interference-trapping");
}

TEST_CASE("jump threshold estimate") {
    const SystemParams P;
    CHECK(jump_threshold_estimate(P) == Approx(0.01 / (2.0 * std::sqrt(3.25))));
    CHECK(jump_threshold_estimate(P) == Approx(2.7735e-3).epsilon(1e-4));
}
