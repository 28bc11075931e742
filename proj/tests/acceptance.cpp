// Acceptance suite: prints one PASS/FAIL line per criterion.
//
// The quasi-random-walk ensembles run in a CI profile by default (200
// trajectories, dt = 0.05, slope band [0.12, 0.38]). Set
// QRW_ACCEPTANCE_PROFILE=full for 1000 trajectories at dt = 0.01 and the band
// [0.18, 0.32]. The exit status is non-zero only when the suite itself cannot
// run; pass --strict to also fail on any FAIL line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qrw/dynamics.hpp"
#include "qrw/ensemble.hpp"
#include "qrw/forces.hpp"
#include "qrw/integrators.hpp"
#include "qrw/kicked.hpp"
#include "qrw/langevin.hpp"
#include "qrw/runner.hpp"
#include "qrw/trajectory.hpp"
#include "qrw/walk.hpp"

using namespace qrw;
namespace fs = std::filesystem;

namespace {

struct Line {
    int id;
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

struct Profile {
    std::string name;
    std::size_t n_traj;
    double dt;
    double lo, hi;
};

Profile profile_from_env() {
    const char* p = std::getenv("QRW_ACCEPTANCE_PROFILE");
    if (p != nullptr && std::string(p) == "full") return {"full", 1000, 0.01, 0.18, 0.32};
    return {"ci", 200, 0.05, 0.12, 0.38};
}

constexpr std::uint64_t walk_seed = 20240611;

struct WalkResult {
    double T;
    double slope;
    double min_corr;  // min over 1 <= tau <= 5
    std::vector<double> corr;
};

WalkResult walk_ensemble(double T, const Profile& prof) {
    SystemParams P;
    P.delta_T = std::numbers::pi / T;
    EnsembleSpec spec;
    spec.n_traj = prof.n_traj;
    spec.n_steps = 100;
    spec.dt = prof.dt;
    spec.master_seed = walk_seed;
    spec.tau_max = 5;
    const auto st = ensemble_run(P, spec);
    WalkResult r{T, st.diffusion.slope, 1e9, st.correlation.values};
    for (std::size_t k = 1; k <= 5; ++k) r.min_corr = std::min(r.min_corr, st.correlation.values[k]);
    return r;
}

// One member integrated over ten jump periods at dt and dt/2.
std::pair<bool, std::string> dt_convergence(double T, double dt) {
    SystemParams P;
    P.delta_T = std::numbers::pi / T;
    EnsembleSpec spec;
    spec.master_seed = walk_seed;
    const auto [q0, p0] = member_initial_condition(P, spec, stream_seed(walk_seed, 0));
    DynState s0;
    s0.theta = two_pi * q0;
    s0.p = p0;
    auto run = [&](double h) {
        return simulate(P, ModelVariant{}, s0, IntegrationPlan{h, 10.0 * T, 1});
    };
    const auto a = run(dt);
    const auto b = run(0.5 * dt);
    const auto wa = discretize(a, T);
    const auto wb = discretize(b, T);
    const auto& ea = a.samples.back();
    const auto& eb = b.samples.back();
    const double diff = std::abs(ea.theta - eb.theta) + std::abs(ea.p - eb.p) + std::abs(ea.alpha - eb.alpha) +
                        std::abs(ea.beta - eb.beta);
    const double scale = std::abs(eb.theta) + std::abs(eb.p) + std::abs(eb.alpha) + std::abs(eb.beta);
    const bool ok = wa.sites == wb.sites && diff <= 1e-4 * scale;
    return {ok, "dt-check rel diff " + fmt("%.2e", diff / scale) + (wa.sites == wb.sites ? ", same sites" : ", sites differ")};
}

Line criterion1(const std::map<double, WalkResult>& w, const Profile& prof) {
    const auto [conv_ok, conv_msg] = dt_convergence(250.0, prof.dt);
    const double s = w.at(250.0).slope;
    const bool in_band = s >= prof.lo && s <= prof.hi;
    return {1, conv_ok && in_band,
            "T=250 slope " + fmt("%.4f", s) + " (band [" + fmt("%.2f", prof.lo) + ", " + fmt("%.2f", prof.hi) +
                "], " + prof.name + " profile, " + std::to_string(prof.n_traj) + " trajectories); " + conv_msg};
}

Line criterion2(const std::map<double, WalkResult>& w) {
    const double s200 = w.at(200.0).slope, s250 = w.at(250.0).slope, s300 = w.at(300.0).slope;
    return {2, s200 < s250 && s300 < s250,
            "slopes T=200 " + fmt("%.4f", s200) + ", T=250 " + fmt("%.4f", s250) + ", T=300 " + fmt("%.4f", s300)};
}

Line criterion3(const std::map<double, WalkResult>& w) {
    const double m200 = w.at(200.0).min_corr, m250 = w.at(250.0).min_corr, m300 = w.at(300.0).min_corr;
    const bool pass = m200 < -0.05 && m300 < -0.05 && m250 > m200 && m250 > m300;
    return {3, pass,
            "min C(1..5): T=200 " + fmt("%.4f", m200) + ", T=250 " + fmt("%.4f", m250) + ", T=300 " +
                fmt("%.4f", m300)};
}

Line criterion4() {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> uth(0.0, two_pi), ut(0.0, 1000.0);
    const SystemParams P;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double th = uth(rng), t = ut(rng);
        const auto fb = force_breakdown(th, t, P);
        const double direct = adiabatic_force(th, t, P);
        const double scale = std::max(std::abs(fb.f_L) + std::abs(fb.f_T) + std::abs(fb.f_LT), std::abs(direct));
        if (scale > 0.0) worst = std::max(worst, std::abs(fb.total - direct) / scale);
    }
    SystemParams S = P;
    S.delta_T = 0.0;
    double worst_static = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double th = uth(rng);
        const double a = force_breakdown(th, ut(rng), S).f_LT;
        const double b = interference_force_static(th, S);
        if (b != 0.0) worst_static = std::max(worst_static, std::abs(a - b) / std::abs(b));
    }
    return {4, worst <= 1e-10 && worst_static <= 1e-12,
            "identity rel err " + fmt("%.2e", worst) + ", static reduction rel err " + fmt("%.2e", worst_static)};
}

Line criterion5() {
    LangevinParams L;
    L.n_realizations = 8000;
    L.n_output = 20;
    L.master_seed = 5;
    const auto c = langevin_run(L);
    int outside = 0;
    for (std::size_t i = 0; i < c.t.size(); ++i) {
        if (std::abs(c.var_mc[i] - c.var_analytic[i]) > 3.0 * c.std_err[i]) ++outside;
    }
    double worst_quad = 0.0;
    for (double t : {0.5, 2.0, 10.0, 40.0}) {
        const double q = variance_double_integral(L.kernel, L.lambda_damp, t);
        const double a = variance_analytic(L.lambda_damp, L.kernel.d, t);
        worst_quad = std::max(worst_quad, std::abs(q - a) / a);
    }
    const double bound = 2.0 * L.kernel.d / (L.lambda_damp * L.lambda_damp);

    bool colored_ok = true;
    std::string slopes;
    for (auto kind : {KernelKind::gaussian_cosine, KernelKind::exponential_cosine}) {
        double prev = 1e9;
        slopes += std::string(" ") + to_string(kind) + ":";
        for (double Om : {0.5, 1.0, 1.5, 2.0}) {
            LangevinParams K;
            K.kernel = {kind, 0.125, 0.5, Om};
            K.n_realizations = 4000;
            K.n_output = 200;
            K.master_seed = 5;
            const double s = long_time_slope(langevin_run(K));
            slopes += " " + fmt("%.3f", s);
            if (!(s < bound) || s > prev) colored_ok = false;
            prev = s;
        }
    }
    const bool pass = outside == 0 && worst_quad <= 1e-6 && colored_ok;
    return {5, pass,
            "delta MC outside 3 SE at " + std::to_string(outside) + "/20 times; quadrature rel err " +
                fmt("%.1e", worst_quad) + "; bound 2d/lambda^2 = " + fmt("%.3f", bound) + ";" + slopes};
}

Line criterion6() {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    const double h = 1e-5;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const KickedState z{u(rng), u(rng), 0};
        const double K = 10.0;
        auto f = [&](double dx, double dp) { return standard_map_step({z.x + dx, z.p + dp, 0}, K); };
        const auto xp = f(h, 0), xm = f(-h, 0), pp = f(0, h), pm = f(0, -h);
        const double det = ((xp.x - xm.x) * (pp.p - pm.p) - (pp.x - pm.x) * (xp.p - xm.p)) / (4 * h * h);
        worst = std::max(worst, std::abs(det - 1.0));
    }
    const auto rows = chaos_scan({0.1, 10.0}, 200, 10000, 6, 0);
    const double ratio = rows[1].growth_rate / (100.0 / 2.0);
    const bool pass = worst <= 1e-8 && std::abs(ratio - 1.0) <= 0.25 && rows[0].regime == KickRegime::bounded;
    return {6, pass,
            "|det J - 1| " + fmt("%.1e", worst) + "; K=10 growth/(K^2/2) " + fmt("%.3f", ratio) + "; K=0.1 " +
                to_string(rows[0].regime) + " (growth " + fmt("%.2e", rows[0].growth_rate) + ")"};
}

Line criterion7() {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SystemParams R;
    R.g = 0.3;
    bool exact = true;
    for (int i = 0; i < 1000; ++i) {
        DynState s;
        s.t = 1000.0 * std::abs(u(rng));
        s.theta = 7.0 * u(rng);
        s.p = 3.0 * u(rng);
        s.alpha = {u(rng), u(rng)};
        s.beta = {u(rng), u(rng)};
        const auto a = rhs_full(s, R), b = rhs_linear(s, R), c = rhs_collective(s, R, 1);
        auto same = [](const DynRate& x, const DynRate& y) {
            return x.theta == y.theta && x.p == y.p && x.alpha == y.alpha && x.beta == y.beta;
        };
        exact = exact && same(a, b) && same(b, c);
    }

    SystemParams P;
    P.eta_T = 0.1;
    DynState s0;
    s0.theta = two_pi * 0.05;
    const IntegrationPlan plan{0.01, 100.0, 1};
    const auto full = simulate(P, ModelVariant{ModelKind::full, 1}, s0, plan);
    const auto lin = simulate(P, ModelVariant{ModelKind::linear, 1}, s0, plan);
    double worst = 0.0, max_b2 = 0.0;
    for (std::size_t i = 0; i < full.samples.size(); ++i) {
        const auto& a = full.samples[i];
        const auto& b = lin.samples[i];
        max_b2 = std::max(max_b2, std::norm(a.beta));
        const double d = std::abs(a.theta - b.theta) + std::abs(a.p - b.p) + std::abs(a.alpha - b.alpha) +
                         std::abs(a.beta - b.beta);
        const double n = std::abs(b.theta) + std::abs(b.p) + std::abs(b.alpha) + std::abs(b.beta);
        worst = std::max(worst, d / n);
    }
    return {7, exact && max_b2 < 1e-2 && worst < 1e-2,
            std::string("identities ") + (exact ? "exact" : "broken") + " on 1000 states; full vs linear rel diff " +
                fmt("%.2e", worst) + " with max |beta|^2 " + fmt("%.2e", max_b2)};
}

// Synthetic continuous trajectories that sit on i.i.d. +-1/2 walk sites for one
// period each, fed through windowing, rounding and the ensemble statistics.
Line criterion8() {
    const std::size_t members = 1000, steps = 100;
    const double T = 10.0, dt = 0.5;
    std::mt19937_64 rng(8);
    std::bernoulli_distribution coin(0.5);
    std::normal_distribution<double> jitter(0.0, 0.02);
    std::vector<MemberSummary> ms(members);
    for (auto& m : ms) {
        std::vector<double> site(steps);
        double x = 0.0;
        for (auto& s : site) s = (x += coin(rng) ? 0.5 : -0.5);
        WindowAverager avg(T, 0.0);
        const auto per = static_cast<std::size_t>(std::llround(T / dt));
        for (std::size_t k = 0; k <= steps * per; ++k) {
            const std::size_t w = std::min(k / per, steps - 1);
            avg.push(static_cast<double>(k) * dt, site[w] + jitter(rng));
        }
        for (double q : avg.means()) m.sites.push_back(round_to_site(q));
    }
    const auto st = aggregate_members(ms, T, 10);

    // Monte Carlo error of the slope from 20 disjoint batches.
    std::vector<double> batch;
    for (std::size_t b = 0; b < 20; ++b) {
        std::vector<MemberSummary> sub(ms.begin() + b * 50, ms.begin() + (b + 1) * 50);
        batch.push_back(aggregate_members(sub, T, 10).diffusion.slope);
    }
    double mean = 0.0, var = 0.0;
    for (double s : batch) mean += s / 20.0;
    for (double s : batch) var += (s - mean) * (s - mean) / 19.0;
    const double se = std::sqrt(var / 20.0);

    double worst_c = 0.0;
    for (std::size_t k = 1; k < st.correlation.values.size(); ++k) {
        worst_c = std::max(worst_c, std::abs(st.correlation.values[k]));
    }
    const bool pass = std::abs(st.diffusion.slope - 0.25) <= 3.0 * se && worst_c < 0.05;
    return {8, pass,
            "slope " + fmt("%.4f", st.diffusion.slope) + " +- " + fmt("%.4f", se) + "; max |C(1..10)| " +
                fmt("%.4f", worst_c)};
}

Line criterion9() {
    SystemParams Q;
    Q.eta_T = 0.0;
    const double T = Q.jump_period();
    const auto rest = simulate(Q, ModelVariant{}, DynState{}, IntegrationPlan{0.05, 100.0 * T, 1});
    const auto wr = discretize(rest, T);
    const auto jumps = std::count_if(wr.jumps.begin(), wr.jumps.end(), [](double j) { return j != 0.0; });

    const SystemParams P;  // eta_T = 0.55, delta_T = pi/100
    DynState s0;
    s0.theta = two_pi * 0.0035;
    const auto tr = simulate(P, ModelVariant{}, s0, IntegrationPlan{0.01, 1e4, 1});
    const auto w = discretize(tr, P.jump_period());
    std::vector<long> keys{std::lround(2.0 * round_to_site(0.0035))};
    for (double s : w.sites) keys.push_back(std::lround(2.0 * s));
    std::sort(keys.begin(), keys.end());
    const auto distinct = std::unique(keys.begin(), keys.end()) - keys.begin();
    return {9, jumps == 0 && wr.sites.size() == 100 && distinct >= 3,
            "eta_T=0: " + std::to_string(jumps) + " jumps in " + std::to_string(wr.sites.size()) +
                " windows; reference run visits " + std::to_string(distinct) + " distinct sites in 1e4"};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Line criterion10() {
    const std::string sys =
        R"("system": {"gamma": 1, "delta_a": -1.5, "delta_c": -1.5, "eta_L": 1, "eta_T": 0.55, "g": 0.01, "omega_r": 0.1})";
    const std::vector<std::string> configs = {
        R"({"kind": "trajectory", "seed": 1, )" + sys +
            R"(, "integration": {"dt": 0.05, "t_end": 1000, "sample_stride": 10}, "walk": {"T": 100, "init": {"kind": "box"}}})",
        R"({"kind": "ensemble", "seed": 2, )" + sys +
            R"(, "integration": {"dt": 0.05}, "walk": {"T": 250, "n_steps": 10, "n_traj": 12, "tau_max": 3}})",
        R"({"kind": "langevin", "seed": 3, "langevin": {"n_realizations": 200, "kernel": {"kind": "exponential-cosine", "Omega": 1}}})",
        R"({"kind": "comb-scan", "seed": 4, "comb": {"n_steps": 100, "ensemble_size": 500}})",
        R"({"kind": "force-profile", "seed": 5, )" + sys + R"(, "walk": {"delta_T": 0.0314}})"};
    const auto base = fs::temp_directory_path() / "qrw_acceptance_determinism";
    fs::remove_all(base);
    std::size_t files = 0, mismatches = 0;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        std::vector<fs::path> dirs;
        for (unsigned w : {1u, 2u, 5u}) {
            auto cfg = parse_config(configs[i]);
            cfg.workers = w;
            const auto dir = base / (std::to_string(i) + "_" + std::to_string(w));
            run(cfg, dir.string());
            dirs.push_back(dir);
        }
        for (const auto& e : fs::directory_iterator(dirs[0])) {
            if (e.path().extension() != ".csv") continue;
            const auto ref = slurp(e.path());
            for (std::size_t k = 1; k < dirs.size(); ++k) {
                ++files;
                if (slurp(dirs[k] / e.path().filename()) != ref) ++mismatches;
            }
        }
    }
    fs::remove_all(base);
    return {10, mismatches == 0 && files > 0,
            std::to_string(files) + " data-file comparisons across 1, 2 and 5 workers, " +
                std::to_string(mismatches) + " mismatches"};
}

}  // namespace

int main(int argc, char** argv) {
    const bool strict = argc > 1 && std::string(argv[1]) == "--strict";
    const auto prof = profile_from_env();
    std::vector<Line> lines;
    try {
        std::map<double, WalkResult> walks;
        for (double T : {200.0, 250.0, 300.0}) walks.emplace(T, walk_ensemble(T, prof));
        lines.push_back(criterion1(walks, prof));
        lines.push_back(criterion2(walks));
        lines.push_back(criterion3(walks));
        lines.push_back(criterion4());
        lines.push_back(criterion5());
        lines.push_back(criterion6());
        lines.push_back(criterion7());
        lines.push_back(criterion8());
        lines.push_back(criterion9());
        lines.push_back(criterion10());
    } catch (const std::exception& e) {
        std::printf("acceptance suite aborted: %s\n", e.what());
        return 2;
    }
    int failed = 0;
    for (const auto& l : lines) {
        std::printf("criterion %2d: %s  %s\n", l.id, l.pass ? "PASS" : "FAIL", l.detail.c_str());
        failed += !l.pass;
    }
    std::printf("%d/%zu criteria pass\n", static_cast<int>(lines.size()) - failed, lines.size());
    std::fflush(stdout);
    return strict && failed > 0 ? 1 : 0;
}
