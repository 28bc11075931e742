#pragma once

// Executes a parsed RunConfig and writes its tables, the resolved config and
// a manifest into the output directory.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "qrw/config.hpp"
#include "qrw/dynamics.hpp"
#include "qrw/ensemble.hpp"
#include "qrw/error.hpp"
#include "qrw/forces.hpp"
#include "qrw/kicked.hpp"
#include "qrw/langevin.hpp"
#include "qrw/output.hpp"
#include "qrw/trajectory.hpp"
#include "qrw/walk.hpp"

namespace qrw {

inline constexpr const char* output_dir_env = "QRW_OUTPUT_DIR";

/// Command-line value first, then the environment variable, then the config.
inline std::filesystem::path resolve_output_dir(const RunConfig& cfg,
                                                const std::optional<std::string>& cli_out = std::nullopt) {
    if (cli_out && !cli_out->empty()) return *cli_out;
    if (const char* env = std::getenv(output_dir_env); env != nullptr && *env != '\0') return env;
    return cfg.output_dir;
}

struct RunResult {
    std::filesystem::path dir;
    json manifest;
    std::vector<std::string> warnings;
};

namespace detail {

inline EnsembleSpec ensemble_spec_of(const RunConfig& cfg) {
    const auto& w = *cfg.walk;
    EnsembleSpec spec;
    spec.init = w.init == InitSource::thermal ? InitKind::thermal : InitKind::box;
    spec.box = w.box;
    spec.n_traj = w.n_traj;
    spec.n_steps = w.n_steps;
    spec.master_seed = cfg.seed;
    spec.model = cfg.model;
    spec.dt = cfg.integration->dt;
    spec.workers = cfg.workers;
    spec.tau_max = w.tau_max;
    spec.rounding = w.rounding;
    return spec;
}

inline std::vector<std::string> state_row(const DynState& s, bool with_inversion) {
    std::vector<std::string> r{format_real(s.t),          format_real(s.site_coordinate()),
                               format_real(s.p),          format_real(s.alpha.real()),
                               format_real(s.alpha.imag()), format_real(s.beta.real()),
                               format_real(s.beta.imag())};
    if (with_inversion) r.push_back(format_real(s.beta_z));
    return r;
}

inline void write_walk(const std::filesystem::path& path, double start_site, const std::vector<double>& sites) {
    CsvWriter out(path, {"n", "site"});
    out.row({"0", format_real(start_site)});
    for (std::size_t n = 0; n < sites.size(); ++n) {
        out.row({format_int(static_cast<long long>(n + 1)), format_real(sites[n])});
    }
    out.close();
}

inline json run_trajectory(const RunConfig& cfg, const std::filesystem::path& dir, Manifest& mf,
                           std::vector<std::string>& warnings) {
    const SystemParams& P = *cfg.system;
    const auto& w = *cfg.walk;
    double q0 = w.q0;
    double p0 = w.p0;
    if (w.init != InitSource::point) {
        const auto spec = ensemble_spec_of(cfg);
        std::tie(q0, p0) = member_initial_condition(P, spec, stream_seed(cfg.seed, 0));
    }
    DynState s0;
    s0.theta = two_pi * q0;
    s0.p = p0;

    SaturationMonitor monitor;
    const Trajectory traj = simulate(P, cfg.model, s0, *cfg.integration, &monitor);

    {
        std::vector<std::string> header{"t", "q", "p", "re_alpha", "im_alpha", "re_beta", "im_beta"};
        if (traj.has_inversion()) header.push_back("beta_z");
        CsvWriter out(dir / "trajectory.csv", header);
        for (const auto& s : traj.samples) out.row(state_row(s, traj.has_inversion()));
        out.close();
        mf.add_file("trajectory.csv");
    }

    json summary;
    summary["q0"] = q0;
    summary["p0"] = p0;
    summary["samples"] = traj.samples.size();
    const double T = P.jump_period();
    if (traj.duration() >= 2.0 * T * (1.0 - 1e-12)) {
        const auto walk = discretize(traj, T, w.rounding);
        const double start = round_to_site(q0, w.rounding);
        write_walk(dir / "walk.csv", start, walk.sites);
        mf.add_file("walk.csv");
        std::set<long> distinct{std::lround(2.0 * start)};
        std::size_t n_jumps = 0;
        for (double s : walk.sites) distinct.insert(std::lround(2.0 * s));
        for (double j : walk.jumps) n_jumps += j != 0.0;
        summary["windows"] = walk.sites.size();
        summary["distinct_sites"] = distinct.size();
        summary["nonzero_jumps"] = n_jumps;
    }
    {
        double q_min = traj.samples.front().site_coordinate(), q_max = q_min;
        for (const auto& s : traj.samples) {
            q_min = std::min(q_min, s.site_coordinate());
            q_max = std::max(q_max, s.site_coordinate());
        }
        summary["q_min"] = q_min;
        summary["q_max"] = q_max;
    }
    if (cfg.model.kind == ModelKind::full) {
        summary["max_bloch_violation"] = monitor.max_bloch_violation;
        if (monitor.bloch_warning()) {
            warnings.push_back("state left the Bloch ball by " + format_real(monitor.max_bloch_violation));
        }
    }
    if (cfg.model.kind == ModelKind::collective) {
        summary["max_collective_saturation"] = monitor.max_collective_saturation;
        if (monitor.max_collective_saturation > 0.1) {
            warnings.push_back("collective saturation |beta_N|^2/N reached " +
                               format_real(monitor.max_collective_saturation) +
                               "; the bosonic approximation is doubtful");
        }
    }
    return summary;
}

inline json run_ensemble(const RunConfig& cfg, const std::filesystem::path& dir, Manifest& mf) {
    const SystemParams& P = *cfg.system;
    const auto spec = ensemble_spec_of(cfg);
    const EnsembleStats st = ensemble_run(P, spec);

    {
        CsvWriter out(dir / "variance.csv", {"n", "var"});
        for (std::size_t n = 0; n < st.variance.size(); ++n) {
            out.row({format_int(static_cast<long long>(n)), format_real(st.variance[n])});
        }
        out.close();
        mf.add_file("variance.csv");
    }
    {
        CsvWriter out(dir / "hist.csv", {"site", "count"});
        for (const auto& [site, count] : st.histogram.bins()) out.row({format_real(site), format_int(count)});
        out.close();
        mf.add_file("hist.csv");
    }
    {
        CsvWriter out(dir / "corr.csv", {"tau", "C"});
        for (std::size_t k = 0; k < st.correlation.values.size(); ++k) {
            out.row({format_int(static_cast<long long>(k)), format_real(st.correlation.values[k])});
        }
        out.close();
        mf.add_file("corr.csv");
    }
    {
        CsvWriter out(dir / "members.csv", {"index", "seed", "q0", "p0", "start_site", "final_site"});
        for (std::size_t i = 0; i < st.members.size(); ++i) {
            const auto& m = st.members[i];
            out.row({format_int(static_cast<long long>(i)), std::to_string(m.seed), format_real(m.q0),
                     format_real(m.p0), format_real(m.start_site), format_real(m.final_site())});
        }
        out.close();
        mf.add_file("members.csv");
    }

    json summary;
    summary["T"] = st.period;
    summary["slope"] = st.diffusion.slope;
    summary["intercept"] = st.diffusion.intercept;
    summary["hist_mean"] = st.hist_mean;
    summary["hist_std"] = st.hist_std;
    summary["correlation_members"] = st.correlation_members;
    try {
        const auto mix = mixing_report(st.members);
        summary["mixing"] = {{"n_positive", mix.n_positive},
                             {"n_negative", mix.n_negative},
                             {"mean_difference", mix.mean_difference},
                             {"overlap", mix.overlap}};
    } catch (const StatisticsError&) {
        summary["mixing"] = nullptr;
    }
    return summary;
}

inline json run_langevin(const RunConfig& cfg, const std::filesystem::path& dir, Manifest& mf) {
    LangevinParams L = *cfg.langevin;
    L.master_seed = cfg.seed;
    L.workers = cfg.workers;
    const VarianceCurve c = langevin_run(L);

    CsvWriter out(dir / "langevin.csv", {"t", "var_mc", "var_analytic"});
    for (std::size_t i = 0; i < c.t.size(); ++i) {
        out.row({format_real(c.t[i]), format_real(c.var_mc[i]), format_real(c.var_analytic[i])});
    }
    out.close();
    mf.add_file("langevin.csv");

    json summary;
    summary["kernel"] = to_string(L.kernel.kind);
    summary["long_time_slope"] = long_time_slope(c);
    summary["delta_slope"] = 2.0 * L.kernel.d / (L.lambda_damp * L.lambda_damp);
    summary["kernel_slope"] = L.kernel.spectral_weight() / (L.lambda_damp * L.lambda_damp);
    return summary;
}

inline json run_comb_scan(const RunConfig& cfg, const std::filesystem::path& dir, Manifest& mf) {
    const auto& cb = *cfg.comb;
    const auto rows = chaos_scan(cb.k_values, cb.n_steps, cb.ensemble_size, cfg.seed, cfg.workers);

    CsvWriter out(dir / "scan.csv", {"K_eff", "growth_rate", "regime"});
    json summary = json::array();
    for (const auto& r : rows) {
        out.row({format_real(r.k_eff), format_real(r.growth_rate), to_string(r.regime)});
        summary.push_back({{"K_eff", r.k_eff}, {"late_ratio", r.late_ratio}, {"regime", to_string(r.regime)}});
    }
    out.close();
    mf.add_file("scan.csv");
    return json{{"rows", summary}};
}

}  // namespace detail

/// Grid of the adiabatic force components, t-major: for each time row every
/// theta in [0, 2 pi) is listed. Times span `periods` beat periods 2 pi / delta_T
/// with both ends included.
inline void force_profile(const RunConfig& cfg, const std::filesystem::path& path) {
    if (!cfg.system) throw ValidationError("force profile needs a system block");
    const SystemParams& P = *cfg.system;
    P.validate();
    const auto& fp = cfg.force_profile;
    const double span = P.delta_T != 0.0 ? fp.periods * two_pi / std::abs(P.delta_T) : 0.0;

    CsvWriter out(path, {"theta", "t", "F_L", "F_T", "F_LT", "total"});
    for (std::size_t k = 0; k < fp.n_t; ++k) {
        const double t = fp.n_t > 1 ? span * static_cast<double>(k) / static_cast<double>(fp.n_t - 1) : 0.0;
        for (std::size_t i = 0; i < fp.n_theta; ++i) {
            const double theta = two_pi * static_cast<double>(i) / static_cast<double>(fp.n_theta);
            const auto fb = force_breakdown(theta, t, P);
            out.row({format_real(theta), format_real(t), format_real(fb.f_L), format_real(fb.f_T),
                     format_real(fb.f_LT), format_real(fb.total)});
        }
    }
    out.close();
}

/// Runs the experiment and returns the manifest (also written to disk).
inline RunResult run(const RunConfig& cfg, const std::optional<std::string>& cli_out = std::nullopt) {
    RunResult res;
    res.dir = resolve_output_dir(cfg, cli_out);
    std::error_code ec;
    std::filesystem::create_directories(res.dir, ec);
    if (ec) throw Error(ErrorCategory::io, "cannot create " + res.dir.string() + ": " + ec.message());

    const auto t_start = std::chrono::steady_clock::now();
    Manifest mf(res.dir);

    write_text(res.dir / "config.resolved.json", echo_config(cfg).dump(2) + "\n");
    mf.add_file("config.resolved.json");

    json summary;
    switch (cfg.kind) {
        case ExperimentKind::trajectory:
            summary = detail::run_trajectory(cfg, res.dir, mf, res.warnings);
            break;
        case ExperimentKind::ensemble: summary = detail::run_ensemble(cfg, res.dir, mf); break;
        case ExperimentKind::langevin: summary = detail::run_langevin(cfg, res.dir, mf); break;
        case ExperimentKind::comb_scan: summary = detail::run_comb_scan(cfg, res.dir, mf); break;
        case ExperimentKind::force_profile:
            force_profile(cfg, res.dir / "force_profile.csv");
            mf.add_file("force_profile.csv");
            summary = json::object();
            break;
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    auto& doc = mf.doc();
    doc["kind"] = to_string(cfg.kind);
    doc["seeds"] = {{"master", cfg.seed}};
    doc["workers"] = cfg.workers == 0 ? default_workers() : cfg.workers;
    doc["derived"] = cfg.derived();
    doc["wall_clock_seconds"] = wall;
    doc["summary"] = summary;
    doc["warnings"] = res.warnings;
    mf.write();
    res.manifest = doc;
    return res;
}

}  // namespace qrw
