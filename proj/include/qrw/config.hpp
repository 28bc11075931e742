#pragma once

// Declarative run configuration (JSON). Parsing is strict: unknown keys,
// missing required fields and inconsistent choices are all collected and
// reported together, each tagged with its JSON path.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qrw/dynamics.hpp"
#include "qrw/ensemble.hpp"
#include "qrw/error.hpp"
#include "qrw/integrators.hpp"
#include "qrw/langevin.hpp"
#include "qrw/walk.hpp"

namespace qrw {

using json = nlohmann::json;

enum class ExperimentKind { trajectory, ensemble, langevin, comb_scan, force_profile };

inline std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::trajectory: return "trajectory";
        case ExperimentKind::ensemble: return "ensemble";
        case ExperimentKind::langevin: return "langevin";
        case ExperimentKind::comb_scan: return "comb-scan";
        case ExperimentKind::force_profile: return "force-profile";
    }
    return "trajectory";
}

inline std::optional<ExperimentKind> experiment_kind_from(const std::string& s) {
    for (auto k : {ExperimentKind::trajectory, ExperimentKind::ensemble, ExperimentKind::langevin,
                   ExperimentKind::comb_scan, ExperimentKind::force_profile}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

enum class InitSource { point, box, thermal };

struct WalkBlock {
    std::optional<double> T;        // exactly one of T, delta_T is given
    std::optional<double> delta_T;
    std::size_t n_steps = 100;
    std::size_t n_traj = 1000;
    std::size_t tau_max = 10;
    SiteRounding rounding = SiteRounding::half_integer;
    InitSource init = InitSource::box;
    InitBox box;
    double q0 = 0.0;
    double p0 = 0.0;

    double resolved_delta_T() const { return delta_T ? *delta_T : std::numbers::pi / *T; }
    double resolved_T() const { return T ? *T : std::numbers::pi / *delta_T; }
};

struct CombBlock {
    std::vector<double> k_values{0.1, 0.5, 1.0, 2.0, 5.0, 10.0};
    std::size_t n_steps = 200;
    std::size_t ensemble_size = 10000;
};

struct ForceProfileBlock {
    std::size_t n_theta = 64;
    std::size_t n_t = 65;
    double periods = 2.0;  // time span in beat periods 2 pi / delta_T
};

struct RunConfig {
    ExperimentKind kind = ExperimentKind::trajectory;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    std::string output_dir = "out";

    std::optional<SystemParams> system;
    ModelVariant model;
    std::optional<IntegrationPlan> integration;
    std::optional<WalkBlock> walk;
    std::optional<LangevinParams> langevin;
    std::optional<CombBlock> comb;
    ForceProfileBlock force_profile;

    /// Derived quantities echoed alongside the resolved config.
    json derived() const {
        json d = json::object();
        if (system) {
            d["U0"] = system->U0();
            d["eta_bar_T"] = system->eta_bar_T();
            d["phi_Delta"] = system->phi_Delta();
            d["delta_T"] = system->delta_T;
            if (system->delta_T != 0.0) d["T"] = system->jump_period();
        }
        if (langevin) {
            const double l = langevin->lambda_damp;
            d["delta_slope"] = 2.0 * langevin->kernel.d / (l * l);
            d["kernel_slope"] = langevin->kernel.spectral_weight() / (l * l);
        }
        return d;
    }
};

namespace detail {

/// Walks one JSON object, remembering which keys were read so leftovers can
/// be reported as unknown.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string path, std::vector<std::string>& diags)
        : obj_(obj), path_(std::move(path)), diags_(diags) {}

    bool has(const std::string& key) const { return obj_.contains(key); }

    template <class T>
    std::optional<T> optional(const std::string& key) {
        seen_.insert(key);
        if (!obj_.contains(key)) return std::nullopt;
        try {
            return obj_.at(key).get<T>();
        } catch (const json::exception&) {
            diags_.push_back(at(key) + ": wrong type");
            return std::nullopt;
        }
    }

    template <class T>
    std::optional<T> required(const std::string& key) {
        if (!obj_.contains(key)) {
            seen_.insert(key);
            diags_.push_back(at(key) + ": missing required field");
            return std::nullopt;
        }
        return optional<T>(key);
    }

    std::optional<double> number(const std::string& key, bool is_required) {
        seen_.insert(key);
        if (!obj_.contains(key)) {
            if (is_required) diags_.push_back(at(key) + ": missing required field");
            return std::nullopt;
        }
        const auto& v = obj_.at(key);
        if (!v.is_number()) {
            diags_.push_back(at(key) + ": expected a number");
            return std::nullopt;
        }
        return v.get<double>();
    }

    std::optional<std::size_t> count(const std::string& key, bool is_required) {
        seen_.insert(key);
        if (!obj_.contains(key)) {
            if (is_required) diags_.push_back(at(key) + ": missing required field");
            return std::nullopt;
        }
        const auto& v = obj_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            diags_.push_back(at(key) + ": expected a non-negative integer");
            return std::nullopt;
        }
        return static_cast<std::size_t>(v.get<long long>());
    }

    /// Child object; reports a diagnostic if present with the wrong type.
    const json* object(const std::string& key) {
        seen_.insert(key);
        if (!obj_.contains(key)) return nullptr;
        if (!obj_.at(key).is_object()) {
            diags_.push_back(at(key) + ": expected an object");
            return nullptr;
        }
        return &obj_.at(key);
    }

    void reject_unknown() {
        for (const auto& [k, v] : obj_.items()) {
            if (!seen_.count(k)) diags_.push_back(at(k) + ": unknown key");
        }
    }

    std::string at(const std::string& key) const { return path_ + "/" + key; }
    const std::string& path() const { return path_; }

private:
    const json& obj_;
    std::string path_;
    std::vector<std::string>& diags_;
    std::set<std::string> seen_;
};

inline SystemParams parse_system(const json& obj, std::vector<std::string>& diags) {
    ObjectReader r(obj, "/system", diags);
    SystemParams P;
    if (auto v = r.number("kappa", false)) P.kappa = *v;
    auto set = [&](const char* key, double& field) {
        if (auto v = r.number(key, true)) field = *v;
    };
    set("gamma", P.gamma);
    set("delta_a", P.delta_a);
    set("delta_c", P.delta_c);
    set("eta_L", P.eta_L);
    set("eta_T", P.eta_T);
    set("g", P.g);
    set("omega_r", P.omega_r);
    r.reject_unknown();
    for (const auto& p : P.problems()) diags.push_back("/system: " + p);
    if (P.delta_a == 0.0) diags.push_back("/system/delta_a: must be non-zero");
    return P;
}

inline ModelVariant parse_model(const json& obj, std::vector<std::string>& diags) {
    ObjectReader r(obj, "/model", diags);
    ModelVariant m;
    if (auto v = r.optional<std::string>("variant")) {
        if (*v == "full") m.kind = ModelKind::full;
        else if (*v == "linear") m.kind = ModelKind::linear;
        else if (*v == "collective") m.kind = ModelKind::collective;
        else diags.push_back("/model/variant: expected full, linear or collective");
    }
    if (auto n = r.count("n_emitters", false)) m.n_emitters = static_cast<int>(*n);
    if (m.kind == ModelKind::collective && m.n_emitters < 1) {
        diags.push_back("/model/n_emitters: must be >= 1");
    }
    if (m.kind != ModelKind::collective && r.has("n_emitters") && m.n_emitters != 1) {
        diags.push_back("/model/n_emitters: only meaningful for the collective variant");
    }
    r.reject_unknown();
    return m;
}

inline IntegrationPlan parse_integration(const json& obj, bool need_t_end, std::vector<std::string>& diags) {
    ObjectReader r(obj, "/integration", diags);
    IntegrationPlan plan;
    if (auto v = r.number("dt", true)) plan.dt = *v;
    if (auto v = r.number("t_end", need_t_end)) plan.t_end = *v;
    if (auto v = r.count("sample_stride", false)) plan.sample_stride = *v;
    r.reject_unknown();
    if (!(plan.dt > 0.0)) diags.push_back("/integration/dt: must be > 0");
    if (!(plan.t_end > 0.0)) diags.push_back("/integration/t_end: must be > 0");
    if (plan.sample_stride < 1) diags.push_back("/integration/sample_stride: must be >= 1");
    return plan;
}

inline WalkBlock parse_walk(const json& obj, ExperimentKind kind, std::vector<std::string>& diags) {
    ObjectReader r(obj, "/walk", diags);
    WalkBlock w;
    w.T = r.number("T", false);
    w.delta_T = r.number("delta_T", false);
    if (w.T && w.delta_T) {
        diags.push_back("/walk: T and delta_T are mutually exclusive; give exactly one");
    } else if (!w.T && !w.delta_T) {
        diags.push_back("/walk: one of T or delta_T is required");
    }
    if (w.T && !(*w.T != 0.0)) diags.push_back("/walk/T: must be non-zero");
    if (w.delta_T && !(*w.delta_T != 0.0)) diags.push_back("/walk/delta_T: must be non-zero");

    const bool ens = kind == ExperimentKind::ensemble;
    if (auto v = r.count("n_steps", ens)) w.n_steps = *v;
    if (auto v = r.count("n_traj", ens)) w.n_traj = *v;
    if (auto v = r.count("tau_max", false)) w.tau_max = *v;
    if (auto v = r.optional<std::string>("rounding")) {
        if (*v == "half-integer") w.rounding = SiteRounding::half_integer;
        else if (*v == "integer") w.rounding = SiteRounding::integer;
        else diags.push_back("/walk/rounding: expected half-integer or integer");
    }
    w.init = ens ? InitSource::box : InitSource::point;
    if (const json* init = r.object("init")) {
        ObjectReader ir(*init, "/walk/init", diags);
        if (auto k = ir.required<std::string>("kind")) {
            if (*k == "box") w.init = InitSource::box;
            else if (*k == "thermal") w.init = InitSource::thermal;
            else if (*k == "point") w.init = InitSource::point;
            else diags.push_back("/walk/init/kind: expected box, thermal or point");
        }
        if (w.init == InitSource::box) {
            if (auto v = ir.number("x_half_width", false)) w.box.x_half_width = *v;
            if (auto v = ir.number("p_half_width", false)) w.box.p_half_width = *v;
            if (!(w.box.x_half_width >= 0.0) || !(w.box.p_half_width >= 0.0)) {
                diags.push_back("/walk/init: half widths must be >= 0");
            }
        }
        if (w.init == InitSource::point) {
            if (ens) diags.push_back("/walk/init/kind: point start is only valid for trajectory runs");
            if (auto v = ir.number("q0", false)) w.q0 = *v;
            if (auto v = ir.number("p0", false)) w.p0 = *v;
        }
        ir.reject_unknown();
    }
    if (ens && w.n_traj < 1) diags.push_back("/walk/n_traj: must be >= 1");
    if (ens && w.n_steps < 1) diags.push_back("/walk/n_steps: must be >= 1");
    r.reject_unknown();
    return w;
}

inline LangevinParams parse_langevin(const json& obj, std::vector<std::string>& diags) {
    ObjectReader r(obj, "/langevin", diags);
    LangevinParams L;
    if (auto v = r.number("lambda", false)) L.lambda_damp = *v;
    if (auto v = r.number("dt", false)) L.dt = *v;
    if (auto v = r.number("t_end", false)) L.t_end = *v;
    if (auto v = r.count("n_realizations", false)) L.n_realizations = *v;
    if (auto v = r.count("n_output", false)) L.n_output = *v;
    if (const json* k = r.object("kernel")) {
        ObjectReader kr(*k, "/langevin/kernel", diags);
        if (auto kind = kr.required<std::string>("kind")) {
            if (*kind == "delta") L.kernel.kind = KernelKind::delta;
            else if (*kind == "gaussian-cosine") L.kernel.kind = KernelKind::gaussian_cosine;
            else if (*kind == "exponential-cosine") L.kernel.kind = KernelKind::exponential_cosine;
            else diags.push_back("/langevin/kernel/kind: expected delta, gaussian-cosine or exponential-cosine");
        }
        if (auto v = kr.number("d", false)) L.kernel.d = *v;
        if (auto v = kr.number("sigma", false)) L.kernel.sigma = *v;
        if (auto v = kr.number("Omega", false)) L.kernel.Omega = *v;
        kr.reject_unknown();
    } else {
        diags.push_back("/langevin/kernel: missing required field");
    }
    r.reject_unknown();
    try {
        L.validate();
    } catch (const ValidationError& e) {
        diags.push_back(std::string("/langevin: ") + e.what());
    }
    return L;
}

inline CombBlock parse_comb(const json& obj, std::vector<std::string>& diags) {
    ObjectReader r(obj, "/comb", diags);
    CombBlock c;
    if (auto v = r.optional<std::vector<double>>("k_values")) c.k_values = *v;
    if (auto v = r.count("n_steps", false)) c.n_steps = *v;
    if (auto v = r.count("ensemble_size", false)) c.ensemble_size = *v;
    r.reject_unknown();
    if (c.k_values.empty()) diags.push_back("/comb/k_values: must not be empty");
    if (c.n_steps < 4) diags.push_back("/comb/n_steps: must be >= 4");
    if (c.ensemble_size < 1) diags.push_back("/comb/ensemble_size: must be >= 1");
    return c;
}

inline ForceProfileBlock parse_force_profile(const json& obj, std::vector<std::string>& diags) {
    ObjectReader r(obj, "/force_profile", diags);
    ForceProfileBlock f;
    if (auto v = r.count("n_theta", false)) f.n_theta = *v;
    if (auto v = r.count("n_t", false)) f.n_t = *v;
    if (auto v = r.number("periods", false)) f.periods = *v;
    r.reject_unknown();
    if (f.n_theta < 1 || f.n_t < 1) diags.push_back("/force_profile: grid sizes must be >= 1");
    if (!(f.periods > 0.0)) diags.push_back("/force_profile/periods: must be > 0");
    return f;
}

}  // namespace detail

/// Parses and validates a config document. `kind_override` (from a CLI
/// subcommand) fills in or must agree with the document's "kind".
inline RunConfig parse_config(const std::string& text,
                              std::optional<ExperimentKind> kind_override = std::nullopt) {
    json doc;
    const bool blank = text.find_first_not_of(" \t\r\n") == std::string::npos;
    if (blank) {
        doc = json::object();
    } else {
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError({std::string("parse error: ") + e.what()});
        }
    }
    if (!doc.is_object()) throw ConfigError({"/: top level must be an object"});

    std::vector<std::string> diags;
    detail::ObjectReader top(doc, "", diags);
    RunConfig cfg;

    auto kind_name = top.optional<std::string>("kind");
    std::optional<ExperimentKind> kind;
    if (kind_name) {
        kind = experiment_kind_from(*kind_name);
        if (!kind) diags.push_back("/kind: unknown experiment kind '" + *kind_name + "'");
    } else if (!doc.contains("kind") && !kind_override) {
        diags.push_back("/kind: missing required field");
    }
    if (kind_override) {
        if (kind && *kind != *kind_override) {
            diags.push_back("/kind: config says '" + to_string(*kind) + "' but the command is '" +
                            to_string(*kind_override) + "'");
        }
        kind = kind_override;
    }

    if (auto s = top.required<std::uint64_t>("seed")) cfg.seed = *s;
    if (auto w = top.count("workers", false)) cfg.workers = static_cast<unsigned>(*w);
    if (auto o = top.optional<std::string>("output_dir")) cfg.output_dir = *o;
    top.object("derived");  // echoed, informational only

    if (kind) {
        cfg.kind = *kind;
        const bool needs_system = *kind == ExperimentKind::trajectory || *kind == ExperimentKind::ensemble ||
                                  *kind == ExperimentKind::force_profile;
        const bool needs_integration = *kind == ExperimentKind::trajectory || *kind == ExperimentKind::ensemble;

        const json* sys = top.object("system");
        const json* model = top.object("model");
        const json* integ = top.object("integration");
        const json* walk = top.object("walk");
        const json* lang = top.object("langevin");
        const json* comb = top.object("comb");
        const json* fprof = top.object("force_profile");

        auto require = [&](const json* block, const char* name, bool needed) {
            if (needed && block == nullptr && !doc.contains(name)) {
                diags.push_back(std::string("/") + name + ": missing required block for kind '" +
                                to_string(*kind) + "'");
            }
        };
        require(sys, "system", needs_system);
        require(integ, "integration", needs_integration);
        require(walk, "walk", needs_system);
        require(lang, "langevin", *kind == ExperimentKind::langevin);
        require(comb, "comb", *kind == ExperimentKind::comb_scan);

        if (sys) cfg.system = detail::parse_system(*sys, diags);
        if (model) cfg.model = detail::parse_model(*model, diags);
        if (integ) cfg.integration = detail::parse_integration(*integ, *kind == ExperimentKind::trajectory, diags);
        if (walk) cfg.walk = detail::parse_walk(*walk, *kind, diags);
        if (lang) cfg.langevin = detail::parse_langevin(*lang, diags);
        if (comb) cfg.comb = detail::parse_comb(*comb, diags);
        if (fprof) cfg.force_profile = detail::parse_force_profile(*fprof, diags);

        if (cfg.system && cfg.walk && (cfg.walk->T || cfg.walk->delta_T)) {
            cfg.system->delta_T = cfg.walk->resolved_delta_T();
        }
        if (cfg.walk && cfg.walk->init == InitSource::thermal && cfg.system && cfg.system->delta_a != 0.0) {
            const double u = cfg.system->U0() * cfg.system->eta_L * cfg.system->eta_L;
            if (!(u > 0.0)) diags.push_back("/walk/init: thermal start needs U0 * eta_L^2 > 0");
        }
    } else {
        // Without a kind the required blocks are unknown; still validate what is there.
        for (const char* k : {"system", "model", "integration", "walk", "langevin", "comb", "force_profile"}) {
            top.object(k);
        }
    }
    if (cfg.langevin) cfg.langevin->master_seed = cfg.seed;
    top.reject_unknown();

    if (!diags.empty()) throw ConfigError(std::move(diags));
    return cfg;
}

/// Resolved config as a document that parse_config accepts again.
inline json echo_config(const RunConfig& c) {
    json j;
    j["kind"] = to_string(c.kind);
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    j["output_dir"] = c.output_dir;
    if (c.system) {
        const auto& P = *c.system;
        j["system"] = {{"kappa", P.kappa}, {"gamma", P.gamma}, {"delta_a", P.delta_a},
                       {"delta_c", P.delta_c}, {"eta_L", P.eta_L}, {"eta_T", P.eta_T},
                       {"g", P.g},         {"omega_r", P.omega_r}};
    }
    j["model"] = {{"variant", c.model.name()}};
    if (c.model.kind == ModelKind::collective) j["model"]["n_emitters"] = c.model.n_emitters;
    if (c.integration) {
        j["integration"] = {{"dt", c.integration->dt},
                            {"t_end", c.integration->t_end},
                            {"sample_stride", c.integration->sample_stride}};
    }
    if (c.walk) {
        const auto& w = *c.walk;
        json wj;
        if (w.T) wj["T"] = *w.T;
        if (w.delta_T) wj["delta_T"] = *w.delta_T;
        wj["n_steps"] = w.n_steps;
        wj["n_traj"] = w.n_traj;
        wj["tau_max"] = w.tau_max;
        wj["rounding"] = w.rounding == SiteRounding::half_integer ? "half-integer" : "integer";
        switch (w.init) {
            case InitSource::box:
                wj["init"] = {{"kind", "box"},
                              {"x_half_width", w.box.x_half_width},
                              {"p_half_width", w.box.p_half_width}};
                break;
            case InitSource::thermal: wj["init"] = {{"kind", "thermal"}}; break;
            case InitSource::point: wj["init"] = {{"kind", "point"}, {"q0", w.q0}, {"p0", w.p0}}; break;
        }
        j["walk"] = wj;
    }
    if (c.langevin) {
        const auto& L = *c.langevin;
        j["langevin"] = {{"lambda", L.lambda_damp},
                         {"dt", L.dt},
                         {"t_end", L.t_end},
                         {"n_realizations", L.n_realizations},
                         {"n_output", L.n_output},
                         {"kernel",
                          {{"kind", to_string(L.kernel.kind)},
                           {"d", L.kernel.d},
                           {"sigma", L.kernel.sigma},
                           {"Omega", L.kernel.Omega}}}};
    }
    if (c.comb) {
        j["comb"] = {{"k_values", c.comb->k_values},
                     {"n_steps", c.comb->n_steps},
                     {"ensemble_size", c.comb->ensemble_size}};
    }
    j["force_profile"] = {{"n_theta", c.force_profile.n_theta},
                          {"n_t", c.force_profile.n_t},
                          {"periods", c.force_profile.periods}};
    j["derived"] = c.derived();
    return j;
}

}  // namespace qrw
