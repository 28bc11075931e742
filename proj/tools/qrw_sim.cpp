#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "qrw/config.hpp"
#include "qrw/error.hpp"
#include "qrw/runner.hpp"

namespace {

int exit_code(qrw::ErrorCategory c) {
    switch (c) {
        case qrw::ErrorCategory::validation: return 2;
        case qrw::ErrorCategory::integration: return 3;
        case qrw::ErrorCategory::statistics: return 4;
        case qrw::ErrorCategory::io: return 1;
    }
    return 1;
}

const char* category_name(qrw::ErrorCategory c) {
    switch (c) {
        case qrw::ErrorCategory::validation: return "validation";
        case qrw::ErrorCategory::integration: return "integration";
        case qrw::ErrorCategory::statistics: return "statistics";
        case qrw::ErrorCategory::io: return "io";
    }
    return "error";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qrw::Error(qrw::ErrorCategory::io, "cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    int verbosity = 0;
    bool check_only = false;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("-c,--config", o.config_path, "JSON run configuration")->required();
    cmd->add_option("-s,--seed", o.seed, "override the master seed");
    cmd->add_option("-o,--out", o.out, "output directory (overrides QRW_OUTPUT_DIR and the config)");
    cmd->add_flag("-v,--verbose", o.verbosity, "print the manifest summary; repeat for the full manifest");
    cmd->add_flag("--check", o.check_only, "validate and print the resolved config without running");
}

int execute(const Options& o, std::optional<qrw::ExperimentKind> kind) {
    qrw::RunConfig cfg = qrw::parse_config(read_file(o.config_path), kind);
    if (o.seed) {
        cfg.seed = *o.seed;
        if (cfg.langevin) cfg.langevin->master_seed = *o.seed;
    }
    if (o.check_only) {
        std::cout << qrw::echo_config(cfg).dump(2) << '\n';
        return 0;
    }
    const auto res = qrw::run(cfg, o.out);
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
    if (o.verbosity >= 2) {
        std::cout << res.manifest.dump(2) << '\n';
    } else if (o.verbosity == 1) {
        std::cout << res.manifest["summary"].dump(2) << '\n';
    }
    std::cout << "wrote " << res.manifest["files"].size() << " files to " << res.dir.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semiclassical cavity quasi-random-walk simulator"};
    app.require_subcommand(1);

    Options opts;
    std::optional<qrw::ExperimentKind> kind;

    auto* run_cmd = app.add_subcommand("run", "run the experiment named by the config's kind");
    add_common(run_cmd, opts);

    for (auto k : {qrw::ExperimentKind::trajectory, qrw::ExperimentKind::ensemble, qrw::ExperimentKind::langevin,
                   qrw::ExperimentKind::comb_scan, qrw::ExperimentKind::force_profile}) {
        auto* cmd = app.add_subcommand(qrw::to_string(k), "run a " + qrw::to_string(k) + " experiment");
        add_common(cmd, opts);
        cmd->callback([&kind, k] { kind = k; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        return execute(opts, kind);
    } catch (const qrw::ConfigError& e) {
        std::cerr << "validation error: invalid config\n";
        for (const auto& d : e.diagnostics()) std::cerr << "  " << d << '\n';
        return 2;
    } catch (const qrw::Error& e) {
        std::cerr << category_name(e.category()) << " error: " << e.what() << '\n';
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
