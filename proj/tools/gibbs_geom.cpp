#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gibbsgeom/runner.hpp"

using namespace gibbsgeom;

namespace {

struct CliArgs {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
};

int run_mode(const std::string& mode, const CliArgs& args) {
    RunConfig cfg;
    try {
        cfg = parse_config(args.config_path);
    } catch (const ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }
    cfg.mode = mode;
    if (args.seed_set) cfg.seed = args.seed;
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (args.threads > 0) {
        cfg.threads = args.threads;
    } else if (const char* env = std::getenv("GIBBS_GEOM_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) cfg.threads = t;
    }

    const RunReport rep = run(cfg);
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "config " << rep.config_hash << " seed " << rep.seed << " wall "
              << format_double(rep.wall_seconds) << "s -> " << cfg.out_dir << "\n";
    return rep.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Perfect sampling of Gibbs point processes and Monte Carlo limit-theorem experiments"};
    app.require_subcommand(1);

    CliArgs args;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", args.config_path, "JSON configuration file")->required();
        sub->add_option("--seed", args.seed, "override the config seed")->each([&](const std::string&) {
            args.seed_set = true;
        });
        sub->add_option("--threads", args.threads, "worker threads (env GIBBS_GEOM_THREADS as fallback)");
        sub->add_option("--out-dir", args.out_dir, "artifact directory (overrides config)");
    };

    add_common(app.add_subcommand("sample", "draw perfect samples, emit points.csv + report.json"));
    add_common(app.add_subcommand("estimate", "estimate the mean and variance limit constants"));
    add_common(app.add_subcommand("experiment", "run the configured wlln/variance/clt table"));
    add_common(app.add_subcommand("diagnose", "clan, stabilization and empty-ball diagnostics"));

    CLI11_PARSE(app, argc, argv);

    for (const auto* sub : app.get_subcommands()) return run_mode(sub->get_name(), args);
    return 3;
}
