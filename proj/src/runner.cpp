#include "gibbsgeom/runner.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gibbsgeom/estimators.hpp"
#include "gibbsgeom/parallel.hpp"

namespace gibbsgeom {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_points_csv(const std::string& path, const PointConfig& cfg) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    for (int a = 0; a < cfg.dim; ++a) out << (a ? "," : "") << "x" << (a + 1);
    if (cfg.has_marks()) out << ",mark";
    out << "\n";
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        for (int a = 0; a < cfg.dim; ++a)
            out << (a ? "," : "") << format_double(cfg.points[i][static_cast<std::size_t>(a)]);
        if (cfg.has_marks()) out << "," << format_double(cfg.marks[i]);
        out << "\n";
    }
}

PointConfig read_points_csv(const std::string& path, int dim) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open: " + path);
    PointConfig cfg;
    cfg.dim = dim;
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("missing CSV header: " + path);
    const bool marks = line.find("mark") != std::string::npos;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        Point p;
        for (int a = 0; a < dim; ++a) {
            if (!std::getline(ss, cell, ',')) throw ValidationError("short CSV row: " + path);
            p[static_cast<std::size_t>(a)] = std::stod(cell);
        }
        cfg.points.push_back(p);
        if (marks && std::getline(ss, cell, ',')) cfg.marks.push_back(std::stod(cell));
    }
    return cfg;
}

namespace {

struct PhaseTimer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double lap() {
        const auto t1 = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(t1 - t0).count();
        t0 = t1;
        return s;
    }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    out << text;
}

std::string rows_csv(const std::vector<ExperimentRow>& rows) {
    std::ostringstream os;
    os << "lambda,f_id,n_reps,mean,variance,normalized_stat,target,std_error,ad_stat,ks_dist\n";
    for (const auto& r : rows) {
        os << format_double(r.lambda) << ',' << r.f_id << ',' << r.n_reps << ','
           << format_double(r.mean) << ',' << format_double(r.variance) << ','
           << format_double(r.normalized) << ',' << format_double(r.target) << ','
           << format_double(r.std_error) << ',' << format_double(r.ad_stat) << ','
           << format_double(r.ks_dist) << "\n";
    }
    return os.str();
}

json moments_json(const std::vector<MomentDiagnostics>& ms) {
    json out = json::array();
    for (const auto& m : ms)
        out.push_back({{"lambda", m.lambda},
                       {"p1", m.moments[0]},
                       {"p2", m.moments[1]},
                       {"p3", m.moments[2]},
                       {"p4", m.moments[3]}});
    return out;
}

void run_sample(const RunConfig& cfg, RunReport& rep, json& summary) {
    const Window window = Window::from_volume(cfg.dim, cfg.lambdas.front());
    auto pot = make_potential(cfg.potential, cfg.dim);
    SamplerOptions opts;
    opts.t0 = cfg.t0;
    opts.t_max = cfg.t_max;
    opts.thermodynamic = cfg.thermodynamic;
    opts.margin = cfg.margin;
    opts.collect_clan_diameters = true;
    auto root = RngStream::root(cfg.seed);
    GibbsSampler sampler(window, cfg.tau, *pot, opts, root.child("calibrate"));

    json reports = json::array();
    for (int repi = 0; repi < cfg.replications; ++repi) {
        const SampleReport sr = sampler.sample(root.child("rep").child(static_cast<std::uint64_t>(repi)));
        std::string name = "points.csv";
        if (cfg.replications > 1) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "points_%04d.csv", repi);
            name = buf;
        }
        const std::string path = (fs::path(cfg.out_dir) / name).string();
        write_points_csv(path, sr.configuration);
        rep.artifacts.push_back(path);
        reports.push_back({{"file", name},
                           {"n_points", sr.configuration.size()},
                           {"horizon_used", sr.horizon_used},
                           {"max_clan_diameter", sr.max_clan_diameter},
                           {"max_clan_size", sr.max_clan_size},
                           {"extension_count", sr.extension_count},
                           {"margin", sr.margin},
                           {"boundary_risk", sr.boundary_risk}});
        if (sr.margin_exceeded) rep.warnings.push_back("a clan reached past the thermodynamic margin");
    }
    summary["samples"] = reports;
}

void run_estimate(const RunConfig& cfg, RunReport& rep, json& summary) {
    auto pot = make_potential(cfg.potential, cfg.dim);
    auto fun = make_functional(cfg.functional, cfg.dim);
    auto root = RngStream::root(cfg.seed);

    InsertionConfig icfg;
    icfg.probe_half_width = cfg.probe_half_width;
    icfg.replications = cfg.replications;
    icfg.threads = cfg.threads;
    icfg.sampler.t0 = cfg.t0;
    icfg.sampler.t_max = cfg.t_max;
    PhaseTimer timer;
    const auto e = estimate_E(*pot, cfg.tau, *fun, icfg, root.child("E"));
    rep.phase_seconds.emplace_back("estimate_E", timer.lap());

    VConfig vcfg;
    vcfg.probe_half_width = cfg.probe_half_width;
    vcfg.replications = cfg.replications;
    vcfg.cutoff = cfg.v_cutoff;
    vcfg.n_radii = cfg.v_radii;
    vcfg.threads = cfg.threads;
    vcfg.sampler.t0 = cfg.t0;
    vcfg.sampler.t_max = cfg.t_max;
    const auto v = estimate_V(*pot, cfg.tau, *fun, vcfg, root.child("V"));
    rep.phase_seconds.emplace_back("estimate_V", timer.lap());

    summary["E"] = {{"value", e.value}, {"std_error", e.std_error}, {"replications", e.replications}};
    summary["V"] = {{"value", v.v.value},
                    {"std_error", v.v.std_error},
                    {"sigma0", v.sigma0},
                    {"sigma0_se", v.sigma0_se},
                    {"cutoff", v.v.truncation_radius},
                    {"tail_bound", v.tail_bound}};
    if (v.tail_bound > 1e-4 * std::max(std::abs(v.sigma0), 1e-12))
        rep.warnings.push_back("two-point tail at the cutoff exceeds 1e-4 of sigma0");

    std::ostringstream os;
    os << "radius,sigma0x,std_error\n";
    for (std::size_t j = 0; j < v.radii.size(); ++j)
        os << format_double(v.radii[j]) << ',' << format_double(v.sigma0x[j]) << ','
           << format_double(v.sigma0x_se[j]) << "\n";
    const std::string path = (fs::path(cfg.out_dir) / "sigma_radial.csv").string();
    write_text(path, os.str());
    rep.artifacts.push_back(path);
}

void run_experiment_mode(const RunConfig& cfg, RunReport& rep, json& summary) {
    auto pot = make_potential(cfg.potential, cfg.dim);
    auto fun = make_functional(cfg.functional, cfg.dim);
    auto root = RngStream::root(cfg.seed);

    ExperimentConfig ecfg;
    ecfg.lambdas = cfg.lambdas;
    ecfg.replications = cfg.replications;
    ecfg.threads = cfg.threads;
    ecfg.test_functions.clear();
    for (const auto& id : cfg.test_functions) ecfg.test_functions.push_back(make_test_function(id));
    ecfg.sampler.t0 = cfg.t0;
    ecfg.sampler.t_max = cfg.t_max;
    ecfg.sampler.thermodynamic = cfg.thermodynamic;
    ecfg.sampler.margin = cfg.margin;

    PhaseTimer timer;
    ExperimentResult result;
    if (cfg.experiment == "wlln") {
        InsertionConfig icfg;
        icfg.probe_half_width = cfg.probe_half_width;
        icfg.replications = cfg.replications;
        icfg.threads = cfg.threads;
        icfg.sampler = ecfg.sampler;
        const auto e = estimate_E(*pot, cfg.tau, *fun, icfg, root.child("E"));
        summary["E"] = {{"value", e.value}, {"std_error", e.std_error}};
        rep.phase_seconds.emplace_back("estimate_E", timer.lap());
        result = wlln_experiment(*pot, cfg.tau, *fun, ecfg, root.child("exp"), e);
    } else if (cfg.experiment == "variance") {
        result = variance_scaling_experiment(*pot, cfg.tau, *fun, ecfg, root.child("exp"));
    } else if (cfg.experiment == "clt") {
        result = clt_experiment(*pot, cfg.tau, *fun, ecfg, root.child("exp"));
        if (result.cov_valid)
            summary["two_function_covariance"] = {{"empirical", result.cov_f1f2},
                                                  {"target", result.cov_target}};
        json boots = json::array();
        for (double b : result.ks_boot_se) boots.push_back(b);
        summary["ks_bootstrap_se"] = boots;
    } else { // quantization_bound
        const json params = cfg.functional.value("parameters", json::object());
        auto h = make_density(params.contains("h") ? params.at("h") : json(), cfg.dim);
        InsertionConfig icfg;
        icfg.probe_half_width = cfg.probe_half_width;
        icfg.replications = cfg.replications;
        icfg.threads = cfg.threads;
        icfg.sampler = ecfg.sampler;
        const auto qb = quantization_bound(*pot, cfg.tau, cfg.dim, params.value("r", 1.0), *h, icfg,
                                           root.child("qb"));
        summary["quantization_bound"] = {{"empirical_bound", qb.empirical_bound},
                                         {"std_error", qb.std_error},
                                         {"poisson_bound", qb.poisson_bound},
                                         {"h_norm", qb.h_norm},
                                         {"E_M", qb.e_m.value},
                                         {"E_M_se", qb.e_m.std_error}};
    }
    rep.phase_seconds.emplace_back("experiment", timer.lap());

    if (!result.rows.empty()) {
        const std::string path = (fs::path(cfg.out_dir) / (cfg.experiment + "_table.csv")).string();
        write_text(path, rows_csv(result.rows));
        rep.artifacts.push_back(path);
        summary["moments"] = moments_json(result.moments);
    }
}

void run_diagnose(const RunConfig& cfg, RunReport& rep, json& summary) {
    const Window window = Window::from_volume(cfg.dim, cfg.lambdas.front());
    auto pot = make_potential(cfg.potential, cfg.dim);
    auto fun = make_functional(cfg.functional, cfg.dim);
    auto root = RngStream::root(cfg.seed);

    SamplerOptions opts;
    opts.t0 = cfg.t0;
    opts.t_max = cfg.t_max;
    opts.collect_clan_diameters = true;
    opts.keep_free_snapshot = true;
    GibbsSampler sampler(window, cfg.tau, *pot, opts, root.child("calibrate"));

    PhaseTimer timer;
    std::vector<SampleReport> samples(static_cast<std::size_t>(cfg.replications));
    parallel_for(samples.size(), cfg.threads, [&](std::size_t i) {
        samples[i] = sampler.sample(root.child("rep").child(i));
    });
    rep.phase_seconds.emplace_back("sampling", timer.lap());

    const auto clans = clan_diagnostics(samples);
    summary["clan_tail"] = {{"slope", clans.tail.slope},
                            {"r2", clans.tail.r2},
                            {"n_clans", clans.n_clans},
                            {"max_diameter", clans.max_diameter}};
    if (!(clans.tail.slope < 0.0))
        rep.warnings.push_back("clan-diameter tail slope is not negative");

    std::vector<double> radii;
    const double r_max = window.half_width / 2.0;
    for (int i = 1; i <= 12; ++i) radii.push_back(r_max * i / 12.0);
    const auto pl = poisson_like_diagnostics(samples, window, cfg.dim, radii);
    summary["empty_ball"] = {{"slope_vs_rd", pl.log_slope_vs_rd},
                             {"r2", pl.fit_r2},
                             {"domination_ok", pl.domination_ok}};
    if (!pl.domination_ok) throw std::logic_error("pathwise domination violated: sampler bug");

    // Stabilization probes on the emitted configurations.
    std::vector<double> stab;
    std::vector<double> grid;
    for (int g = 1; g <= 16; ++g) grid.push_back(window.half_width * g / 16.0);
    ProbeBattery battery;
    auto ms = root.child("probe_marks");
    for (std::size_t s = 0; s < samples.size() && stab.size() < 4000; ++s) {
        PointConfig x = samples[s].configuration;
        if (x.size() < 3) continue;
        if (fun->requires_marks()) {
            x.marks.resize(x.size());
            for (auto& m : x.marks) m = ms.uniform();
        }
        for (std::size_t i = 0; i < x.size(); i += std::max<std::size_t>(1, x.size() / 8)) {
            const auto probe = stabilization_probe(*fun, x, i, grid, battery);
            if (probe.found) stab.push_back(probe.stabilized_at);
        }
    }
    rep.phase_seconds.emplace_back("probes", timer.lap());
    const auto stab_fit = stats::log_survival_tail_fit(stab);
    summary["stabilization_tail"] = {{"slope", stab_fit.slope},
                                     {"r2", stab_fit.r2},
                                     {"n_probes", stab.size()}};

    std::ostringstream os;
    os << "radius,empty_ball_prob\n";
    for (std::size_t i = 0; i < pl.radii.size(); ++i)
        os << format_double(pl.radii[i]) << ',' << format_double(pl.empty_ball_prob[i]) << "\n";
    const std::string path = (fs::path(cfg.out_dir) / "empty_ball.csv").string();
    write_text(path, os.str());
    rep.artifacts.push_back(path);
}

} // namespace

RunReport run(const RunConfig& cfg) {
    RunReport rep;
    rep.config_hash = cfg.hash;
    rep.seed = cfg.seed;
    fs::create_directories(cfg.out_dir);

    json summary;
    summary["config_hash"] = cfg.hash;
    summary["seed"] = cfg.seed;
    summary["mode"] = cfg.mode;

    const auto start = std::chrono::steady_clock::now();
    try {
        if (cfg.mode == "sample")
            run_sample(cfg, rep, summary);
        else if (cfg.mode == "estimate")
            run_estimate(cfg, rep, summary);
        else if (cfg.mode == "experiment")
            run_experiment_mode(cfg, rep, summary);
        else
            run_diagnose(cfg, rep, summary);
    } catch (const ClanExplosionError& e) {
        rep.exit_code = 2;
        rep.warnings.push_back(e.what());
    } catch (const ValidationError& e) {
        rep.exit_code = 3;
        rep.warnings.push_back(e.what());
    } catch (const OracleInfeasibleError& e) {
        rep.exit_code = 4;
        rep.warnings.push_back(e.what());
    }
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    summary["wall_seconds"] = rep.wall_seconds;
    summary["warnings"] = rep.warnings;
    json phases = json::object();
    for (const auto& [k, v] : rep.phase_seconds) phases[k] = v;
    summary["phase_seconds"] = phases;
    summary["exit_code"] = rep.exit_code;

    const std::string path = (fs::path(cfg.out_dir) / "report.json").string();
    write_text(path, summary.dump(2) + "\n");
    rep.artifacts.push_back(path);
    return rep;
}

} // namespace gibbsgeom
