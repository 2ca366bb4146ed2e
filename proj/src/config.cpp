#include "gibbsgeom/config.hpp"

#include <fstream>
#include <sstream>

namespace gibbsgeom {

using nlohmann::json;

std::string config_hash(const json& j) {
    const std::string canon = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canon) h = (h ^ c) * 0x100000001b3ull;
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

namespace {

const char* kPotentialTypes = "poisson, strauss, hardcore, area, pair, truncated_poisson";
const char* kFunctionalNames =
    "count, rsa, knn_length, knn_components, voronoi_length, percolation_components, quantization";

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (j.contains(key)) return j.at(key).get<T>();
    return fallback;
}

} // namespace

std::unique_ptr<Potential> make_potential(const json& spec, int dim) {
    const std::string type = spec.value("type", "poisson");
    if (type == "poisson") return std::make_unique<NullPotential>(dim);
    if (type == "strauss")
        return std::make_unique<StraussPotential>(dim, spec.at("beta").get<double>(),
                                                  spec.at("r0").get<double>());
    if (type == "hardcore") return std::make_unique<HardcorePotential>(dim, spec.at("r").get<double>());
    if (type == "area")
        return std::make_unique<AreaInteractionPotential>(dim, spec.at("gamma").get<double>(),
                                                          spec.at("r").get<double>());
    if (type == "pair")
        return std::make_unique<PairPotential>(dim, spec.at("A").get<double>(), spec.at("a").get<double>(),
                                               spec.at("r0").get<double>(), spec.value("Rt", 0.0));
    if (type == "truncated_poisson")
        return std::make_unique<TruncatedPoissonPotential>(dim, spec.at("r").get<double>(),
                                                           spec.at("k").get<int>());
    throw ValidationError("unknown potential type '" + type + "' (supported: " + kPotentialTypes + ")");
}

std::shared_ptr<DensityField> make_density(const json& spec, int dim) {
    if (spec.is_null()) return std::make_shared<UniformDensity>();
    const std::string type = spec.value("type", "uniform");
    if (type == "uniform") return std::make_shared<UniformDensity>();
    if (type == "table") {
        const int nodes = spec.at("nodes_per_axis").get<int>();
        std::vector<double> values = spec.at("values").get<std::vector<double>>();
        return std::make_shared<TableDensity>(dim, nodes, std::move(values));
    }
    throw ValidationError("unknown density type '" + type + "' (supported: uniform, table)");
}

std::unique_ptr<Functional> make_functional(const json& spec, int dim) {
    const std::string name = spec.value("functional", "count");
    const json params = spec.value("parameters", json::object());
    if (name == "count") return std::make_unique<CountFunctional>();
    if (name == "rsa") return std::make_unique<RsaPackFunctional>(dim);
    if (name == "knn_length")
        return std::make_unique<KnnEdgeLengthFunctional>(get_or<int>(params, "k", 1));
    if (name == "knn_components")
        return std::make_unique<ComponentReciprocalFunctional>(ComponentGraph::KnnMutual,
                                                               get_or<int>(params, "k", 1));
    if (name == "percolation_components")
        return std::make_unique<ComponentReciprocalFunctional>(ComponentGraph::Percolation, 1,
                                                               get_or<double>(params, "radius", 1.0));
    if (name == "voronoi_length") return std::make_unique<VoronoiEdgeLengthFunctional>();
    if (name == "quantization") {
        std::shared_ptr<DensityField> h =
            make_density(params.contains("h") ? params.at("h") : json(), dim);
        return std::make_unique<QuantizationFunctional>(get_or<double>(params, "r", 1.0), std::move(h),
                                                        get_or<double>(params, "h_floor", 0.0));
    }
    throw ValidationError("unknown functional '" + name + "' (supported: " + std::string(kFunctionalNames) +
                          ")");
}

TestFunction make_test_function(const std::string& id) {
    if (id == "const") return TestFunction::constant();
    if (id == "half") return TestFunction::half_indicator();
    if (id == "affine") return TestFunction::affine(1.0, 1.0);
    throw ValidationError("unknown test function '" + id + "' (supported: const, half, affine)");
}

RunConfig parse_config_json(const json& j) {
    RunConfig cfg;
    std::vector<std::string> errors;

    auto check = [&](bool ok, const std::string& msg) {
        if (!ok) errors.push_back(msg);
    };

    cfg.dim = j.value("dim", 2);
    check(cfg.dim >= 1 && cfg.dim <= 3, "dim: must be 1, 2 or 3");
    cfg.tau = j.value("tau", 1.0);
    check(cfg.tau > 0.0, "tau: must be > 0");
    cfg.replications = j.value("replications", 1);
    check(cfg.replications > 0, "replications: must be > 0");
    cfg.seed = j.value("seed", static_cast<std::uint64_t>(1));
    cfg.mode = j.value("mode", std::string("sample"));
    check(cfg.mode == "sample" || cfg.mode == "estimate" || cfg.mode == "experiment" ||
              cfg.mode == "diagnose",
          "mode: must be one of sample, estimate, experiment, diagnose");
    cfg.experiment = j.value("experiment", std::string("wlln"));
    check(cfg.experiment == "wlln" || cfg.experiment == "variance" || cfg.experiment == "clt" ||
              cfg.experiment == "quantization_bound",
          "experiment: must be one of wlln, variance, clt, quantization_bound");
    cfg.out_dir = j.value("out_dir", std::string("."));
    cfg.threads = j.value("threads", 1);
    check(cfg.threads >= 1, "threads: must be >= 1");

    if (j.contains("lambdas")) {
        cfg.lambdas = j.at("lambdas").get<std::vector<double>>();
    } else if (j.contains("lambda")) {
        cfg.lambdas = {j.at("lambda").get<double>()};
    }
    check(!cfg.lambdas.empty(), "lambdas: at least one window volume required");
    for (double l : cfg.lambdas) check(l > 0.0, "lambdas: every entry must be > 0");

    cfg.t0 = j.value("t0", 5.0);
    check(cfg.t0 > 0.0, "t0: must be > 0");
    cfg.t_max = j.value("t_max", 640.0);
    check(cfg.t_max >= cfg.t0, "t_max: must be >= t0");
    cfg.thermodynamic = j.value("thermodynamic", false);
    cfg.margin = j.value("margin", -1.0);
    cfg.probe_half_width = j.value("probe_half_width", 8.0);
    check(cfg.probe_half_width > 0.0, "probe_half_width: must be > 0");
    cfg.v_cutoff = j.value("v_cutoff", 4.0);
    check(cfg.v_cutoff > 0.0, "v_cutoff: must be > 0");
    cfg.v_radii = j.value("v_radii", 16);
    check(cfg.v_radii >= 2, "v_radii: must be >= 2");

    if (j.contains("test_functions")) cfg.test_functions = j.at("test_functions").get<std::vector<std::string>>();

    cfg.potential = j.value("potential", json{{"type", "poisson"}});
    cfg.functional = j.value("functional", json{{"functional", "count"}});

    // Factories double as validators.
    if (cfg.dim >= 1 && cfg.dim <= 3) {
        try {
            make_potential(cfg.potential, cfg.dim);
        } catch (const std::exception& e) {
            errors.push_back(std::string("potential: ") + e.what());
        }
        try {
            make_functional(cfg.functional, cfg.dim);
        } catch (const std::exception& e) {
            errors.push_back(std::string("functional: ") + e.what());
        }
    }
    for (const auto& id : cfg.test_functions) {
        try {
            make_test_function(id);
        } catch (const std::exception& e) {
            errors.push_back(std::string("test_functions: ") + e.what());
        }
    }

    if (!errors.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw ValidationError(msg);
    }

    cfg.hash = config_hash(j);
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config file not found: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config_json(j);
}

} // namespace gibbsgeom
