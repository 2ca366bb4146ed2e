#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "gibbsgeom/functionals.hpp"
#include "gibbsgeom/measure.hpp"
#include "gibbsgeom/potentials.hpp"
#include "gibbsgeom/sampler.hpp"

namespace gibbsgeom {

struct RunConfig {
    int dim = 2;
    double tau = 1.0;
    nlohmann::json potential = {{"type", "poisson"}};
    nlohmann::json functional = {{"functional", "count"}};
    std::vector<double> lambdas{64.0};
    int replications = 1;
    std::uint64_t seed = 1;
    std::string mode = "sample"; // sample | estimate | experiment | diagnose
    std::string experiment = "wlln"; // wlln | variance | clt | quantization_bound
    std::string out_dir = ".";
    int threads = 1;
    std::vector<std::string> test_functions{"const"};

    double t0 = 5.0;
    double t_max = 640.0;
    bool thermodynamic = false;
    double margin = -1.0;

    double probe_half_width = 8.0;
    double v_cutoff = 4.0;
    int v_radii = 16;

    std::string hash; // canonical-config digest, embedded in artifacts
};

// Parses and validates; reports every validation error, not just the first.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_json(const nlohmann::json& j);

std::string config_hash(const nlohmann::json& j);

std::unique_ptr<Potential> make_potential(const nlohmann::json& spec, int dim);
std::unique_ptr<Functional> make_functional(const nlohmann::json& spec, int dim);
std::shared_ptr<DensityField> make_density(const nlohmann::json& spec, int dim);
TestFunction make_test_function(const std::string& id);

} // namespace gibbsgeom
