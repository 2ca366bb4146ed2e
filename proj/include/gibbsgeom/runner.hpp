#pragma once

#include <string>
#include <vector>

#include "gibbsgeom/config.hpp"

namespace gibbsgeom {

struct RunReport {
    std::string config_hash;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
    std::vector<std::pair<std::string, double>> phase_seconds;
    std::vector<std::string> warnings;
    std::vector<std::string> artifacts;
    int exit_code = 0;
};

// Dispatches on cfg.mode, writes CSV/JSON artifacts under cfg.out_dir, and
// returns the report (also written as run_report.json). Exit codes: 0 success,
// 2 clan explosion, 3 validation failure, 4 oracle infeasibility.
RunReport run(const RunConfig& cfg);

std::string format_double(double v); // shortest round-trip decimal, CSV-stable

void write_points_csv(const std::string& path, const PointConfig& cfg);
PointConfig read_points_csv(const std::string& path, int dim);

} // namespace gibbsgeom
