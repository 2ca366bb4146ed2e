// Compares the serial reference path against the OpenMP path on the same
// workload and checks that both produce identical results.

#include <chrono>
#include <cstdio>
#include <vector>

#include "gibbsgeom/estimators.hpp"
#include "gibbsgeom/parallel.hpp"

using namespace gibbsgeom;

namespace {

double timed_run(int threads, std::vector<double>& totals) {
    const HardcorePotential pot(2, 0.2);
    const KnnEdgeLengthFunctional knn(1);
    const auto t0 = std::chrono::steady_clock::now();
    SamplerOptions opts;
    totals = sample_functional_totals(pot, 0.5, knn, TestFunction::constant(), 256.0, 200, threads,
                                      opts, RngStream::root(20240901));
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

int main() {
    std::vector<double> serial_totals, parallel_totals;
    const double t_serial = timed_run(1, serial_totals);
    const int threads = hardware_threads();
    const double t_parallel = timed_run(threads, parallel_totals);

    bool identical = serial_totals.size() == parallel_totals.size();
    for (std::size_t i = 0; identical && i < serial_totals.size(); ++i)
        identical = serial_totals[i] == parallel_totals[i];

    std::printf("workload: hard-core sampling + 1-nn edge length, lambda=256, 200 replications\n");
    std::printf("serial reference : %8.3f s\n", t_serial);
    std::printf("openmp x%-2d       : %8.3f s\n", threads, t_parallel);
    std::printf("speedup          : %8.2fx\n", t_serial / t_parallel);
    std::printf("bitwise identical: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
