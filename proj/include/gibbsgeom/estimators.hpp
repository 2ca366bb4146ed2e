#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gibbsgeom/measure.hpp"
#include "gibbsgeom/sampler.hpp"

namespace gibbsgeom {

struct ConstantEstimate {
    double value = 0.0;
    double std_error = 0.0;
    int replications = 0;
    double truncation_radius = 0.0;
};

struct InsertionConfig {
    double probe_half_width = 8.0;
    int replications = 400;
    int threads = 1;
    SamplerOptions sampler;
};

// Monte Carlo of the inserted-origin identity: E(tau) is the mean of
// xi(0, X) exp(-Delta(0, X)) over thermodynamic samples X on the probe window.
ConstantEstimate estimate_E(const Potential& pot, double tau, const Functional& f,
                            const InsertionConfig& cfg, RngStream stream);

struct VConfig {
    double probe_half_width = 8.0;
    int replications = 400;
    double cutoff = 4.0;
    int n_radii = 16;
    int threads = 1;
    bool auto_extend_cutoff = true;
    SamplerOptions sampler;
};

struct VEstimate {
    ConstantEstimate v;
    double sigma0 = 0.0, sigma0_se = 0.0;
    ConstantEstimate e_hat;
    std::vector<double> radii;
    std::vector<double> sigma0x;
    std::vector<double> sigma0x_se;
    double tail_bound = 0.0; // estimated truncated mass beyond the cutoff
};

// sigma[0] + tau * integral of the two-point term sigma[0,x] over the ball of
// radius `cutoff` (radial grid + trapezoid; the tail is fitted and reported).
VEstimate estimate_V(const Potential& pot, double tau, const Functional& f, const VConfig& cfg,
                     RngStream stream);

struct ExperimentConfig {
    std::vector<double> lambdas;
    int replications = 200;
    int threads = 1;
    std::vector<TestFunction> test_functions{TestFunction::constant()};
    SamplerOptions sampler;
    bool quantization_scaling = false; // report against the lambda^(r/d) laws
    double quantization_r = 1.0;
};

struct ExperimentRow {
    double lambda = 0.0;
    std::string f_id;
    int n_reps = 0;
    double mean = 0.0;       // of <f, mu_lambda>
    double variance = 0.0;   // across replications
    double normalized = 0.0; // lambda^{-1} mean (WLLN) or lambda^{-1} variance (scaling)
    double target = 0.0;
    double std_error = 0.0;
    double ad_stat = 0.0;
    double ks_dist = 0.0;
};

struct MomentDiagnostics {
    double lambda = 0.0;
    std::array<double, 4> moments{}; // mean of |xi|^p, p = 1..4
};

struct ExperimentResult {
    std::vector<ExperimentRow> rows;
    std::vector<MomentDiagnostics> moments;
    // CLT extras
    std::vector<double> ks_boot_se;          // aligned with rows
    double cov_f1f2 = 0.0, cov_target = 0.0; // two-function covariance check
    bool cov_valid = false;
};

ExperimentResult wlln_experiment(const Potential& pot, double tau, const Functional& f,
                                 const ExperimentConfig& cfg, RngStream stream,
                                 std::optional<ConstantEstimate> e_hat = std::nullopt);

ExperimentResult variance_scaling_experiment(const Potential& pot, double tau, const Functional& f,
                                             const ExperimentConfig& cfg, RngStream stream,
                                             std::optional<double> v_target = std::nullopt);

ExperimentResult clt_experiment(const Potential& pot, double tau, const Functional& f,
                                const ExperimentConfig& cfg, RngStream stream,
                                std::optional<double> v_target = std::nullopt);

struct QuantizationBound {
    double empirical_bound = 0.0;
    double std_error = 0.0;
    double poisson_bound = 0.0; // omega_d^{-r/d} Gamma(1 + r/d) at matched tau
    double h_norm = 0.0;        // ||h||_{d/(d+r)}
    ConstantEstimate e_m;       // insertion estimate of E[M]
};

QuantizationBound quantization_bound(const Potential& pot, double tau, int dim, double r,
                                     const DensityField& h, const InsertionConfig& cfg,
                                     RngStream stream);

// Per-replication raw values of <f, mu_lambda> (the experiment primitives share this).
std::vector<double> sample_functional_totals(const Potential& pot, double tau, const Functional& f,
                                             const TestFunction& test_fn, double lambda, int reps,
                                             int threads, const SamplerOptions& opts, RngStream stream);

} // namespace gibbsgeom
