#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gibbsgeom/point.hpp"
#include "gibbsgeom/potentials.hpp"
#include "gibbsgeom/rng.hpp"
#include "gibbsgeom/stats.hpp"

namespace gibbsgeom {

enum class Status : std::uint8_t { Undetermined, Accepted, Rejected };

// One birth of the free birth-and-death process. eta_u is the raw uniform
// behind the dependency radius, so a trajectory is independent of the potential.
struct SpaceTimePoint {
    Point position;
    double birth = 0.0;
    double death = 0.0;
    double eta_u = 0.0;
    double u = 0.0;
    double eta = 0.0;
    Status status = Status::Undetermined;
};

// Stationary free process realized on [-horizon, 0]: points alive at the
// horizon follow the invariant law (Poisson positions, exponential ages and
// residual lifetimes), interior births are space-time Poisson(tau dx dt).
// Extending the horizon never mutates already generated points.
struct Trajectory {
    Window window;
    double tau = 1.0;
    double horizon = 0.0;
    int extension_rounds = 0;
    std::vector<SpaceTimePoint> births; // sorted by (birth, position)
};

Trajectory sample_free_trajectory(const Window& window, double tau, double horizon, RngStream stream);

// Grows the realized interval to [-(horizon + delta), 0]. The restriction to
// the old interval is bit-identical; the extension adds (a) strip births thinned
// to die before the old horizon and (b) points alive at the new horizon that die
// before the old one, so the marginal at the new horizon is stationary again.
void extend_backward(Trajectory& traj, double delta, RngStream stream);

std::vector<Point> alive_at_zero(const Trajectory& traj);

struct ResolveResult {
    std::vector<Status> statuses;
    std::vector<std::vector<std::int32_t>> deps; // causal dependencies (earlier indices)
    std::size_t undetermined_alive0 = 0;
    std::size_t enlargement_events = 0;
};

// Chronological status pass. A birth with all dependencies resolved is accepted
// exactly when u < exp(-Delta(x, accepted alive neighbors)): the uniform is
// bisected between the monotone envelopes exp(-upper) and exp(-lower), widening
// the evaluation radius inside the indeterminate band (width <= psi(r)).
// Births at or before the horizon stay Undetermined unless their dependency
// radius is zero.
ResolveResult resolve_statuses(Trajectory& traj, const Potential& pot);

struct SampleReport {
    PointConfig configuration;
    double horizon_used = 0.0;
    double max_clan_diameter = 0.0;
    std::size_t max_clan_size = 0;
    int extension_count = 0;
    double margin = 0.0;
    double boundary_risk = 0.0; // estimated P[some emitted clan reaches past the margin]
    bool margin_exceeded = false;
    std::vector<double> clan_diameters; // per emitted point, when collected
    std::vector<Point> free_alive0;     // dominating snapshot, when collected
};

struct SamplerOptions {
    double t0 = 5.0;
    double t_max = 640.0;
    bool thermodynamic = false;
    double margin = -1.0; // thermo mode; < 0 requests pilot calibration
    bool keep_free_snapshot = false;
    bool collect_clan_diameters = false;
};

// Perfect sampler for the Gibbs process on `window`: finite-volume mode is the
// exact law with density exp(-energy)/Z against Poisson(tau); thermodynamic mode
// samples on a margin-enlarged window and emits the target restriction.
class GibbsSampler {
public:
    GibbsSampler(const Window& window, double tau, const Potential& pot, SamplerOptions opts,
                 RngStream calibration_stream);

    SampleReport sample(RngStream stream) const;
    PointConfig sample_points(RngStream stream) const;

    double margin() const { return resolved_margin_; }
    const Window& sampling_window() const { return sampling_window_; }

private:
    Window target_window_;
    Window sampling_window_;
    double tau_;
    const Potential& pot_;
    SamplerOptions opts_;
    double resolved_margin_ = 0.0;
    double margin_tail_a_ = 0.0, margin_tail_b_ = 0.0; // fitted clan-tail log-survival
};

// Exact finite-volume sampler by acceptance-rejection against Poisson proposals.
PointConfig rejection_oracle(const Window& window, double tau, const Potential& pot, RngStream stream,
                             std::uint64_t max_proposals = 10'000'000);

// Approximate forward Monte-Carlo dynamics (thinning), for cross-validation only.
PointConfig forward_dynamics_oracle(const Window& window, double tau, const Potential& pot,
                                    double burn_in, RngStream stream);

struct ClanDiagnostics {
    stats::TailFit tail;
    double max_diameter = 0.0;
    std::size_t n_clans = 0;
};
ClanDiagnostics clan_diagnostics(const std::vector<SampleReport>& samples);

struct PoissonLikeDiagnostics {
    bool domination_ok = true;
    std::vector<double> radii;
    std::vector<double> empty_ball_prob;
    double log_slope_vs_rd = 0.0; // slope of log P[empty] against r^d
    double fit_r2 = 0.0;
};
PoissonLikeDiagnostics poisson_like_diagnostics(const std::vector<SampleReport>& samples,
                                                const Window& window, int dim,
                                                const std::vector<double>& radii);

} // namespace gibbsgeom
