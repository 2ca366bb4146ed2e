#include "gibbsgeom/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "gibbsgeom/grid_index.hpp"

namespace gibbsgeom {

namespace {

Point uniform_point(const Window& w, RngStream& s) {
    Point p;
    for (int i = 0; i < w.dim; ++i) p[i] = s.uniform(-w.half_width, w.half_width);
    return p;
}

void sort_births(Trajectory& traj) {
    std::sort(traj.births.begin(), traj.births.end(), [](const SpaceTimePoint& a, const SpaceTimePoint& b) {
        if (a.birth != b.birth) return a.birth < b.birth;
        return lex_less(a.position, b.position);
    });
}

// Exp(1) conditioned below `cap`.
double truncated_exponential(double cap, RngStream& s) {
    return -std::log1p(s.uniform() * std::expm1(-cap));
}

} // namespace

Trajectory sample_free_trajectory(const Window& window, double tau, double horizon, RngStream stream) {
    if (!(tau > 0.0)) throw ValidationError("sample_free_trajectory: tau must be > 0");
    if (horizon < 0.0) throw ValidationError("sample_free_trajectory: horizon must be >= 0");
    Trajectory traj;
    traj.window = window;
    traj.tau = tau;
    traj.horizon = horizon;

    const double vol = window.volume();
    auto s_init = stream.child("init");
    const std::uint64_t n0 = s_init.poisson(tau * vol);
    traj.births.reserve(n0 + static_cast<std::uint64_t>(tau * vol * horizon * 1.2) + 16);
    for (std::uint64_t i = 0; i < n0; ++i) {
        SpaceTimePoint p;
        p.position = uniform_point(window, s_init);
        const double age = s_init.exponential();
        const double residual = s_init.exponential();
        p.birth = -horizon - age;
        p.death = -horizon + residual;
        p.eta_u = s_init.uniform();
        p.u = s_init.uniform();
        traj.births.push_back(p);
    }

    if (horizon > 0.0) {
        auto s_b = stream.child("births");
        const std::uint64_t nb = s_b.poisson(tau * vol * horizon);
        for (std::uint64_t i = 0; i < nb; ++i) {
            SpaceTimePoint p;
            p.birth = -horizon + horizon * s_b.uniform();
            p.position = uniform_point(window, s_b);
            p.death = p.birth + s_b.exponential();
            p.eta_u = s_b.uniform();
            p.u = s_b.uniform();
            traj.births.push_back(p);
        }
    }
    sort_births(traj);
    return traj;
}

void extend_backward(Trajectory& traj, double delta, RngStream stream) {
    if (!(delta > 0.0)) throw ValidationError("extend_backward: delta must be > 0");
    const double old_h = traj.horizon;
    const double new_h = old_h + delta;
    const double vol = traj.window.volume();
    auto s = stream.child("ext").child(static_cast<std::uint64_t>(traj.extension_rounds));

    // Strip births in [-new_h, -old_h), kept only when they die before -old_h
    // (anything alive at -old_h is already represented in the old snapshot).
    auto s2 = s.child("strip");
    const std::uint64_t n2 = s2.poisson(traj.tau * vol * delta);
    for (std::uint64_t i = 0; i < n2; ++i) {
        const double t = -new_h + delta * s2.uniform();
        const Point pos = uniform_point(traj.window, s2);
        const double keep_p = -std::expm1(-(-old_h - t));
        const double uk = s2.uniform();
        const double ul = s2.uniform();
        const double ue = s2.uniform();
        const double ua = s2.uniform();
        if (uk >= keep_p) continue;
        SpaceTimePoint p;
        p.birth = t;
        p.position = pos;
        p.death = t - std::log1p(ul * std::expm1(-(-old_h - t)));
        p.eta_u = ue;
        p.u = ua;
        traj.births.push_back(p);
    }

    // Points alive at -new_h that die before -old_h; together with the old
    // snapshot points whose sampled birth predates -new_h they reconstitute the
    // stationary Poisson marginal at the new horizon.
    auto s3 = s.child("deep");
    const std::uint64_t n3 = s3.poisson(traj.tau * vol * (-std::expm1(-delta)));
    for (std::uint64_t i = 0; i < n3; ++i) {
        SpaceTimePoint p;
        p.position = uniform_point(traj.window, s3);
        p.birth = -new_h - s3.exponential();
        p.death = -new_h + truncated_exponential(delta, s3);
        p.eta_u = s3.uniform();
        p.u = s3.uniform();
        traj.births.push_back(p);
    }

    traj.horizon = new_h;
    traj.extension_rounds += 1;
    sort_births(traj);
}

std::vector<Point> alive_at_zero(const Trajectory& traj) {
    std::vector<Point> out;
    for (const auto& p : traj.births)
        if (p.death > 0.0) out.push_back(p.position);
    std::sort(out.begin(), out.end(), lex_less);
    return out;
}

ResolveResult resolve_statuses(Trajectory& traj, const Potential& pot) {
    const std::size_t n = traj.births.size();
    ResolveResult res;
    res.statuses.assign(n, Status::Undetermined);
    res.deps.assign(n, {});

    const int dim = traj.window.dim;
    const double spacing = std::pow(traj.window.volume() / std::max(1.0, traj.tau * traj.window.volume()),
                                    1.0 / dim);
    const double cell = std::max({pot.interaction_scale(), spacing, 1e-9});
    GridIndex alive(dim, cell);

    // Death events interleaved with the chronological birth sweep.
    std::vector<std::pair<double, int>> deaths(n);
    for (std::size_t i = 0; i < n; ++i) deaths[i] = {traj.births[i].death, static_cast<int>(i)};
    std::sort(deaths.begin(), deaths.end());
    std::size_t next_death = 0;

    const double enlarge_floor = std::max({pot.interaction_scale(), cell, 1e-6});

    for (std::size_t i = 0; i < n; ++i) {
        SpaceTimePoint& x = traj.births[i];
        while (next_death < n && deaths[next_death].first <= x.birth) {
            const int id = deaths[next_death].second;
            // Only points already swept (born before x) are in the structure.
            if (static_cast<std::size_t>(id) < i) alive.erase(id, traj.births[static_cast<std::size_t>(id)].position);
            ++next_death;
        }

        x.eta = pot.dependency_radius(x.eta_u);
        const bool pre_horizon = x.birth <= -traj.horizon;

        auto finish = [&](Status st) {
            res.statuses[i] = st;
            x.status = st;
        };

        if (pre_horizon && x.eta > 0.0) {
            finish(Status::Undetermined);
        } else if (pre_horizon) {
            // Dependency radius zero: decide against the empty neighborhood.
            const double up = pot.add_one_upper(x.position, {}, 0.0);
            const double lo = pot.add_one_lower(x.position, {}, 0.0);
            if (x.u < std::exp(-up))
                finish(Status::Accepted);
            else if (x.u >= std::exp(-lo))
                finish(Status::Rejected);
            else
                finish(Status::Undetermined);
        } else {
            struct Nb {
                double d2;
                int id;
            };
            std::vector<Nb> nbs;
            alive.for_each_in_ball(x.position, x.eta, [&](int id) {
                nbs.push_back({squared_distance(alive.point(id), x.position), id});
            });
            auto nb_less = [&](const Nb& a, const Nb& b) {
                if (a.d2 != b.d2) return a.d2 < b.d2;
                const Point& pa = traj.births[static_cast<std::size_t>(a.id)].position;
                const Point& pb = traj.births[static_cast<std::size_t>(b.id)].position;
                if (!(pa == pb)) return lex_less(pa, pb);
                return a.id < b.id;
            };
            std::sort(nbs.begin(), nbs.end(), nb_less);

            bool blocked = false;
            std::vector<Point> accepted;
            for (const auto& nb : nbs) {
                res.deps[i].push_back(nb.id);
                const Status st = res.statuses[static_cast<std::size_t>(nb.id)];
                if (st == Status::Undetermined) blocked = true;
                if (st == Status::Accepted)
                    accepted.push_back(traj.births[static_cast<std::size_t>(nb.id)].position);
            }

            if (blocked) {
                finish(Status::Undetermined);
            } else {
                double r = x.eta;
                Status decided = Status::Undetermined;
                for (int iter = 0; iter < 200 && !blocked; ++iter) {
                    const double up = pot.add_one_upper(x.position, accepted, r);
                    const double lo = pot.add_one_lower(x.position, accepted, r);
                    if (x.u < std::exp(-up)) {
                        decided = Status::Accepted;
                        break;
                    }
                    if (x.u >= std::exp(-lo)) {
                        decided = Status::Rejected;
                        break;
                    }
                    // Indeterminate band (width <= psi(r)): widen using the
                    // already-resolved configuration.
                    ++res.enlargement_events;
                    const double r_new = std::max(2.0 * r, enlarge_floor);
                    std::vector<Nb> wide;
                    alive.for_each_in_ball(x.position, r_new, [&](int id) {
                        wide.push_back({squared_distance(alive.point(id), x.position), id});
                    });
                    std::sort(wide.begin(), wide.end(), nb_less);
                    accepted.clear();
                    for (const auto& nb : wide) {
                        if (nb.d2 > r * r) res.deps[i].push_back(nb.id);
                        const Status st = res.statuses[static_cast<std::size_t>(nb.id)];
                        if (st == Status::Undetermined) blocked = true;
                        if (st == Status::Accepted)
                            accepted.push_back(traj.births[static_cast<std::size_t>(nb.id)].position);
                    }
                    r = r_new;
                }
                if (!blocked && decided == Status::Undetermined)
                    throw PotentialEnvelopeError("resolve_statuses: indeterminate band failed to close "
                                                 "(envelopes do not converge for this potential)");
                finish(blocked ? Status::Undetermined : decided);
            }
        }

        alive.insert(static_cast<int>(i), x.position);
        if (res.statuses[i] == Status::Undetermined && x.death > 0.0) ++res.undetermined_alive0;
    }
    return res;
}

// ---------------------------------------------------------------- GibbsSampler

namespace {

struct ResolvedSample {
    Trajectory traj;
    ResolveResult res;
};

ResolvedSample run_backward(const Window& window, double tau, const Potential& pot,
                            const SamplerOptions& opts, RngStream stream) {
    ResolvedSample out;
    out.traj = sample_free_trajectory(window, tau, opts.t0, stream);
    for (;;) {
        out.res = resolve_statuses(out.traj, pot);
        if (out.res.undetermined_alive0 == 0) break;
        if (out.traj.horizon >= opts.t_max)
            throw ClanExplosionError(
                "perfect sampling horizon exceeded t_max; potential not exponentially localized at this intensity");
        extend_backward(out.traj, out.traj.horizon, stream);
    }
    return out;
}

} // namespace

GibbsSampler::GibbsSampler(const Window& window, double tau, const Potential& pot, SamplerOptions opts,
                           RngStream calibration_stream)
    : target_window_(window), sampling_window_(window), tau_(tau), pot_(pot), opts_(opts) {
    if (!(tau > 0.0)) throw ValidationError("GibbsSampler: tau must be > 0");
    if (!opts_.thermodynamic) return;

    if (opts_.margin >= 0.0) {
        resolved_margin_ = opts_.margin;
    } else {
        // Pilot clan-tail calibration: margin is where the fitted log-survival
        // of clan diameters drops below 1e-4.
        const double scale = std::max(pot.interaction_scale(), std::pow(1.0 / tau, 1.0 / window.dim));
        Window pilot = window;
        pilot.half_width = std::min(std::max(4.0 * scale, 2.0), window.half_width + 4.0 * scale);
        SamplerOptions popts;
        popts.t0 = opts_.t0;
        popts.t_max = opts_.t_max;
        std::vector<double> diameters;
        for (int rep = 0; rep < 48; ++rep) {
            auto rs = run_backward(pilot, tau, pot, popts, calibration_stream.child(static_cast<std::uint64_t>(rep)));
            std::vector<char> member;
            for (std::size_t i = 0; i < rs.traj.births.size(); ++i) {
                const auto& p = rs.traj.births[i];
                if (p.death <= 0.0 || rs.res.statuses[i] != Status::Accepted) continue;
                // influence radius of the clan rooted at i
                member.assign(rs.traj.births.size(), 0);
                std::vector<std::int32_t> stack{static_cast<std::int32_t>(i)};
                member[i] = 1;
                double diam = 0.0;
                while (!stack.empty()) {
                    const auto j = stack.back();
                    stack.pop_back();
                    diam = std::max(diam, distance(rs.traj.births[static_cast<std::size_t>(j)].position, p.position));
                    for (auto dep : rs.res.deps[static_cast<std::size_t>(j)])
                        if (!member[static_cast<std::size_t>(dep)]) {
                            member[static_cast<std::size_t>(dep)] = 1;
                            stack.push_back(dep);
                        }
                }
                diameters.push_back(diam);
            }
        }
        const auto fit = stats::log_survival_tail_fit(diameters);
        const double fallback = 4.0 * std::max(pot.psi_support_bound(), scale);
        if (fit.ok && fit.slope < -1e-9) {
            margin_tail_a_ = fit.intercept;
            margin_tail_b_ = fit.slope;
            resolved_margin_ = std::max((std::log(1e-4) - fit.intercept) / fit.slope,
                                        pot.psi_support_bound());
        } else {
            resolved_margin_ = fallback;
        }
        resolved_margin_ = std::min(resolved_margin_, 64.0 * std::max(scale, 1.0));
    }
    sampling_window_.half_width = target_window_.half_width + resolved_margin_;
}

SampleReport GibbsSampler::sample(RngStream stream) const {
    auto rs = run_backward(sampling_window_, tau_, pot_, opts_, stream);
    const auto& traj = rs.traj;
    const auto& res = rs.res;

    SampleReport rep;
    rep.horizon_used = traj.horizon;
    rep.extension_count = traj.extension_rounds;
    rep.margin = resolved_margin_;
    rep.configuration.dim = target_window_.dim;

    struct Emitted {
        Point pos;
        std::size_t idx;
    };
    std::vector<Emitted> emitted;
    for (std::size_t i = 0; i < traj.births.size(); ++i) {
        const auto& p = traj.births[i];
        if (p.death <= 0.0) continue;
        if (opts_.keep_free_snapshot && target_window_.contains(p.position))
            rep.free_alive0.push_back(p.position);
        if (res.statuses[i] != Status::Accepted) continue;
        if (!target_window_.contains(p.position)) continue;
        emitted.push_back({p.position, i});
    }
    std::sort(emitted.begin(), emitted.end(),
              [](const Emitted& a, const Emitted& b) { return lex_less(a.pos, b.pos); });
    std::sort(rep.free_alive0.begin(), rep.free_alive0.end(), lex_less);

    // Clan (causal influence) statistics per emitted point.
    std::vector<char> member(traj.births.size(), 0);
    for (const auto& e : emitted) {
        rep.configuration.points.push_back(e.pos);
        std::fill(member.begin(), member.end(), 0);
        std::vector<std::int32_t> stack{static_cast<std::int32_t>(e.idx)};
        member[e.idx] = 1;
        double diam = 0.0;
        std::size_t count = 0;
        while (!stack.empty()) {
            const auto j = stack.back();
            stack.pop_back();
            ++count;
            diam = std::max(diam, distance(traj.births[static_cast<std::size_t>(j)].position, e.pos));
            for (auto dep : res.deps[static_cast<std::size_t>(j)])
                if (!member[static_cast<std::size_t>(dep)]) {
                    member[static_cast<std::size_t>(dep)] = 1;
                    stack.push_back(dep);
                }
        }
        rep.max_clan_diameter = std::max(rep.max_clan_diameter, diam);
        rep.max_clan_size = std::max(rep.max_clan_size, count);
        if (opts_.collect_clan_diameters) rep.clan_diameters.push_back(diam);
        if (opts_.thermodynamic && diam > resolved_margin_) rep.margin_exceeded = true;
    }

    if (rep.max_clan_diameter > sampling_window_.side())
        throw ClanExplosionError("ancestor clan spans the enlarged window; potential not exponentially "
                                 "localized at this intensity");

    if (opts_.thermodynamic && margin_tail_b_ < 0.0) {
        const double surv = std::exp(margin_tail_a_ + margin_tail_b_ * resolved_margin_);
        rep.boundary_risk = static_cast<double>(emitted.size()) * surv;
    }
    return rep;
}

PointConfig GibbsSampler::sample_points(RngStream stream) const { return sample(stream).configuration; }

// ---------------------------------------------------------------- Oracles

PointConfig rejection_oracle(const Window& window, double tau, const Potential& pot, RngStream stream,
                             std::uint64_t max_proposals) {
    const double vol = window.volume();
    for (std::uint64_t attempt = 0; attempt < max_proposals; ++attempt) {
        auto s = stream.child(attempt);
        const std::uint64_t n = s.poisson(tau * vol);
        PointConfig cfg;
        cfg.dim = window.dim;
        cfg.points.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) cfg.points.push_back(uniform_point(window, s));

        // Total energy by summing add-one costs along an insertion order.
        double energy = 0.0;
        for (std::size_t i = 0; i < cfg.points.size() && std::isfinite(energy); ++i)
            energy += pot.add_one(cfg.points[i], std::span<const Point>(cfg.points.data(), i));
        if (!std::isfinite(energy)) continue;
        if (s.uniform() < std::exp(-energy)) {
            std::sort(cfg.points.begin(), cfg.points.end(), lex_less);
            return cfg;
        }
    }
    throw OracleInfeasibleError("rejection_oracle: acceptance rate below threshold");
}

PointConfig forward_dynamics_oracle(const Window& window, double tau, const Potential& pot,
                                    double burn_in, RngStream stream) {
    if (!(burn_in > 0.0)) throw ValidationError("forward_dynamics_oracle: burn_in must be > 0");
    const double vol = window.volume();
    std::vector<Point> state;
    double t = 0.0;
    for (;;) {
        const double rate = tau * vol + static_cast<double>(state.size());
        t += stream.exponential(rate);
        if (t >= burn_in) break;
        if (stream.uniform() * rate < tau * vol) {
            const Point x = uniform_point(window, stream);
            const double delta = pot.add_one(x, state);
            if (stream.uniform() < std::exp(-delta)) state.push_back(x);
        } else if (!state.empty()) {
            const std::size_t k = static_cast<std::size_t>(stream.next_u64() % state.size());
            state[k] = state.back();
            state.pop_back();
        }
    }
    PointConfig cfg;
    cfg.dim = window.dim;
    cfg.points = std::move(state);
    std::sort(cfg.points.begin(), cfg.points.end(), lex_less);
    return cfg;
}

// ---------------------------------------------------------------- Diagnostics

ClanDiagnostics clan_diagnostics(const std::vector<SampleReport>& samples) {
    ClanDiagnostics out;
    std::vector<double> diams;
    for (const auto& s : samples) {
        for (double d : s.clan_diameters) diams.push_back(d);
        out.max_diameter = std::max(out.max_diameter, s.max_clan_diameter);
    }
    out.n_clans = diams.size();
    if (out.n_clans < 1000)
        throw ValidationError("clan_diagnostics: need at least 10^3 sampled clans");
    out.tail = stats::log_survival_tail_fit(std::move(diams));
    return out;
}

PoissonLikeDiagnostics poisson_like_diagnostics(const std::vector<SampleReport>& samples,
                                                const Window& window, int dim,
                                                const std::vector<double>& radii) {
    PoissonLikeDiagnostics out;
    out.radii = radii;
    out.empty_ball_prob.assign(radii.size(), 0.0);

    double max_r = 0.0;
    for (double r : radii) max_r = std::max(max_r, r);

    // Probe centers on a fixed interior lattice, clear of the boundary.
    std::vector<Point> centers;
    const double lim = window.half_width - max_r;
    const int per_axis = 4;
    if (lim > 0.0) {
        for (int a = 0; a < per_axis; ++a)
            for (int b = 0; b < (dim > 1 ? per_axis : 1); ++b)
                for (int c = 0; c < (dim > 2 ? per_axis : 1); ++c) {
                    Point p;
                    p[0] = -lim + 2.0 * lim * (a + 0.5) / per_axis;
                    if (dim > 1) p[1] = -lim + 2.0 * lim * (b + 0.5) / per_axis;
                    if (dim > 2) p[2] = -lim + 2.0 * lim * (c + 0.5) / per_axis;
                    centers.push_back(p);
                }
    }
    if (centers.empty()) throw ValidationError("poisson_like_diagnostics: radii too large for the window");

    std::vector<std::size_t> empty_counts(radii.size(), 0);
    std::size_t trials = 0;
    for (const auto& s : samples) {
        if (!s.free_alive0.empty()) {
            // Pathwise domination: every emitted point must be a free-process point.
            std::size_t j = 0;
            for (const auto& p : s.configuration.points) {
                while (j < s.free_alive0.size() && lex_less(s.free_alive0[j], p)) ++j;
                if (j >= s.free_alive0.size() || !(s.free_alive0[j] == p)) {
                    out.domination_ok = false;
                    break;
                }
            }
        }
        for (const auto& c : centers) {
            ++trials;
            double nearest2 = kInf;
            for (const auto& p : s.configuration.points)
                nearest2 = std::min(nearest2, squared_distance(p, c));
            for (std::size_t k = 0; k < radii.size(); ++k)
                if (nearest2 > radii[k] * radii[k]) ++empty_counts[k];
        }
    }

    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        out.empty_ball_prob[k] = static_cast<double>(empty_counts[k]) / static_cast<double>(trials);
        if (empty_counts[k] > 0 && out.empty_ball_prob[k] < 1.0) {
            xs.push_back(std::pow(radii[k], dim));
            ys.push_back(std::log(out.empty_ball_prob[k]));
        }
    }
    const auto fit = stats::linear_fit(xs, ys);
    out.log_slope_vs_rd = fit.slope;
    out.fit_r2 = fit.r2;
    return out;
}

} // namespace gibbsgeom
