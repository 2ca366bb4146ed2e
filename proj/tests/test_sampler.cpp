#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gibbsgeom/sampler.hpp"
#include "gibbsgeom/stats.hpp"

using namespace gibbsgeom;

namespace {

Window window2(double volume) { return Window::from_volume(2, volume); }

bool same_point(const Point& a, const Point& b) { return a == b; }

bool trajectories_equal_on(const Trajectory& a, const Trajectory& b, double horizon) {
    std::vector<const SpaceTimePoint*> pa, pb;
    for (const auto& p : a.births)
        if (p.birth > -horizon || p.death > -horizon) pa.push_back(&p);
    for (const auto& p : b.births)
        if (p.birth > -horizon || p.death > -horizon) pb.push_back(&p);
    if (pa.size() != pb.size()) return false;
    for (std::size_t i = 0; i < pa.size(); ++i) {
        if (!same_point(pa[i]->position, pb[i]->position)) return false;
        if (pa[i]->birth != pb[i]->birth || pa[i]->death != pb[i]->death) return false;
        if (pa[i]->eta_u != pb[i]->eta_u || pa[i]->u != pb[i]->u) return false;
    }
    return true;
}

} // namespace

TEST_CASE("free trajectory: stationary count at time zero") {
    const Window w = window2(16.0);
    const double tau = 1.25;
    std::vector<double> counts(1000);
    auto root = RngStream::root(1001);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const auto traj = sample_free_trajectory(w, tau, 5.0, root.child(i));
        counts[i] = static_cast<double>(alive_at_zero(traj).size());
    }
    const double mean = stats::mean(counts);
    const double se = std::sqrt(stats::variance(counts) / counts.size());
    CHECK(std::abs(mean - tau * w.volume()) < 3.0 * se + 1e-9);
}

TEST_CASE("free trajectory: horizon zero is a Poisson snapshot") {
    const Window w = window2(25.0);
    auto traj = sample_free_trajectory(w, 2.0, 0.0, RngStream::root(5));
    for (const auto& p : traj.births) {
        CHECK(p.birth < 0.0);
        CHECK(p.death > 0.0); // residual lifetimes only
    }
}

TEST_CASE("free trajectory: sub-cell counts pass chi-square against the Poisson law") {
    const Window w = window2(16.0);
    const double tau = 1.0;
    auto root = RngStream::root(77);
    std::vector<std::uint64_t> counts;
    for (int i = 0; i < 1000; ++i) {
        const auto traj = sample_free_trajectory(w, tau, 3.0, root.child(static_cast<std::uint64_t>(i)));
        std::uint64_t c = 0;
        for (const auto& p : alive_at_zero(traj))
            if (p[0] < 0.0 && p[1] < 0.0) ++c;
        counts.push_back(c);
    }
    const auto gof = stats::chi_square_poisson(counts, tau * w.volume() / 4.0);
    CHECK(gof.p_value > 0.01);
}

TEST_CASE("extend_backward restriction is bit-identical and alive set at the old horizon unchanged") {
    const Window w = window2(9.0);
    auto root = RngStream::root(31);
    const auto original = sample_free_trajectory(w, 1.5, 4.0, root.child("t"));
    auto extended = original;
    extend_backward(extended, 4.0, root.child("t"));
    CHECK(extended.horizon == doctest::Approx(8.0));
    CHECK(trajectories_equal_on(original, extended, 4.0));

    auto alive_at = [](const Trajectory& t, double time) {
        std::vector<Point> out;
        for (const auto& p : t.births)
            if (p.birth <= time && p.death > time) out.push_back(p.position);
        std::sort(out.begin(), out.end(), lex_less);
        return out;
    };
    CHECK(alive_at(original, -4.0) == alive_at(extended, -4.0));
}

TEST_CASE("extend_backward keeps the marginal at the new horizon Poisson") {
    const Window w = window2(16.0);
    const double tau = 1.0;
    auto root = RngStream::root(99);
    std::vector<std::uint64_t> counts;
    for (int i = 0; i < 1500; ++i) {
        auto traj = sample_free_trajectory(w, tau, 2.0, root.child(static_cast<std::uint64_t>(i)));
        extend_backward(traj, 2.0, root.child(static_cast<std::uint64_t>(i)));
        std::uint64_t c = 0;
        for (const auto& p : traj.births)
            if (p.birth <= -4.0 && p.death > -4.0) ++c;
        counts.push_back(c);
    }
    const auto gof = stats::chi_square_poisson(counts, tau * w.volume());
    CHECK(gof.p_value > 0.01);
}

TEST_CASE("resolve: null potential accepts everything") {
    const Window w = window2(16.0);
    auto traj = sample_free_trajectory(w, 1.0, 5.0, RngStream::root(12));
    NullPotential pot(2);
    const auto res = resolve_statuses(traj, pot);
    CHECK(res.undetermined_alive0 == 0);
    for (const auto s : res.statuses) CHECK(s == Status::Accepted);
}

TEST_CASE("resolve: hard-core keeps accepted alive points separated at every time") {
    const Window w = window2(16.0);
    auto traj = sample_free_trajectory(w, 0.6, 6.0, RngStream::root(13));
    HardcorePotential pot(2, 0.25);
    const auto res = resolve_statuses(traj, pot);
    // check pairwise distance among accepted points alive at several times
    for (double t : {-4.0, -2.0, -1.0, -0.5, 0.0}) {
        std::vector<Point> alive;
        for (std::size_t i = 0; i < traj.births.size(); ++i)
            if (res.statuses[i] == Status::Accepted && traj.births[i].birth <= t &&
                traj.births[i].death > t)
                alive.push_back(traj.births[i].position);
        for (std::size_t i = 0; i < alive.size(); ++i)
            for (std::size_t j = i + 1; j < alive.size(); ++j)
                CHECK(distance(alive[i], alive[j]) >= 0.5);
    }
}

TEST_CASE("horizon extension only refines statuses") {
    const Window w = window2(9.0);
    const HardcorePotential pot(2, 0.2);
    auto root = RngStream::root(14);
    for (int trial = 0; trial < 30; ++trial) {
        auto traj = sample_free_trajectory(w, 0.8, 3.0, root.child(static_cast<std::uint64_t>(trial)));
        auto before = resolve_statuses(traj, pot);
        // key by (birth, position) since extension re-sorts
        auto key = [](const SpaceTimePoint& p) {
            return std::make_pair(p.birth, p.position.c);
        };
        std::vector<std::pair<std::pair<double, std::array<double, 3>>, Status>> old;
        for (std::size_t i = 0; i < traj.births.size(); ++i)
            old.emplace_back(key(traj.births[i]), before.statuses[i]);
        std::sort(old.begin(), old.end());

        extend_backward(traj, 3.0, root.child(static_cast<std::uint64_t>(trial)));
        auto after = resolve_statuses(traj, pot);
        for (std::size_t i = 0; i < traj.births.size(); ++i) {
            const auto k = key(traj.births[i]);
            const auto it = std::lower_bound(old.begin(), old.end(), k,
                                             [](const auto& a, const auto& b) { return a.first < b; });
            if (it == old.end() || it->first != k) continue; // new point from the extension
            if (it->second != Status::Undetermined) CHECK(after.statuses[i] == it->second);
        }
    }
}

TEST_CASE("perfect sampler is deterministic byte-for-byte") {
    const Window w = window2(25.0);
    const StraussPotential pot(2, 1.0, 0.5);
    SamplerOptions opts;
    opts.collect_clan_diameters = true;
    GibbsSampler sampler(w, 0.8, pot, opts, RngStream::root(900).child("cal"));
    const auto a = sampler.sample(RngStream::root(900).child("s"));
    const auto b = sampler.sample(RngStream::root(900).child("s"));
    REQUIRE(a.configuration.size() == b.configuration.size());
    for (std::size_t i = 0; i < a.configuration.size(); ++i)
        CHECK(same_point(a.configuration.points[i], b.configuration.points[i]));
    CHECK(a.horizon_used == b.horizon_used);
    CHECK(a.max_clan_diameter == b.max_clan_diameter);
    CHECK(a.extension_count == b.extension_count);
}

TEST_CASE("perfect sampler with null potential is the Poisson snapshot") {
    const Window w = window2(16.0);
    const NullPotential pot(2);
    SamplerOptions opts;
    GibbsSampler sampler(w, 1.0, pot, opts, RngStream::root(1).child("cal"));
    auto root = RngStream::root(321);
    std::vector<std::uint64_t> counts;
    for (int i = 0; i < 1000; ++i)
        counts.push_back(sampler.sample_points(root.child(static_cast<std::uint64_t>(i))).size());
    const auto gof = stats::chi_square_poisson(counts, 16.0);
    CHECK(gof.p_value > 0.01);
}

TEST_CASE("perfect sampler: hard-core feasibility and domination on every sample") {
    const Window w = window2(16.0);
    const HardcorePotential pot(2, 0.25);
    SamplerOptions opts;
    opts.keep_free_snapshot = true;
    GibbsSampler sampler(w, 0.6, pot, opts, RngStream::root(2).child("cal"));
    auto root = RngStream::root(654);
    for (int i = 0; i < 50; ++i) {
        const auto rep = sampler.sample(root.child(static_cast<std::uint64_t>(i)));
        const auto& pts = rep.configuration.points;
        for (std::size_t a = 0; a < pts.size(); ++a)
            for (std::size_t b = a + 1; b < pts.size(); ++b)
                CHECK(distance(pts[a], pts[b]) >= 0.5);
        // emitted subset of the free snapshot
        for (const auto& p : pts)
            CHECK(std::binary_search(rep.free_alive0.begin(), rep.free_alive0.end(), p,
                                     lex_less));
    }
}

TEST_CASE("count distribution matches the rejection oracle (hard-core)") {
    const Window w = window2(6.25);
    const double tau = 0.8;
    const HardcorePotential pot(2, 0.25);
    SamplerOptions opts;
    GibbsSampler sampler(w, tau, pot, opts, RngStream::root(3).child("cal"));
    auto root = RngStream::root(987);
    const int n = 20000;
    std::vector<std::uint64_t> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        a[static_cast<std::size_t>(i)] =
            sampler.sample_points(root.child("p").child(static_cast<std::uint64_t>(i))).size();
        b[static_cast<std::size_t>(i)] =
            rejection_oracle(w, tau, pot, root.child("r").child(static_cast<std::uint64_t>(i))).size();
    }
    CHECK(stats::empirical_tv_distance(a, b) < 0.03);
}

TEST_CASE("rejection oracle: null potential accepts the first proposal") {
    const Window w = window2(4.0);
    const NullPotential pot(2);
    auto cfg = rejection_oracle(w, 1.0, pot, RngStream::root(44));
    for (const auto& p : cfg.points) CHECK(w.contains(p));
}

TEST_CASE("rejection oracle: strauss at large beta approaches hard-core counts") {
    const Window w = window2(4.0);
    auto root = RngStream::root(2024);
    const StraussPotential strong(2, 50.0, 0.5);
    const HardcorePotential hard(2, 0.25);
    const int n = 4000;
    std::vector<std::uint64_t> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        a[static_cast<std::size_t>(i)] =
            rejection_oracle(w, 0.7, strong, root.child("s").child(static_cast<std::uint64_t>(i))).size();
        b[static_cast<std::size_t>(i)] =
            rejection_oracle(w, 0.7, hard, root.child("h").child(static_cast<std::uint64_t>(i))).size();
    }
    CHECK(stats::empirical_tv_distance(a, b) < 0.05);
}

TEST_CASE("forward dynamics oracle agrees with the perfect sampler on the mean count") {
    const Window w = window2(6.25);
    const double tau = 0.8;
    const HardcorePotential pot(2, 0.25);
    auto root = RngStream::root(55);
    const int n = 600;
    std::vector<double> fwd(static_cast<std::size_t>(n)), bwd(static_cast<std::size_t>(n));
    SamplerOptions opts;
    GibbsSampler sampler(w, tau, pot, opts, root.child("cal"));
    for (int i = 0; i < n; ++i) {
        fwd[static_cast<std::size_t>(i)] = static_cast<double>(
            forward_dynamics_oracle(w, tau, pot, 60.0, root.child("f").child(static_cast<std::uint64_t>(i)))
                .size());
        bwd[static_cast<std::size_t>(i)] = static_cast<double>(
            sampler.sample_points(root.child("b").child(static_cast<std::uint64_t>(i))).size());
    }
    const double mf = stats::mean(fwd), mb = stats::mean(bwd);
    const double se = std::sqrt(stats::variance(fwd) / n + stats::variance(bwd) / n);
    CHECK(std::abs(mf - mb) < 3.5 * se);
    // feasibility of the forward state
    auto cfg = forward_dynamics_oracle(w, tau, pot, 30.0, root.child("chk"));
    for (std::size_t i = 0; i < cfg.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.size(); ++j)
            CHECK(distance(cfg.points[i], cfg.points[j]) >= 0.5);
}

TEST_CASE("clan diagnostics: null potential clans are singletons") {
    const Window w = window2(16.0);
    const NullPotential pot(2);
    SamplerOptions opts;
    opts.collect_clan_diameters = true;
    GibbsSampler sampler(w, 1.0, pot, opts, RngStream::root(4).child("cal"));
    auto root = RngStream::root(777);
    std::vector<SampleReport> samples;
    for (int i = 0; i < 100; ++i) samples.push_back(sampler.sample(root.child(static_cast<std::uint64_t>(i))));
    double max_d = 0.0;
    std::size_t n_clans = 0;
    for (const auto& s : samples) {
        for (double d : s.clan_diameters) max_d = std::max(max_d, d);
        n_clans += s.clan_diameters.size();
    }
    CHECK(n_clans > 1000);
    CHECK(max_d == doctest::Approx(0.0));
}

TEST_CASE("clan diagnostics: hard-core tail slope is negative") {
    const Window w = window2(64.0);
    const HardcorePotential pot(2, 0.25);
    SamplerOptions opts;
    opts.collect_clan_diameters = true;
    GibbsSampler sampler(w, 0.5, pot, opts, RngStream::root(5).child("cal"));
    auto root = RngStream::root(888);
    std::vector<SampleReport> samples;
    for (int i = 0; i < 120; ++i) samples.push_back(sampler.sample(root.child(static_cast<std::uint64_t>(i))));
    const auto diag = clan_diagnostics(samples);
    CHECK(diag.n_clans >= 1000);
    CHECK(diag.tail.slope < 0.0);
}

TEST_CASE("poisson-like diagnostics: empty-ball curve for the null potential") {
    const Window w = window2(36.0);
    const double tau = 1.0;
    const NullPotential pot(2);
    SamplerOptions opts;
    opts.keep_free_snapshot = true;
    GibbsSampler sampler(w, tau, pot, opts, RngStream::root(6).child("cal"));
    auto root = RngStream::root(999);
    std::vector<SampleReport> samples;
    for (int i = 0; i < 400; ++i) samples.push_back(sampler.sample(root.child(static_cast<std::uint64_t>(i))));
    std::vector<double> radii{0.2, 0.35, 0.5, 0.65, 0.8};
    const auto diag = poisson_like_diagnostics(samples, w, 2, radii);
    CHECK(diag.domination_ok);
    CHECK(diag.log_slope_vs_rd < 0.0);
    // Poisson void probability: slope should be near -tau * omega_2 = -pi
    CHECK(diag.log_slope_vs_rd == doctest::Approx(-tau * std::numbers::pi).epsilon(0.15));
}

TEST_CASE("clan explosion raises the dedicated error") {
    const Window w = window2(25.0);
    const HardcorePotential pot(2, 0.25);
    SamplerOptions opts;
    opts.t0 = 0.5;
    opts.t_max = 1.0; // far too short for the chains to resolve
    GibbsSampler sampler(w, 0.8, pot, opts, RngStream::root(7).child("cal"));
    CHECK_THROWS_AS((void)sampler.sample(RngStream::root(7).child("s")), ClanExplosionError);
}
